from ..config import Config
from ..data.result import ResultTable
from ..data.scenario import ScenarioConfig


class BaseRunner:
    def __init__(self):
        pass

    def run(self, scenario: ScenarioConfig, config: Config) -> list[ResultTable]:
        raise NotImplementedError
