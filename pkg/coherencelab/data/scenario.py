import math
import os
from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, Optional, Type

import yaml

from ..errors import ConfigValidationError
from ..physics.collective_emission import Orientation
from ..physics.shg_phase_matching import PumpKind
from ..physics.wolf_two_source import COHERENCE_MODEL_REGISTRY

FLOAT = "float"
INT = "int"
TEXT = "text"
FLAG = "flag"
CHOICE = "choice"


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str = FLOAT
    required: bool = True
    default: Any = None
    choices: tuple[str, ...] = ()
    condition: str = ""  # when set, the key belongs to the schema only under this condition

    def parse(self, raw: str) -> Any:
        """Convert one raw value, raising ValueError with a readable message."""
        if self.kind == FLOAT:
            try:
                value = float(raw)
            except ValueError:
                raise ValueError(f"{self.name}: expected a decimal number, got {raw!r}")
            if not math.isfinite(value):
                raise ValueError(f"{self.name}: expected a finite number, got {raw!r}")
            return value
        if self.kind == INT:
            try:
                value = float(raw)
            except ValueError:
                raise ValueError(f"{self.name}: expected an integer, got {raw!r}")
            if not value.is_integer():
                raise ValueError(f"{self.name}: expected an integer, got {raw!r}")
            return int(value)
        if self.kind == FLAG:
            if raw not in ("0", "1"):
                raise ValueError(f"{self.name}: expected 0 or 1, got {raw!r}")
            return raw == "1"
        if self.kind == CHOICE:
            if raw not in self.choices:
                raise ValueError(
                    f"{self.name}: expected one of {', '.join(self.choices)}, got {raw!r}"
                )
            return raw
        return raw


@dataclass
class ScenarioConfig:
    scenario: str
    params: Dict[str, Any] = field(default_factory=dict)
    output_dir: str = "results"
    source: Optional[str] = None  # file the config was read from, if any

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "params": dict(self.params),
            "output_dir": self.output_dir,
            "source": self.source,
        }


class ScenarioSchema:
    """Key schema of one scenario.

    PARAMS lists the keys every config of the scenario may carry;
    conditional_params adds the keys enabled by another key's value.
    """

    SCENARIO_NAME: ClassVar[str]
    PARAMS: ClassVar[tuple[ParamSpec, ...]] = ()

    @classmethod
    def conditional_params(cls, raw: Dict[str, str]) -> Optional[tuple[ParamSpec, ...]]:
        """Keys enabled by `raw`; None when the switching key itself is invalid."""
        return ()

    @classmethod
    def all_params(cls) -> tuple[ParamSpec, ...]:
        return cls.PARAMS

    @classmethod
    def check(cls, params: Dict[str, Any]) -> list[str]:
        """Cross-key problems that a single key cannot express."""
        return []


SCENARIO_REGISTRY: Dict[str, Type[ScenarioSchema]] = {}


def register_scenario(name: str):
    def decorator(cls: Type[ScenarioSchema]):
        SCENARIO_REGISTRY[name] = cls
        cls.SCENARIO_NAME = name
        return cls

    return decorator


def _grid_check(params: Dict[str, Any], low: str, high: str, count: str, minimum: int) -> list[str]:
    problems: list[str] = []
    if params[high] <= params[low]:
        problems.append(f"{high} must exceed {low}")
    if params[count] < minimum:
        problems.append(f"{count} must be at least {minimum}")
    return problems


def _positive(params: Dict[str, Any], *names: str) -> list[str]:
    return [f"{name} must be positive" for name in names if params.get(name) is not None and params[name] <= 0]


_MODEL_KEY_KINDS: Dict[str, str] = {"mu_file": TEXT}


@register_scenario("wolf")
class WolfSchema(ScenarioSchema):
    PARAMS = (
        ParamSpec("R1"),
        ParamSpec("R2"),
        ParamSpec("omega0"),
        ParamSpec("gamma"),
        ParamSpec("mu_model", CHOICE, choices=tuple(sorted(COHERENCE_MODEL_REGISTRY))),
        ParamSpec("grid_min"),
        ParamSpec("grid_max"),
        ParamSpec("grid_n", INT),
    )

    @classmethod
    def _model_params(cls, model_name: str) -> tuple[ParamSpec, ...]:
        model = COHERENCE_MODEL_REGISTRY[model_name]
        condition = f"mu_model = {model_name}"
        specs = [
            ParamSpec(key, _MODEL_KEY_KINDS.get(key, FLOAT), condition=condition)
            for key in model.REQUIRED_KEYS
        ]
        specs += [
            ParamSpec(key, _MODEL_KEY_KINDS.get(key, FLOAT), required=False, default=default, condition=condition)
            for key, default in model.OPTIONAL_KEYS.items()
        ]
        return tuple(specs)

    @classmethod
    def conditional_params(cls, raw: Dict[str, str]) -> Optional[tuple[ParamSpec, ...]]:
        model_name = raw.get("mu_model")
        if model_name not in COHERENCE_MODEL_REGISTRY:
            return None
        return cls._model_params(model_name)

    @classmethod
    def all_params(cls) -> tuple[ParamSpec, ...]:
        specs = list(cls.PARAMS)
        for model_name in sorted(COHERENCE_MODEL_REGISTRY):
            specs.extend(cls._model_params(model_name))
        return tuple(specs)

    @classmethod
    def check(cls, params: Dict[str, Any]) -> list[str]:
        problems = _positive(params, "R1", "R2", "gamma", "mu_sigma")
        problems += _grid_check(params, "grid_min", "grid_max", "grid_n", 3)
        if params.get("mu_value") is not None and abs(params["mu_value"]) > 1:
            problems.append("mu_value must satisfy |mu_value| <= 1")
        return problems


@register_scenario("vacuum")
class VacuumSchema(ScenarioSchema):
    PARAMS = (
        ParamSpec("omega"),
        ParamSpec("kr_min"),
        ParamSpec("kr_max"),
        ParamSpec("n_points", INT),
    )

    @classmethod
    def check(cls, params: Dict[str, Any]) -> list[str]:
        problems = _positive(params, "omega", "kr_min")
        return problems + _grid_check(params, "kr_min", "kr_max", "n_points", 2)


@register_scenario("atoms")
class AtomsSchema(ScenarioSchema):
    PARAMS = (
        ParamSpec("omega_A"),
        ParamSpec("omega_B"),
        ParamSpec("gamma"),
        ParamSpec("rabi"),
        ParamSpec("separation"),
        ParamSpec("dipole", CHOICE, choices=tuple(o.value for o in Orientation)),
        ParamSpec("scan_min"),
        ParamSpec("scan_max"),
        ParamSpec("scan_n", INT),
        ParamSpec("omega_dd", required=False),
        ParamSpec("gamma_cross", required=False),
    )

    @classmethod
    def check(cls, params: Dict[str, Any]) -> list[str]:
        problems = _positive(params, "omega_A", "omega_B", "gamma", "rabi", "separation")
        return problems + _grid_check(params, "scan_min", "scan_max", "scan_n", 3)


@register_scenario("mirror")
class MirrorSchema(ScenarioSchema):
    PARAMS = (
        ParamSpec("omega"),
        ParamSpec("gamma"),
        ParamSpec("kb_min"),
        ParamSpec("kb_max"),
        ParamSpec("n_points", INT),
    )

    @classmethod
    def check(cls, params: Dict[str, Any]) -> list[str]:
        problems = _positive(params, "omega", "gamma", "kb_min")
        return problems + _grid_check(params, "kb_min", "kb_max", "n_points", 2)


@register_scenario("shg")
class ShgSchema(ScenarioSchema):
    PARAMS = (
        ParamSpec("kind", CHOICE, choices=tuple(k.value for k in PumpKind)),
        ParamSpec("Lx"),
        ParamSpec("Ly"),
        ParamSpec("Lz"),
        ParamSpec("intensity", required=False, default=1.0),
        ParamSpec("q_max"),
        ParamSpec("q_n", INT),
    )
    KIND_PARAMS: ClassVar[Dict[str, tuple[ParamSpec, ...]]] = {
        "coherent": (),
        "incoherent": (ParamSpec("incoherent_strength", condition="kind = incoherent"),),
        "gaussian_schell": (ParamSpec("coherence_length", condition="kind = gaussian_schell"),),
    }

    @classmethod
    def conditional_params(cls, raw: Dict[str, str]) -> Optional[tuple[ParamSpec, ...]]:
        return cls.KIND_PARAMS.get(raw.get("kind", ""))

    @classmethod
    def all_params(cls) -> tuple[ParamSpec, ...]:
        return cls.PARAMS + tuple(spec for specs in cls.KIND_PARAMS.values() for spec in specs)

    @classmethod
    def check(cls, params: Dict[str, Any]) -> list[str]:
        problems = _positive(params, "Lx", "Ly", "Lz", "intensity", "coherence_length", "q_max")
        if params.get("incoherent_strength") is not None and params["incoherent_strength"] < 0:
            problems.append("incoherent_strength must be non-negative")
        if params["q_n"] < 2:
            problems.append("q_n must be at least 2")
        return problems


@register_scenario("pulse")
class PulseSchema(ScenarioSchema):
    PARAMS = (
        ParamSpec("T0"),
        ParamSpec("k2"),
        ParamSpec("z"),
        ParamSpec("t_min"),
        ParamSpec("t_max"),
        ParamSpec("n_points", INT),
        ParamSpec("check_factorization", FLAG, required=False, default=False),
        ParamSpec("correlation_file", TEXT, required=False),
    )
    COHERENCE_TIME = ParamSpec("tc", condition="no correlation_file")

    @classmethod
    def conditional_params(cls, raw: Dict[str, str]) -> Optional[tuple[ParamSpec, ...]]:
        if "correlation_file" in raw:
            return ()
        return (cls.COHERENCE_TIME,)

    @classmethod
    def all_params(cls) -> tuple[ParamSpec, ...]:
        return cls.PARAMS + (cls.COHERENCE_TIME,)

    @classmethod
    def check(cls, params: Dict[str, Any]) -> list[str]:
        problems = _positive(params, "T0", "tc")
        if params["z"] < 0:
            problems.append("z must be non-negative")
        return problems + _grid_check(params, "t_min", "t_max", "n_points", 16)


def validate_params(raw: Dict[str, str], output_dir: str = "results", source: Optional[str] = None) -> ScenarioConfig:
    """Check a raw key/value map against its scenario schema.

    Every problem found is collected into one ConfigValidationError.
    """
    problems: list[str] = []
    raw = dict(raw)
    scenario = raw.pop("scenario", None)
    if scenario is None:
        raise ConfigValidationError(["missing key: scenario"])
    if scenario not in SCENARIO_REGISTRY:
        known = ", ".join(sorted(SCENARIO_REGISTRY))
        raise ConfigValidationError([f"unknown scenario {scenario!r} (known: {known})"])
    schema = SCENARIO_REGISTRY[scenario]

    conditional = schema.conditional_params(raw)
    if conditional is None:
        # the switch key is invalid and is reported below; keep its dependants quiet
        specs = schema.PARAMS
        allowed = {spec.name for spec in schema.all_params()}
    else:
        specs = schema.PARAMS + conditional
        allowed = {spec.name for spec in specs}

    for key in sorted(set(raw) - allowed):
        problems.append(f"unknown key: {key}")

    params: Dict[str, Any] = {}
    for spec in specs:
        if spec.name not in raw:
            if spec.required:
                problems.append(f"missing key: {spec.name}")
            else:
                params[spec.name] = spec.default
            continue
        try:
            params[spec.name] = spec.parse(raw[spec.name])
        except ValueError as e:
            problems.append(str(e))

    if not problems:
        problems = schema.check(params)
    if problems:
        raise ConfigValidationError(problems)
    return ScenarioConfig(scenario, params, output_dir, source)


def parse_config(text: str, output_dir: str = "results", source: Optional[str] = None) -> ScenarioConfig:
    """Parse `key = value` lines; `#` starts a comment, keys are case-sensitive."""
    raw: Dict[str, str] = {}
    problems: list[str] = []
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            problems.append(f"line {number}: expected 'key = value', got {content!r}")
            continue
        key, value = (part.strip() for part in content.split("=", 1))
        if not key or not value:
            problems.append(f"line {number}: empty key or value in {content!r}")
        elif key in raw:
            problems.append(f"line {number}: duplicate key {key}")
        else:
            raw[key] = value
    if problems:
        raise ConfigValidationError(problems)
    return validate_params(raw, output_dir, source)


def _yaml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    return str(value)


def load_config(path: str, output_dir: str = "results") -> ScenarioConfig:
    try:
        with open(path, "r") as f:
            text = f.read()
    except OSError as e:
        raise ConfigValidationError([f"{path}: {e.strerror or e}"])
    if os.path.splitext(path)[1] in (".yaml", ".yml"):
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ConfigValidationError([f"{path}: invalid YAML: {e}"])
        if not isinstance(data, dict):
            raise ConfigValidationError([f"{path}: expected a flat mapping of keys to values"])
        nested = [str(key) for key, value in data.items() if isinstance(value, (dict, list))]
        if nested:
            raise ConfigValidationError([f"{path}: nested value for key {key}" for key in nested])
        raw = {str(key): _yaml_value(value) for key, value in data.items()}
        return validate_params(raw, output_dir, path)
    return parse_config(text, output_dir, path)
