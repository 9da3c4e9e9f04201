import os
from typing import Optional

from .errors import ConfigValidationError

THREADS_ENV = "COHERENCE_LAB_THREADS"


def threads_from_env(value: Optional[str] = None) -> int:
    """Read the worker cap from COHERENCE_LAB_THREADS (unset means 1)."""
    raw = os.getenv(THREADS_ENV) if value is None else value
    if raw is None or raw.strip() == "":
        return 1
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigValidationError(
            [f"{THREADS_ENV} must be a positive integer, got {raw!r}"]
        )
    if threads < 1:
        raise ConfigValidationError(
            [f"{THREADS_ENV} must be a positive integer, got {raw!r}"]
        )
    return threads


class Config:
    def __init__(self):
        self.output_dir: str = "results"  # where scenario tables are written
        self.plot: bool = False  # emit one SVG line chart per table
        self.threads: int = 1  # worker cap for parallel sweeps
        self.log_level: str = "INFO"  # level for library loggers
        self.dry_run: bool = (
            False  # list the scenarios without running them
        )

    @classmethod
    def from_env(cls) -> "Config":
        config = cls()
        config.threads = threads_from_env()
        config.log_level = os.getenv("LOG_LEVEL", config.log_level)
        return config
