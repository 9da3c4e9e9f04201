from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from ..errors import InvalidParameterError


@dataclass
class ResultTable:
    name: str
    column_names: list[str]
    rows: list[tuple[float, ...]] = field(default_factory=list)

    def __post_init__(self):
        width = len(self.column_names)
        rows: list[tuple[float, ...]] = []
        for row in self.rows:
            if len(row) != width:
                raise InvalidParameterError(
                    f"table {self.name}: row of {len(row)} values for {width} columns"
                )
            rows.append(tuple(float(value) for value in row))
        self.rows = rows

    @classmethod
    def from_columns(cls, name: str, columns: dict[str, Sequence[float]]) -> "ResultTable":
        arrays = [np.asarray(values, dtype=float) for values in columns.values()]
        return cls(name, list(columns), [tuple(row) for row in zip(*arrays)])

    def column(self, name: str) -> np.ndarray:
        index = self.column_names.index(name)
        return np.array([row[index] for row in self.rows])

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "column_names": list(self.column_names),
            "rows": [list(row) for row in self.rows],
        }

    @staticmethod
    def from_dict(data: dict[str, Any]):
        return ResultTable(
            name=data["name"],
            column_names=list(data["column_names"]),
            rows=[tuple(row) for row in data["rows"]],
        )


@dataclass
class ScenarioRun:
    source: str
    scenario: str
    status: str = "pending"
    exit_code: int = 0
    files: list[str] = field(default_factory=list)
    message: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "source": self.source,
            "scenario": self.scenario,
            "status": self.status,
            "exit_code": self.exit_code,
            "files": list(self.files),
            "message": self.message,
        }

    @staticmethod
    def from_dict(data: dict[str, Any]):
        return ScenarioRun(
            source=data["source"],
            scenario=data["scenario"],
            status=data["status"],
            exit_code=data["exit_code"] if "exit_code" in data else 0,
            files=list(data["files"]) if "files" in data else [],
            message=data["message"] if "message" in data else None,
        )
