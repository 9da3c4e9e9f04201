import os
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .data.result import ResultTable  # noqa: E402
from .errors import OutputError  # noqa: E402

CONFIG_SUFFIXES: tuple[str, ...] = (".conf", ".yaml", ".yml")
SVG_RC = {
    "svg.hashsalt": "coherence-lab",
    "svg.fonttype": "none",
    "path.simplify": False,
}


def find_config_files(directory: str) -> list[str]:
    """Recursively find all scenario files in the given directory."""
    config_files: list[str] = []
    for root, _, files in os.walk(directory):
        for file in files:
            if file.endswith(CONFIG_SUFFIXES):
                config_files.append(os.path.join(root, file))
    return sorted(config_files)


def format_value(value: float) -> str:
    return f"{value:.12g}"


def table_to_csv(table: ResultTable) -> str:
    lines = [",".join(table.column_names)]
    lines += [",".join(format_value(value) for value in row) for row in table.rows]
    return "\n".join(lines) + "\n"


def read_csv_table(path: str, name: Optional[str] = None) -> ResultTable:
    with open(path, "r") as f:
        header = f.readline().strip()
    columns = header.split(",") if header else []
    values = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=float)
    rows = [tuple(row) for row in values] if values.size else []
    return ResultTable(name or os.path.splitext(os.path.basename(path))[0], columns, rows)


def plot_table(table: ResultTable, path: str):
    """Line chart of every column against the first one, as static SVG."""
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        x = table.column(table.column_names[0])
        marker = "o" if len(table.rows) == 1 else None
        for name in table.column_names[1:]:
            ax.plot(x, table.column(name), label=name, marker=marker)
        ax.set_xlabel(table.column_names[0])
        ax.set_title(table.name)
        if len(table.column_names) > 1:
            ax.legend()
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)


def write_outputs(tables: list[ResultTable], directory: str, plot: bool = False) -> list[str]:
    """Write one CSV (and optionally one SVG) per table; returns the written paths."""
    written: list[str] = []
    if not tables:
        return written
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as e:
        raise OutputError(directory, e.strerror or str(e))
    for table in tables:
        csv_path = os.path.join(directory, f"{table.name}.csv")
        try:
            with open(csv_path, "w", newline="\n") as f:
                f.write(table_to_csv(table))
        except OSError as e:
            raise OutputError(csv_path, e.strerror or str(e))
        written.append(csv_path)
        if plot:
            svg_path = os.path.join(directory, f"{table.name}.svg")
            try:
                plot_table(table, svg_path)
            except OSError as e:
                raise OutputError(svg_path, e.strerror or str(e))
            written.append(svg_path)
    return written
