import argparse
import json
import logging
import os
import sys
from typing import Optional

from dotenv import load_dotenv
from rich.console import Console
from rich.table import Table

from .config import Config
from .data.result import ScenarioRun
from .data.scenario import SCENARIO_REGISTRY, ScenarioConfig, load_config
from .errors import CoherenceLabError, ConfigValidationError, NumericalError
from .runners.scenario_runner import ScenarioRunner
from .utils import find_config_files, write_outputs

console = Console()

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID_CONFIG = 2
EXIT_NUMERICAL = 3


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, ConfigValidationError):
        return EXIT_INVALID_CONFIG
    if isinstance(error, NumericalError):
        return EXIT_NUMERICAL
    return EXIT_FAILURE


def parse_args(argv: Optional[list[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="coherence-lab",
        description="Run coherence scenarios and write their result tables",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Run one or more scenario files")
    run_parser.add_argument(
        "paths",
        nargs="+",
        help="Scenario files (.conf, .yaml, .yml) or directories scanned recursively for them",
    )
    run_parser.add_argument(
        "--out",
        type=str,
        default="results",
        help="Directory to store result tables, one subdirectory per scenario file",
    )
    run_parser.add_argument(
        "--plot",
        action="store_true",
        help="Also write one SVG line chart per result table",
    )
    run_parser.add_argument(
        "--dry-run",
        action="store_true",
        help="Validate and list the scenarios without running them",
    )

    schema_parser = subparsers.add_parser("schema", help="Print the keys of a scenario")
    schema_parser.add_argument("scenario", help="Scenario name")

    return parser.parse_args(argv)


def collect_paths(paths: list[str]) -> tuple[list[str], list[str]]:
    """Expand directories; returns (config files, missing paths)."""
    files: list[str] = []
    missing: list[str] = []
    for path in paths:
        if os.path.isdir(path):
            files.extend(find_config_files(path))
        elif os.path.isfile(path):
            files.append(path)
        else:
            missing.append(path)
    return files, missing


def run_file(path: str, config: Config, runner: ScenarioRunner) -> ScenarioRun:
    stem = os.path.splitext(os.path.basename(path))[0]
    run = ScenarioRun(source=path, scenario="?")
    try:
        scenario: ScenarioConfig = load_config(path, os.path.join(config.output_dir, stem))
        run.scenario = scenario.scenario
        if config.dry_run:
            run.status = "validated"
            console.print(f"    {scenario.scenario} / {path}", style="blue")
            return run
        console.print(f"Running {scenario.scenario} scenario from {path}", style="bold blue")
        tables = runner.run(scenario, config)
        run.files = write_outputs(tables, scenario.output_dir, config.plot)
        run.status = "completed"
        console.print(
            f"Scenario {path} completed: {len(run.files)} file(s) in {scenario.output_dir}",
            style="bold green",
        )
    except ConfigValidationError as e:
        run.status = "invalid"
        run.exit_code = exit_code_for(e)
        run.message = "; ".join(e.problems)
        console.print(f"Invalid scenario file {path}:", style="bold red")
        for problem in e.problems:
            console.print(f"    {problem}", style="red")
    except (CoherenceLabError, OSError, ArithmeticError, ValueError) as e:
        run.status = "failed"
        run.exit_code = exit_code_for(e)
        run.message = f"{type(e).__name__}: {e}"
        console.print(
            f"Scenario {run.scenario} from {path} failed: {run.message}", style="bold red"
        )
    return run


def print_summary(runs: list[ScenarioRun]):
    table = Table(title="Run summary", show_header=True, header_style="bold magenta")
    table.add_column("Scenario file", justify="left", style="cyan")
    table.add_column("Scenario", justify="left")
    table.add_column("Status", justify="left")
    table.add_column("Files", justify="right")
    for run in runs:
        style = "green" if run.exit_code == EXIT_OK else "red"
        table.add_row(run.source, run.scenario, run.status, str(len(run.files)), style=style)
    console.print(table)


def do_run(args: argparse.Namespace, config: Config) -> int:
    config.output_dir = args.out
    config.plot = args.plot
    config.dry_run = args.dry_run

    console.print(f"🔹 Using results directory: {config.output_dir}", style="bold green")
    console.print(f"🔹 Using {config.threads} worker(s)", style="bold green")

    files, missing = collect_paths(args.paths)
    for path in missing:
        console.print(f"No such scenario file or directory: {path}", style="bold red")
    if not files and not missing:
        console.print("No scenario files found", style="bold yellow")

    if config.dry_run:
        console.print(f"Ready to run {len(files)} scenario(s):", style="bold blue")

    runner = ScenarioRunner()
    runs = [run_file(path, config, runner) for path in files]

    if config.dry_run:
        console.print("Dry run mode enabled. Skipping scenario execution.", style="bold yellow")
    elif runs:
        print_summary(runs)
        os.makedirs(config.output_dir, exist_ok=True)
        with open(os.path.join(config.output_dir, "summary.json"), "w") as f:
            json.dump([run.to_dict() for run in runs], f, indent=2)

    codes = [run.exit_code for run in runs]
    if missing:
        codes.append(EXIT_INVALID_CONFIG)
    return max(codes, default=EXIT_OK)


def do_schema(args: argparse.Namespace) -> int:
    if args.scenario not in SCENARIO_REGISTRY:
        known = ", ".join(sorted(SCENARIO_REGISTRY))
        console.print(f"Unknown scenario {args.scenario!r} (known: {known})", style="bold red")
        return EXIT_INVALID_CONFIG
    schema = SCENARIO_REGISTRY[args.scenario]
    table = Table(
        title=f"Keys of the {args.scenario} scenario",
        show_header=True,
        header_style="bold magenta",
    )
    table.add_column("Key", justify="left", style="cyan")
    table.add_column("Kind", justify="left")
    table.add_column("Required", justify="left")
    table.add_column("Default", justify="left")
    table.add_column("When", justify="left", style="dim")
    table.add_row("scenario", "choice", "yes", "", "", style="bold")
    for spec in schema.all_params():
        kind = f"{spec.kind} ({'|'.join(spec.choices)})" if spec.choices else spec.kind
        default = "" if spec.default is None else str(spec.default)
        table.add_row(spec.name, kind, "yes" if spec.required else "no", default, spec.condition)
    console.print(table)
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    load_dotenv()
    args = parse_args(argv)
    try:
        config = Config.from_env()
    except ConfigValidationError as e:
        for problem in e.problems:
            console.print(problem, style="bold red")
        return EXIT_INVALID_CONFIG
    logging.basicConfig(
        level=getattr(logging, config.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    if args.command == "schema":
        return do_schema(args)
    return do_run(args, config)


if __name__ == "__main__":
    sys.exit(main())
