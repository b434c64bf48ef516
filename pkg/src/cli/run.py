"""run subcommand."""

from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from src.cli import DEFAULT_CONFIG, console, exit_codes, load_config
from src.config import MethodName
from src.optim.pareto import hypervolume_2d
from src.services.experiment_runner import ExperimentRunner


def run(
    method: Optional[MethodName] = typer.Option(
        None, "--method", help="random, bo or ddpg (default: method.name from the config)"
    ),
    config: Path = typer.Option(DEFAULT_CONFIG, "--config", help="Experiment TOML file"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Override the method seed"),
    budget: Optional[int] = typer.Option(
        None, "--budget", help="Random: evaluations; BO: iterations after the design; DDPG: iterations per lambda"
    ),
    lambda_stride: Optional[float] = typer.Option(None, "--lambda-stride", help="DDPG lambda sweep stride"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory for the CSVs"),
) -> None:
    """Run one optimizer and write its history and front CSVs."""
    with exit_codes():
        experiment = load_config(config)
        runner = ExperimentRunner(experiment)
        method = method or experiment.method.name
        result = runner.run(method, seed=seed, budget=budget, lambda_stride=lambda_stride, out_dir=out)

    ref_point = experiment.method.bo.ref_point
    table = Table(title=f"{result.method.value} run (seed {result.seed})", show_header=False)
    table.add_column("Metric", style="dim")
    table.add_column("Value", justify="right")
    table.add_row("Evaluations", str(len(result.records)))
    table.add_row("Front points", str(len(result.front)))
    table.add_row("Hypervolume", f"{hypervolume_2d(result.front, ref_point):.5f}")
    table.add_row("History", str(result.history_path))
    table.add_row("Front", str(result.front_path))
    console.print(table)
