"""
Desk-scale benchmark: BO and the DDPG lambda sweep against random search
over several seeds, median hypervolumes printed as a table.
"""

import logging
from pathlib import Path

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from src.config import load_experiment, settings
from src.rf.coverage import precompute_coverage
from src.rf.environment import generate_environment
from src.services.benchmark import run_benchmark

console = Console()


def main(
    config: Path = typer.Option(Path("configs/desk.toml"), "--config"),
    seeds: int = typer.Option(5, "--seeds", min=1),
    skip_ddpg: bool = typer.Option(False, "--skip-ddpg"),
) -> None:
    logging.basicConfig(
        level=settings.log_level, format="%(message)s", handlers=[RichHandler(console=console)]
    )
    experiment = load_experiment(config)
    with console.status("[bold green]Precomputing coverage maps...[/bold green]"):
        tensor = precompute_coverage(generate_environment(experiment.layout), settings.threads)

    summary = run_benchmark(
        tensor,
        experiment.thresholds,
        seeds=list(range(seeds)),
        bo=experiment.method.bo,
        ddpg=None if skip_ddpg else experiment.method.ddpg,
        lambda_stride=experiment.method.lambda_stride,
        max_workers=settings.threads,
    )

    table = Table(title=f"Median hypervolume over {seeds} seeds")
    table.add_column("Method", style="cyan")
    table.add_column("Evaluations", justify="right")
    table.add_column("Method HV", justify="right")
    table.add_column("Random HV", justify="right")
    for method in ("bo", "ddpg"):
        rows = [r for r in summary.results if r.method == method]
        if not rows:
            continue
        hv, random_hv = summary.medians(method)
        table.add_row(method, str(rows[0].evaluations), f"{hv:.5f}", f"{random_hv:.5f}")
    console.print(table)


if __name__ == "__main__":
    typer.run(main)
