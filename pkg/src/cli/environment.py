"""gen-env and precompute subcommands."""

from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from src.cli import DEFAULT_CONFIG, console, exit_codes, load_config
from src.services.experiment_runner import ExperimentRunner


def gen_env(
    config: Path = typer.Option(DEFAULT_CONFIG, "--config", help="Experiment TOML file"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Override the layout seed"),
    out: Optional[Path] = typer.Option(None, "--out", help="Environment JSON path"),
) -> None:
    """Write the radio environment description."""
    with exit_codes():
        runner = ExperimentRunner(load_config(config))
        path = runner.generate_environment(out, seed)
    console.print(f"[green]✓[/green] Environment written to {path}")


def precompute(
    config: Path = typer.Option(DEFAULT_CONFIG, "--config", help="Experiment TOML file"),
    env: Optional[Path] = typer.Option(None, "--env", help="Environment JSON (default from config)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Tensor output path"),
) -> None:
    """Compute and store the coverage tensor."""
    with exit_codes():
        runner = ExperimentRunner(load_config(config))
        with console.status("[bold green]Precomputing coverage maps...[/bold green]"):
            summary = runner.precompute(env, out)

    table = Table(title="Coverage tensor", show_header=False)
    table.add_column("Field", style="dim")
    table.add_column("Value")
    table.add_row("File", str(summary.path))
    table.add_row("Shape", " x ".join(str(s) for s in summary.shape))
    table.add_row("SHA-256", summary.checksum)
    console.print(table)
