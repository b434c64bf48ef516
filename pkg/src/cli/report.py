"""report subcommand."""

from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from src.cli import console, exit_codes, load_config
from src.optim.mobo import DEFAULT_REF_POINT
from src.optim.pareto import FrontierComparison
from src.rf.coverage import load_tensor
from src.services.history import read_history
from src.services.reporting import write_report


def _comparison_table(comparison: FrontierComparison) -> Table:
    table = Table(title="Frontier comparison")
    table.add_column("Method", style="cyan")
    table.add_column("Evaluations", justify="right")
    table.add_column("Hypervolume", justify="right")
    for other in comparison.methods:
        table.add_column(f"vs {other} (%)", justify="right")
    for name in comparison.methods:
        cells = []
        for other in comparison.methods:
            cells.append("-" if other == name else f"{comparison.improvement_pct[name][other]:+.2f}")
        table.add_row(name, str(comparison.evaluations[name]), f"{comparison.hypervolume[name]:.5f}", *cells)
    return table


def report(
    histories: list[Path] = typer.Argument(..., help="History CSV files"),
    out: Path = typer.Option(Path("report"), "--out", help="Report directory"),
    config: Optional[Path] = typer.Option(None, "--config", help="Experiment TOML (thresholds, tensor path)"),
    tensor: Optional[Path] = typer.Option(None, "--tensor", help="Coverage tensor for rasters"),
    lam: float = typer.Option(0.6, "--lambda", min=0.0, max=1.0, help="Scalarization weight for the rendered configuration"),
) -> None:
    """Compare fronts, write sample-efficiency curves and render rasters."""
    with exit_codes():
        parsed = [read_history(p) for p in histories]
        experiment = load_config(config) if config else None
        ref_point = experiment.method.bo.ref_point if experiment else DEFAULT_REF_POINT
        tensor_path = tensor or (experiment.output.tensor_path if experiment else None)
        coverage = load_tensor(tensor_path) if tensor_path and tensor_path.exists() else None
        if tensor is not None and coverage is None:
            console.print(f"[yellow]Tensor {tensor} not found; skipping rasters[/yellow]")
        result = write_report(
            parsed, out, ref_point, coverage, experiment.thresholds if experiment else None, lam
        )

    if result.comparison is not None:
        console.print(_comparison_table(result.comparison))
        for name in result.comparison.excluded:
            console.print(f"[yellow]Excluded (empty front):[/yellow] {name}")
    console.print(f"[green]✓[/green] Sample efficiency: {result.sample_efficiency_path}")
    for path in result.rasters:
        console.print(f"  [dim]{path}[/dim]")
