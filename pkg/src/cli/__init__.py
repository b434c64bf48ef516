"""Command-line interface: shared console, logging setup and exit codes."""

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape

from src.config import ExperimentConfig, load_experiment
from src.errors import CcoError, ConfigError, HistoryFormatError, InvalidGridError, InvalidLayoutError

console = Console(stderr=True)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

DEFAULT_CONFIG = Path("configs/default.toml")


def setup_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=True, show_path=False)],
        force=True,
    )


@contextmanager
def exit_codes() -> Iterator[None]:
    """Map package errors to exit codes 2 (configuration, layout) and 3 (runtime)."""
    try:
        yield
    except (ConfigError, InvalidGridError, InvalidLayoutError) as e:
        console.print(f"[bold red]Configuration error:[/bold red] {escape(str(e))}")
        raise typer.Exit(EXIT_CONFIG) from e
    except HistoryFormatError as e:
        console.print(f"[bold red]History error:[/bold red] {escape(str(e))}")
        for line in e.diagnostics:
            console.print(f"  [dim]{escape(line)}[/dim]")
        raise typer.Exit(EXIT_CONFIG) from e
    except CcoError as e:
        console.print(f"[bold red]Error:[/bold red] {escape(str(e))}")
        raise typer.Exit(EXIT_RUNTIME) from e


def load_config(path: Path) -> ExperimentConfig:
    return load_experiment(path)
