"""
cco-bench entry point.
Environment generation, tensor precomputation, optimizer runs and reports.
"""

from typing import Optional

import typer

from src.cli import setup_logging
from src.cli.environment import gen_env, precompute
from src.cli.report import report
from src.cli.run import run
from src.config import settings

app = typer.Typer(
    name="cco",
    help="Coverage and capacity optimization benchmark.",
    no_args_is_help=True,
    add_completion=False,
)


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Overrides CCO_LOG_LEVEL"),
) -> None:
    setup_logging(log_level or settings.log_level)


app.command("gen-env")(gen_env)
app.command("precompute")(precompute)
app.command("run")(run)
app.command("report")(report)


def cli() -> None:
    """CLI entry point."""
    app()


if __name__ == "__main__":
    cli()
