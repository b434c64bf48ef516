"""
Exception hierarchy for cco-bench.
Every error raised on purpose by the package derives from CcoError so the CLI
can map it to an exit code.
"""


class CcoError(Exception):
    """Base class for all package errors."""


class ConfigError(CcoError, ValueError):
    """Experiment file or CLI arguments are unusable."""

    def __init__(self, message: str, section: str | None = None):
        self.section = section
        if section:
            message = f"[{section}] {message}"
        super().__init__(message)


class InvalidLayoutError(CcoError, ValueError):
    """Site layout is inconsistent (overlapping sites, wrong sector count)."""


class InvalidGridError(CcoError, ValueError):
    """Grid extent is not an exact multiple of the resolution."""


class InvalidConfigurationError(CcoError, ValueError):
    """Downtilt/power setting outside what the coverage tensor supports."""


class ObjectiveError(CcoError, ValueError):
    """Objective cannot be computed for the given sector stack."""


class FactorizationError(CcoError):
    """Kernel matrix stayed non positive-definite after the jitter ladder."""


class FitError(CcoError):
    """Every MAP restart failed."""


class TensorFormatError(CcoError):
    """Coverage tensor file is truncated or has an unknown header."""


class HistoryFormatError(CcoError):
    """History CSV rows could not be parsed."""

    def __init__(self, message: str, diagnostics: list[str] | None = None):
        self.diagnostics = diagnostics or []
        super().__init__(message)
