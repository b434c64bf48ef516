"""cco-bench: coverage and capacity optimization benchmark."""

__version__ = "1.0.0"
