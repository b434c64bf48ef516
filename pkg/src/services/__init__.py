"""Experiment orchestration, history files and reports."""
from .experiment_runner import ExperimentRunner, RunResult
from .history import MethodHistory, read_history, write_front, write_history
from .reporting import Report, write_report

__all__ = [
    "ExperimentRunner",
    "MethodHistory",
    "Report",
    "RunResult",
    "read_history",
    "write_front",
    "write_history",
    "write_report",
]
