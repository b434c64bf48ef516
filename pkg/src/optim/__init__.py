from src.optim.ddpg import DdpgOptions, DdpgRun, SweepResult, ddpg_run, lambda_sweep
from src.optim.encoding import decode, encode, encode_many
from src.optim.gp import GpModel, KernelHyperparams, fit_map, posterior
from src.optim.mobo import BoOptions, BoState, bo_loop
from src.optim.pareto import (
    FrontierComparison,
    ParetoFront,
    compare_frontiers,
    cumulative_hypervolume,
    hypervolume_2d,
    non_dominated,
)
from src.optim.random_search import best_record, best_scalarized, random_search
from src.optim.records import EvaluationRecord, objective_matrix

__all__ = [
    "BoOptions",
    "BoState",
    "DdpgOptions",
    "DdpgRun",
    "EvaluationRecord",
    "FrontierComparison",
    "GpModel",
    "KernelHyperparams",
    "ParetoFront",
    "SweepResult",
    "best_record",
    "best_scalarized",
    "bo_loop",
    "compare_frontiers",
    "cumulative_hypervolume",
    "ddpg_run",
    "decode",
    "encode",
    "encode_many",
    "fit_map",
    "hypervolume_2d",
    "lambda_sweep",
    "non_dominated",
    "objective_matrix",
    "posterior",
    "random_search",
]
