"""
Multi-seed benchmark: each optimizer against random search at the same
evaluation count, summarized by median front hypervolume.
"""

import logging
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel

from src.objectives.models import Thresholds
from src.optim.ddpg import DdpgOptions, lambda_sweep
from src.optim.mobo import BoOptions, bo_loop
from src.optim.pareto import hypervolume_2d, non_dominated
from src.optim.random_search import random_search
from src.optim.records import EvaluationRecord, objective_matrix
from src.rf.coverage import CoverageTensor

log = logging.getLogger(__name__)


class SeedResult(BaseModel):
    seed: int
    method: str
    evaluations: int
    hypervolume: float
    random_hypervolume: float


class BenchmarkSummary(BaseModel):
    results: list[SeedResult]

    def medians(self, method: str) -> tuple[float, float]:
        """(method, matched random) median hypervolume."""
        rows = [r for r in self.results if r.method == method]
        if not rows:
            raise KeyError(method)
        return (
            float(np.median([r.hypervolume for r in rows])),
            float(np.median([r.random_hypervolume for r in rows])),
        )


def front_hypervolume(records: list[EvaluationRecord], ref_point: Sequence[float]) -> float:
    return hypervolume_2d(non_dominated(objective_matrix(records)), ref_point)


def run_benchmark(
    tensor: CoverageTensor,
    thresholds: Thresholds,
    seeds: Sequence[int],
    bo: Optional[BoOptions] = None,
    ddpg: Optional[DdpgOptions] = None,
    lambda_stride: float = 0.1,
    max_workers: int = 1,
) -> BenchmarkSummary:
    """Runs BO and/or the DDPG sweep per seed; a method given as None is skipped."""
    results: list[SeedResult] = []
    for seed in seeds:
        if bo is not None:
            ref = bo.ref_point
            history = bo_loop(tensor, thresholds, bo, seed).history
            baseline = random_search(tensor, thresholds, len(history), seed + 10_000)
            results.append(SeedResult(
                seed=seed, method="bo", evaluations=len(history),
                hypervolume=front_hypervolume(history, ref),
                random_hypervolume=front_hypervolume(baseline, ref),
            ))
        if ddpg is not None:
            ref = (bo or BoOptions()).ref_point
            records = lambda_sweep(tensor, thresholds, ddpg, seed, lambda_stride, max_workers).records
            baseline = random_search(tensor, thresholds, len(records), seed + 20_000)
            results.append(SeedResult(
                seed=seed, method="ddpg", evaluations=len(records),
                hypervolume=front_hypervolume(records, ref),
                random_hypervolume=front_hypervolume(baseline, ref),
            ))
        log.info("Benchmark seed %d done", seed)
    return BenchmarkSummary(results=results)
