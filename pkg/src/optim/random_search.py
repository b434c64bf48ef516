"""Uniform random search baseline."""

import logging
from typing import Callable, Optional

import numpy as np

from src.objectives.coverage import evaluate, scalarize
from src.objectives.models import DOWNTILT_MAX_DEG, DOWNTILT_MIN_DEG, Configuration, Thresholds
from src.optim.records import EvaluationRecord
from src.rf.coverage import CoverageTensor
from src.rf.models import POWER_MAX_DBM, POWER_MIN_DBM

log = logging.getLogger(__name__)


def random_configuration(rng: np.random.Generator, n_sectors: int) -> Configuration:
    """Uniform integer downtilts and uniform continuous powers."""
    tilts = rng.integers(DOWNTILT_MIN_DEG, DOWNTILT_MAX_DEG + 1, size=n_sectors)
    powers = rng.uniform(POWER_MIN_DBM, POWER_MAX_DBM, size=n_sectors)
    return Configuration.from_arrays(tilts, powers)


def random_search(
    tensor: CoverageTensor,
    thresholds: Thresholds,
    budget: int,
    seed: int = 0,
    on_evaluation: Optional[Callable[[EvaluationRecord], None]] = None,
) -> list[EvaluationRecord]:
    if budget < 1:
        raise ValueError(f"budget must be positive, got {budget}")
    rng = np.random.default_rng(seed)
    history: list[EvaluationRecord] = []
    for k in range(budget):
        config = random_configuration(rng, tensor.n_sectors)
        record = EvaluationRecord(config=config, pair=evaluate(config, tensor, thresholds))
        history.append(record)
        if on_evaluation:
            on_evaluation(record)
        if (k + 1) % 1000 == 0:
            log.info("Random search: %d/%d evaluations", k + 1, budget)
    return history


def _normalized_score(record: EvaluationRecord, lam: float) -> float:
    return scalarize(record.pair, lam) / record.pair.cell_count


def best_record(records: list[EvaluationRecord], lam: float) -> EvaluationRecord:
    """The evaluation, and so the configuration, with the smallest scalarized value; first wins ties."""
    if not records:
        raise ValueError("no evaluations")
    return min(records, key=lambda r: _normalized_score(r, lam))


def best_scalarized(records: list[EvaluationRecord], lam: float) -> float:
    """Smallest cell-normalized scalarized value seen."""
    return _normalized_score(best_record(records, lam), lam)
