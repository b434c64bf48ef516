"""
Evaluation records shared by every optimizer.
One record per black-box call, in call order.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.objectives.models import Configuration, ObjectivePair


@dataclass(frozen=True)
class EvaluationRecord:
    config: Configuration
    pair: ObjectivePair
    lam: Optional[float] = None  # DDPG runs are tagged with their lambda

    @property
    def objectives(self) -> tuple[float, float]:
        return self.pair.normalized()


def objective_matrix(records: list[EvaluationRecord]) -> np.ndarray:
    """(n, 2) array of cell-normalized (under, over) objectives."""
    if not records:
        return np.empty((0, 2))
    return np.array([r.objectives for r in records], dtype=float)
