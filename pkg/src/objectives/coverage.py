"""
Coverage objectives over a per-sector RSRP stack.

    under = sum_ij sigma((gamma_w - r_b) / T)
    over  = sum_ij sigma((I - r_b + gamma_o) / T)

with r_b the serving RSRP and I the interference from every other sector,
summed in linear milliwatts and expressed in dB.
"""

from typing import Optional

import numpy as np
from scipy.special import expit, logsumexp

from src.errors import ObjectiveError
from src.objectives.models import (
    AttachmentGrid,
    Configuration,
    CoverageClass,
    ObjectivePair,
    Thresholds,
)
from src.rf.coverage import CoverageTensor, apply_configuration

_LN10_OVER_10 = np.log(10.0) / 10.0


def _as_stack(rsrp_stack: np.ndarray, min_sectors: int) -> np.ndarray:
    stack = np.asarray(rsrp_stack, dtype=float)
    if stack.ndim != 3 or stack.shape[0] < min_sectors:
        n = stack.shape[0] if stack.ndim == 3 else 0
        raise ObjectiveError(f"need a (sectors, rows, cols) stack with >= {min_sectors} sectors, got {n}")
    return stack


def attach(rsrp_stack: np.ndarray) -> AttachmentGrid:
    """Serving sector = per-cell argmax; np.argmax returns the lowest index on ties."""
    stack = _as_stack(rsrp_stack, 1)
    serving = np.argmax(stack, axis=0)
    serving_rsrp = np.take_along_axis(stack, serving[None], axis=0)[0]
    return AttachmentGrid(serving=serving, serving_rsrp_dbm=serving_rsrp)


def interference_db(rsrp_stack: np.ndarray, attachment: AttachmentGrid) -> np.ndarray:
    """I = 10 log10(sum over non-serving sectors of 10^(r/10)), per cell."""
    stack = _as_stack(rsrp_stack, 2)
    scaled = stack * _LN10_OVER_10
    serving_mask = np.arange(stack.shape[0])[:, None, None] == attachment.serving[None]
    scaled = np.where(serving_mask, -np.inf, scaled)
    return logsumexp(scaled, axis=0) / _LN10_OVER_10


def under_coverage(attachment: AttachmentGrid, thresholds: Thresholds) -> float:
    z = (thresholds.gamma_w_dbm - attachment.serving_rsrp_dbm) / thresholds.sigmoid_temperature_db
    return float(np.sum(expit(z)))


def over_coverage(
    rsrp_stack: np.ndarray,
    attachment: AttachmentGrid,
    thresholds: Thresholds,
    interference: Optional[np.ndarray] = None,
) -> float:
    if interference is None:
        interference = interference_db(rsrp_stack, attachment)
    margin = interference - attachment.serving_rsrp_dbm + thresholds.gamma_o_db
    return float(np.sum(expit(margin / thresholds.sigmoid_temperature_db)))


def classify_cells(
    rsrp_stack: np.ndarray,
    attachment: AttachmentGrid,
    thresholds: Thresholds,
    interference: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Boolean (under, over) masks with hard thresholds; a cell may be in both."""
    if interference is None:
        interference = interference_db(rsrp_stack, attachment)
    under = attachment.serving_rsrp_dbm < thresholds.gamma_w_dbm
    over = interference - attachment.serving_rsrp_dbm + thresholds.gamma_o_db > 0
    return under, over


def coverage_classes(
    rsrp_stack: np.ndarray, attachment: AttachmentGrid, thresholds: Thresholds
) -> np.ndarray:
    """Per-cell CoverageClass; under-coverage takes precedence over over-coverage."""
    under, over = classify_cells(rsrp_stack, attachment, thresholds)
    classes = np.full(under.shape, CoverageClass.COVERED, dtype=np.int8)
    classes[over] = CoverageClass.OVER
    classes[under] = CoverageClass.UNDER
    return classes


def coverage_percentages(
    rsrp_stack: np.ndarray,
    attachment: AttachmentGrid,
    thresholds: Thresholds,
    interference: Optional[np.ndarray] = None,
) -> tuple[float, float]:
    under, over = classify_cells(rsrp_stack, attachment, thresholds, interference)
    return float(under.mean()), float(over.mean())


def scalarize(pair: ObjectivePair, lam: float) -> float:
    """lambda * under + (1 - lambda) * over; lower is better."""
    if not 0.0 <= lam <= 1.0:
        raise ObjectiveError(f"lambda must lie in [0, 1], got {lam}")
    return lam * pair.under_cov + (1.0 - lam) * pair.over_cov


def linear_utility(rsrp_stack: np.ndarray, attachment: AttachmentGrid, lam: float) -> float:
    """
    sum_ij [r_b - (1 - lambda) I_dB], the linear combination behind the two
    objectives: lambda = 1 rewards RSRP, lambda = 0 signal-to-interference.
    """
    if not 0.0 <= lam <= 1.0:
        raise ObjectiveError(f"lambda must lie in [0, 1], got {lam}")
    interference = interference_db(rsrp_stack, attachment)
    return float(np.sum(attachment.serving_rsrp_dbm - (1.0 - lam) * interference))


def evaluate_stack(rsrp_stack: np.ndarray, thresholds: Thresholds) -> ObjectivePair:
    stack = _as_stack(rsrp_stack, 2)
    attachment = attach(stack)
    interference = interference_db(stack, attachment)
    under_pct, over_pct = coverage_percentages(stack, attachment, thresholds, interference)
    return ObjectivePair(
        under_cov=under_coverage(attachment, thresholds),
        over_cov=over_coverage(stack, attachment, thresholds, interference),
        under_pct=under_pct,
        over_pct=over_pct,
        cell_count=attachment.cell_count,
    )


def evaluate(config: Configuration, tensor: CoverageTensor, thresholds: Thresholds) -> ObjectivePair:
    """The black box every optimizer calls: configuration -> objective pair."""
    return evaluate_stack(apply_configuration(tensor, config), thresholds)
