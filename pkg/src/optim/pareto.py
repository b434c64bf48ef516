"""
Pareto utilities for two minimized objectives.
Non-dominated filtering, exact 2-D hypervolume and frontier comparison.
"""

import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel

from src.objectives.models import Configuration

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ParetoFront:
    """Non-dominated points sorted by the first objective (second strictly decreasing)."""

    points: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    configs: tuple[Optional[Configuration], ...] = ()

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def is_empty(self) -> bool:
        return len(self) == 0


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """a weakly better everywhere and strictly better somewhere."""
    a_arr, b_arr = np.asarray(a), np.asarray(b)
    return bool(np.all(a_arr <= b_arr) and np.any(a_arr < b_arr))


def non_dominated(
    points: Union[np.ndarray, Sequence[Sequence[float]]],
    configs: Optional[Sequence[Optional[Configuration]]] = None,
) -> ParetoFront:
    """
    Exact non-dominated subset; duplicates collapse to their first occurrence.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        return ParetoFront()
    if configs is not None and len(configs) != pts.shape[0]:
        raise ValueError(f"{len(configs)} configs for {pts.shape[0]} points")

    # Lexicographic sort, ties keep input order
    order = np.lexsort((np.arange(pts.shape[0]), pts[:, 1], pts[:, 0]))
    keep: list[int] = []
    best_second = np.inf
    for idx in order:
        if pts[idx, 1] < best_second:
            keep.append(int(idx))
            best_second = pts[idx, 1]

    kept_configs = tuple(configs[i] for i in keep) if configs is not None else (None,) * len(keep)
    return ParetoFront(points=pts[keep].copy(), configs=kept_configs)


def merge(front: ParetoFront, point: Sequence[float], config: Optional[Configuration] = None) -> ParetoFront:
    """Front after observing one more point."""
    p = np.asarray(point, dtype=float)
    if len(front) and np.any(np.all(front.points <= p, axis=1)):
        return front
    pts = np.vstack([front.points, p[None]])
    return non_dominated(pts, (*front.configs, config))


def _as_points(front: Union[ParetoFront, np.ndarray, Sequence[Sequence[float]]]) -> np.ndarray:
    if isinstance(front, ParetoFront):
        return front.points
    return np.asarray(front, dtype=float).reshape(-1, 2)


def hypervolume_2d(
    front: Union[ParetoFront, np.ndarray, Sequence[Sequence[float]]],
    ref_point: Sequence[float],
) -> float:
    """Area dominated by the points and bounded by ref_point (staircase sum)."""
    ref = np.asarray(ref_point, dtype=float)
    pts = _as_points(front)
    pts = pts[np.all(pts < ref, axis=1)]
    if pts.shape[0] == 0:
        return 0.0
    nd = non_dominated(pts).points
    widths = np.diff(np.append(nd[:, 0], ref[0]))
    heights = ref[1] - nd[:, 1]
    return float(np.sum(widths * heights))


def cumulative_hypervolume(points: np.ndarray, ref_point: Sequence[float]) -> np.ndarray:
    """Hypervolume of the running front after each point, non-decreasing."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    ref = np.asarray(ref_point, dtype=float)
    out = np.empty(pts.shape[0])
    current = np.empty((0, 2))
    hv = 0.0
    for k, p in enumerate(pts):
        inside = bool(np.all(p < ref))
        dominated = current.shape[0] > 0 and bool(np.any(np.all(current <= p, axis=1)))
        if inside and not dominated:
            current = non_dominated(np.vstack([current, p[None]])).points
            hv = hypervolume_2d(current, ref)
        out[k] = hv
    return out


class FrontierComparison(BaseModel):
    """Per-method hypervolumes plus pairwise improvement matrices (row over column)."""

    methods: list[str]
    hypervolume: dict[str, float]
    evaluations: dict[str, int]
    improvement_pct: dict[str, dict[str, float]]
    hypervolume_ratio_pct: dict[str, dict[str, float]]
    excluded: list[str] = []


def _interpolated_gap(a: np.ndarray, b: np.ndarray, grid_size: int) -> float:
    """
    Mean of (b_2(g) - a_2(g)) over a shared first-objective grid, each front
    linearly interpolated between its points. Objectives are cell fractions,
    so the gap x 100 is a percentage of the area.
    """
    lo = max(a[0, 0], b[0, 0])
    hi = min(a[-1, 0], b[-1, 0])
    if hi <= lo:
        lo = min(a[0, 0], b[0, 0])
        hi = max(a[-1, 0], b[-1, 0])
    grid = np.linspace(lo, hi, grid_size) if hi > lo else np.array([lo])
    a_second = np.interp(grid, a[:, 0], a[:, 1])
    b_second = np.interp(grid, b[:, 0], b[:, 1])
    return float(np.mean(b_second - a_second))


def compare_frontiers(
    fronts_by_method: Mapping[str, ParetoFront],
    ref_point: Sequence[float],
    evaluations: Optional[Mapping[str, int]] = None,
    grid_size: int = 200,
) -> FrontierComparison:
    """
    Hypervolume, evaluation count and mutual improvement of each front.

    Fronts with no points are excluded and listed in `excluded`.
    """
    evaluations = dict(evaluations or {})
    excluded = [name for name, f in fronts_by_method.items() if len(f) < 1]
    for name in excluded:
        log.warning("Front for %s is empty; excluded from comparison", name)
    fronts = {name: f for name, f in fronts_by_method.items() if len(f) >= 1}
    if len(fronts) + len(excluded) < 2:
        raise ValueError("compare_frontiers needs at least two named fronts")

    hv = {name: hypervolume_2d(f, ref_point) for name, f in fronts.items()}
    improvement: dict[str, dict[str, float]] = {}
    ratio: dict[str, dict[str, float]] = {}
    for a_name, a in fronts.items():
        improvement[a_name] = {}
        ratio[a_name] = {}
        for b_name, b in fronts.items():
            if a_name == b_name:
                continue
            improvement[a_name][b_name] = 100.0 * _interpolated_gap(a.points, b.points, grid_size)
            ratio[a_name][b_name] = (
                100.0 * (hv[a_name] / hv[b_name] - 1.0) if hv[b_name] > 0 else float("nan")
            )

    return FrontierComparison(
        methods=list(fronts),
        hypervolume=hv,
        evaluations={name: int(evaluations.get(name, 0)) for name in fronts},
        improvement_pct=improvement,
        hypervolume_ratio_pct=ratio,
        excluded=excluded,
    )
