"""
Tests for non-dominated filtering, hypervolume and frontier comparison.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.optim.pareto import (
    ParetoFront,
    compare_frontiers,
    cumulative_hypervolume,
    dominates,
    hypervolume_2d,
    merge,
    non_dominated,
)

REF = (1.05, 1.05)
points_2d = arrays(np.float64, st.tuples(st.integers(1, 40), st.just(2)), elements=st.floats(0.0, 1.0))


def _brute_force(points: np.ndarray) -> set[tuple[float, float]]:
    keep = set()
    for i, p in enumerate(points):
        if not any(dominates(q, p) for j, q in enumerate(points) if j != i):
            keep.add((float(p[0]), float(p[1])))
    return keep


def _mc_area(points: np.ndarray, ref, n: int, rng: np.random.Generator) -> tuple[float, float]:
    lo = points.min(axis=0)
    box = np.prod(np.asarray(ref) - lo)
    samples = lo + rng.uniform(size=(n, 2)) * (np.asarray(ref) - lo)
    hit = np.zeros(n, dtype=bool)
    for p in points:
        hit |= np.all(samples >= p, axis=1)
    frac = hit.mean()
    return box * frac, box * np.sqrt(frac * (1 - frac) / n)


def test_singleton():
    """Test one point is its own front."""
    front = non_dominated([[1.0, 1.0]])
    assert front.points.tolist() == [[1.0, 1.0]]


def test_dominated_point_removed():
    """Test (2, 2) is dropped next to (1, 2) and (2, 1)."""
    front = non_dominated([[1.0, 2.0], [2.0, 1.0], [2.0, 2.0]])
    assert front.points.tolist() == [[1.0, 2.0], [2.0, 1.0]]


def test_empty_input():
    """Test no points give an empty front."""
    front = non_dominated(np.empty((0, 2)))
    assert front.is_empty
    assert hypervolume_2d(front, REF) == 0.0


def test_duplicates_collapse():
    """Test equal points keep a single representative with the first config."""
    front = non_dominated([[0.5, 0.5], [0.5, 0.5]], configs=["a", "b"])  # type: ignore[list-item]
    assert len(front) == 1
    assert front.configs == ("a",)


def test_matches_brute_force_on_1000_points():
    """Test the sweep equals quadratic pairwise domination."""
    rng = np.random.default_rng(0)
    pts = rng.uniform(size=(1000, 2))
    front = non_dominated(pts)
    assert {tuple(p) for p in front.points.tolist()} == _brute_force(pts)


@given(points_2d)
def test_front_invariants(pts):
    """Test sortedness, strict decrease and idempotence."""
    front = non_dominated(pts)
    assert np.all(np.diff(front.points[:, 0]) > 0)
    assert np.all(np.diff(front.points[:, 1]) < 0)
    again = non_dominated(front.points)
    assert np.array_equal(again.points, front.points)
    assert {tuple(p) for p in front.points.tolist()} == _brute_force(pts)


def test_hypervolume_rectangle():
    """Test one point gives (r1 - a)(r2 - b)."""
    assert hypervolume_2d([[0.25, 0.5]], REF) == pytest.approx(0.8 * 0.55)


def test_hypervolume_point_at_reference():
    """Test a point on the reference contributes nothing."""
    assert hypervolume_2d([list(REF)], REF) == 0.0
    assert hypervolume_2d([[1.2, 0.1]], REF) == 0.0


def test_hypervolume_staircase():
    """Test a two-step staircase by hand."""
    pts = [[0.0, 0.5], [0.5, 0.0]]
    assert hypervolume_2d(pts, (1.0, 1.0)) == pytest.approx(0.5 * 0.5 + 0.5 * 1.0)


@given(points_2d)
def test_dominated_points_do_not_count(pts):
    """Test HV(P) equals HV(non_dominated(P))."""
    assert hypervolume_2d(pts, REF) == pytest.approx(hypervolume_2d(non_dominated(pts), REF))


@given(points_2d, st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_hypervolume_monotone(pts, a, b):
    """Test adding a point never lowers the hypervolume."""
    before = hypervolume_2d(pts, REF)
    after = hypervolume_2d(np.vstack([pts, [[a, b]]]), REF)
    assert after >= before - 1e-12


@settings(deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_merge_equals_refilter(seed):
    """Test incremental merging equals filtering the whole set."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(size=(30, 2))
    front = ParetoFront()
    for p in pts:
        front = merge(front, p)
    assert np.array_equal(front.points, non_dominated(pts).points)


def test_hypervolume_against_monte_carlo():
    """Test the staircase sum within 3 standard errors of 10^6 samples on 20 fronts."""
    rng = np.random.default_rng(1)
    for _ in range(20):
        front = non_dominated(rng.uniform(size=(5, 2)))
        estimate, se = _mc_area(front.points, REF, 1_000_000, rng)
        assert abs(hypervolume_2d(front, REF) - estimate) <= 3 * se + 1e-12


def test_cumulative_hypervolume():
    """Test the running hypervolume is non-decreasing and ends at the full value."""
    rng = np.random.default_rng(2)
    pts = rng.uniform(size=(200, 2))
    curve = cumulative_hypervolume(pts, REF)
    assert curve.shape == (200,)
    assert np.all(np.diff(curve) >= -1e-15)
    assert curve[-1] == pytest.approx(hypervolume_2d(pts, REF))


def test_compare_identical_fronts():
    """Test identical fronts give 0% both ways."""
    front = non_dominated([[0.1, 0.6], [0.3, 0.3], [0.6, 0.1]])
    report = compare_frontiers({"a": front, "b": front}, REF, {"a": 10, "b": 20})
    assert report.improvement_pct["a"]["b"] == pytest.approx(0.0)
    assert report.improvement_pct["b"]["a"] == pytest.approx(0.0)
    assert report.hypervolume_ratio_pct["a"]["b"] == pytest.approx(0.0)
    assert report.evaluations == {"a": 10, "b": 20}


def test_compare_dominating_front():
    """Test a front inside another's dominated region shows a positive improvement."""
    worse = non_dominated([[0.2, 0.7], [0.4, 0.4], [0.7, 0.2]])
    better = non_dominated(worse.points - 0.05)
    report = compare_frontiers({"better": better, "worse": worse}, REF)
    assert report.improvement_pct["better"]["worse"] > 0
    assert report.improvement_pct["worse"]["better"] < 0
    assert report.hypervolume["better"] > report.hypervolume["worse"]


def test_compare_excludes_empty():
    """Test an empty front is excluded with a notice."""
    front = non_dominated([[0.2, 0.2]])
    report = compare_frontiers({"a": front, "b": front, "empty": ParetoFront()}, REF)
    assert report.excluded == ["empty"]
    assert "empty" not in report.hypervolume


def test_compare_needs_two():
    """Test a single front cannot be compared."""
    with pytest.raises(ValueError):
        compare_frontiers({"a": non_dominated([[0.2, 0.2]])}, REF)
