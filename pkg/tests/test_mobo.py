"""
Tests for EHVI, the acquisition search and the BO loop.
"""

import numpy as np
import pytest

from src.optim.encoding import encode
from src.optim.gp import KernelHyperparams, condition
from src.optim.mobo import (
    AcquisitionOptions,
    BoOptions,
    bo_loop,
    ehvi,
    ehvi_batch,
    ehvi_gaussian,
    maximize_ehvi,
    mc_qehvi_samples,
    optimize_acquisition,
    pareto_boxes,
    sobol_init,
)
from src.optim.pareto import ParetoFront, hypervolume_2d, non_dominated

REF = (1.05, 1.05)
FAST_ACQ = AcquisitionOptions(raw_samples=64, top_k=2, pattern_iterations=5)


def _models(seed: int = 0, n: int = 12, d: int = 2):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(n, d))
    y1 = 0.5 + 0.3 * np.sin(3 * X[:, 0]) + 0.1 * X[:, 1]
    y2 = 0.5 - 0.3 * np.sin(3 * X[:, 0]) + 0.1 * X[:, 1] ** 2
    hp = KernelHyperparams(lengthscales=(0.4,) * d, signal_variance=1.0, noise_variance=1e-3)
    models = (condition(X, y1, hp), condition(X, y2, hp))
    front = non_dominated(np.stack([y1, y2], axis=1))
    return models, front


def _mc_ehvi(mean, std, front, ref, n, rng):
    samples = mean + std * rng.standard_normal((n, 2))
    base = hypervolume_2d(front, ref)
    gains = np.array([hypervolume_2d(np.vstack([front.points, s[None]]), ref) - base for s in samples])
    return gains.mean(), gains.std(ddof=1) / np.sqrt(n)


def test_sobol_init():
    """Test the design lies in the unit cube and repeats per seed."""
    a = sobol_init(64, 30, seed=3)
    b = sobol_init(64, 30, seed=3)
    c = sobol_init(64, 30, seed=4)
    assert a.shape == (64, 30)
    assert np.all((a >= 0) & (a <= 1))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert sobol_init(10, 3, seed=0).shape == (10, 3)


def test_sobol_rejects_empty():
    """Test a non-positive count fails."""
    with pytest.raises(ValueError):
        sobol_init(0, 3, seed=0)


def test_boxes_tile_dominated_region():
    """Test box areas sum to the hypervolume."""
    front = non_dominated([[0.1, 0.8], [0.4, 0.5], [0.7, 0.2]])
    boxes = pareto_boxes(front, REF)
    assert len(boxes) == 3
    assert sum(b.area for b in boxes) == pytest.approx(hypervolume_2d(front, REF))
    assert pareto_boxes(ParetoFront(), REF) == []


def test_boxes_reject_bad_reference():
    """Test a reference point that does not dominate the front fails."""
    with pytest.raises(ValueError):
        pareto_boxes(non_dominated([[0.5, 1.2]]), REF)


def test_ehvi_deterministic_candidate():
    """Test zero variance gives the exact hypervolume gain."""
    front = non_dominated([[0.5, 0.5]])
    value = ehvi_gaussian(np.array([[0.25, 0.25]]), np.zeros((1, 2)), front, (1.0, 1.0))[0]
    assert value == pytest.approx(0.75**2 - 0.25)


def test_ehvi_empty_front():
    """Test with no front the gain is the full rectangle to the reference."""
    value = ehvi_gaussian(np.array([[0.2, 0.4]]), np.zeros((1, 2)), ParetoFront(), (1.0, 1.0))[0]
    assert value == pytest.approx(0.8 * 0.6)


def test_ehvi_dominated_candidate():
    """Test a confidently dominated candidate has essentially zero EHVI."""
    front = non_dominated([[0.2, 0.2]])
    value = ehvi_gaussian(np.array([[0.8, 0.8]]), np.full((1, 2), 1e-3), front, REF)[0]
    assert 0.0 <= value < 1e-12


def _check_against_monte_carlo(instances: int, n_samples: int) -> None:
    rng = np.random.default_rng(7)
    for _ in range(instances):
        front = non_dominated(rng.uniform(0.1, 0.9, size=(6, 2)))
        mean = rng.uniform(0.0, 1.0, size=2)
        std = rng.uniform(0.02, 0.3, size=2)
        closed = ehvi_gaussian(mean[None], std[None], front, REF)[0]
        estimate, se = _mc_ehvi(mean, std, front, REF, n_samples, rng)
        assert closed >= 0.0
        assert abs(closed - estimate) <= 3 * se + 1e-9


def test_ehvi_against_monte_carlo():
    """Test the closed form within 3 SE of sampled hypervolume gains."""
    _check_against_monte_carlo(instances=5, n_samples=4000)


@pytest.mark.slow
def test_ehvi_against_monte_carlo_full():
    """Test the closed form within 3 SE of 10^5 samples on 20 random instances."""
    _check_against_monte_carlo(instances=20, n_samples=100_000)


def test_ehvi_non_negative_batch():
    """Test EHVI is never negative over a batch of candidates."""
    models, front = _models()
    X = np.random.default_rng(1).uniform(size=(256, 2))
    values = ehvi_batch(models, X, front, REF)
    assert values.shape == (256,)
    assert np.all(values >= 0.0)
    assert ehvi(models, X[0], front, REF) == pytest.approx(values[0])


def test_qehvi_single_point_matches_closed_form():
    """Test q = 1 Monte Carlo agrees with the analytic value."""
    models, front = _models()
    x = np.array([[0.3, 0.6]])
    samples = mc_qehvi_samples(models, x, front, REF, n_samples=50_000, seed=0)
    se = samples.std(ddof=1) / np.sqrt(samples.size)
    assert abs(samples.mean() - ehvi(models, x[0], front, REF)) <= 3 * se + 1e-9


def test_qehvi_duplicate_points_count_once():
    """Test a batch of two identical points improves like one point."""
    models, front = _models()
    x = np.array([0.7, 0.2])
    samples = mc_qehvi_samples(models, np.stack([x, x]), front, REF, n_samples=50_000, seed=1)
    se = samples.std(ddof=1) / np.sqrt(samples.size)
    assert abs(samples.mean() - ehvi(models, x, front, REF)) <= 3 * se + 1e-6


def test_qehvi_batch_at_least_single():
    """Test adding a point to the batch never lowers the per-sample improvement."""
    models, front = _models()
    X = np.array([[0.1, 0.9], [0.8, 0.4]])
    both = mc_qehvi_samples(models, X, front, REF, n_samples=2000, seed=2)
    assert np.all(both >= -1e-12)


def test_maximize_beats_raw_samples():
    """Test the pattern search never ends below the best raw sample."""
    models, front = _models()
    x, value = maximize_ehvi(models, front, REF, seed=5, options=FAST_ACQ)
    raw = sobol_init(FAST_ACQ.raw_samples, 2, seed=5)
    assert value >= ehvi_batch(models, raw, front, REF).max() - 1e-15
    assert np.all((x >= 0) & (x <= 1))
    assert ehvi(models, x, front, REF) == pytest.approx(value)


def test_optimize_acquisition_returns_lattice_configuration():
    """Test the chosen point decodes to a valid configuration."""
    rng = np.random.default_rng(0)
    X = rng.uniform(size=(10, 4))
    hp = KernelHyperparams(lengthscales=(0.5,) * 4, signal_variance=1.0, noise_variance=1e-3)
    models = (condition(X, X[:, 0], hp), condition(X, 1 - X[:, 0], hp))
    front = non_dominated(np.stack([X[:, 0], 1 - X[:, 0]], axis=1))
    config = optimize_acquisition(models, front, REF, seed=0, options=FAST_ACQ)
    assert config.n_sectors == 2
    assert set(config.downtilts.tolist()) <= set(range(11))
    assert np.all((config.powers_dbm >= 30) & (config.powers_dbm <= 50))


def test_bo_loop_accounting(small_tensor, thresholds):
    """Test history length, monotone hypervolume and determinism."""
    options = BoOptions(n_init=8, n_iterations=3, fit_restarts=2, refit_restarts=1, acquisition=FAST_ACQ)
    state = bo_loop(small_tensor, thresholds, options, seed=0)
    assert len(state.history) == 11
    assert len(state.hypervolume_trace) == 11
    assert np.all(np.diff(state.hypervolume_trace) >= 0)
    assert state.models is not None
    assert state.hypervolume_trace[-1] == pytest.approx(hypervolume_2d(state.front, options.ref_point))

    again = bo_loop(small_tensor, thresholds, options, seed=0)
    assert [encode(r.config).tolist() for r in again.history] == [encode(r.config).tolist() for r in state.history]


def test_bo_options_budget():
    """Test the default budget is 512 + 500 = 1,012 evaluations."""
    assert BoOptions().total_evaluations == 1012


def _max_projection_gap(points: np.ndarray) -> float:
    """Largest empty interval along any single coordinate, endpoints included."""
    gaps = []
    for column in points.T:
        edges = np.concatenate([[0.0], np.sort(column), [1.0]])
        gaps.append(np.diff(edges).max())
    return float(max(gaps))


def test_sobol_fills_space_better_than_random():
    """Test the Sobol design has a smaller projection gap than uniform draws on average."""
    sobol_gap = _max_projection_gap(sobol_init(512, 30, seed=0))
    rng = np.random.default_rng(0)
    random_gaps = [_max_projection_gap(rng.uniform(size=(512, 30))) for _ in range(20)]
    assert sobol_gap < np.mean(random_gaps)


def test_maximize_ehvi_matches_grid_scan():
    """Test the 1-D acquisition maximizer lands within 0.01 of a dense grid argmax."""
    X = (np.arange(10) + 0.5)[:, None] / 10.0
    y1 = (X[:, 0] - 0.37) ** 2
    y2 = 0.5 * y1 + 0.05
    hp = KernelHyperparams(lengthscales=(0.3,), signal_variance=1.0, noise_variance=1e-4)
    models = (condition(X, y1, hp), condition(X, y2, hp))
    front = non_dominated(np.array([[0.0, 0.3], [0.3, 0.0]]))

    grid = np.linspace(0.0, 1.0, 10_000)[:, None]
    oracle = float(grid[int(np.argmax(ehvi_batch(models, grid, front, REF))), 0])
    x, value = maximize_ehvi(models, front, REF, seed=0, options=AcquisitionOptions())
    assert abs(float(x[0]) - oracle) < 0.01
    assert value >= ehvi_batch(models, grid, front, REF).max() - 1e-6
