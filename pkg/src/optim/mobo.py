"""
Multi-objective Bayesian optimization over the configuration cube.

Two independent GPs (one per normalized objective), exact two-objective
expected hypervolume improvement, multi-start pattern search over the
acquisition, and the sequential evaluate-refit loop.
"""

import itertools
import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field
from scipy.linalg import cholesky
from scipy.stats import norm, qmc

from src.objectives.coverage import evaluate
from src.objectives.models import Configuration, ObjectivePair, Thresholds
from src.optim.encoding import decode, dimension, encode_many
from src.optim.gp import GpModel, KernelHyperparams, fit_map, posterior, posterior_covariance
from src.optim.pareto import ParetoFront, hypervolume_2d, merge, non_dominated
from src.optim.records import EvaluationRecord, objective_matrix
from src.rf.coverage import CoverageTensor

log = logging.getLogger(__name__)

DEFAULT_REF_POINT = (1.05, 1.05)
Models = tuple[GpModel, GpModel]


class AcquisitionOptions(BaseModel):
    raw_samples: int = Field(1024, gt=0)
    top_k: int = Field(10, gt=0)
    pattern_iterations: int = Field(50, gt=0)
    initial_step: float = Field(0.1, gt=0)
    min_step: float = Field(1e-4, gt=0)


class BoOptions(BaseModel):
    n_init: int = Field(512, gt=0)
    n_iterations: int = Field(500, ge=0)
    fit_restarts: int = Field(8, gt=0)
    refit_restarts: int = Field(2, gt=0)
    ref_point: tuple[float, float] = DEFAULT_REF_POINT
    acquisition: AcquisitionOptions = Field(default_factory=AcquisitionOptions)
    log_every: int = Field(10, gt=0)

    @property
    def total_evaluations(self) -> int:
        return self.n_init + self.n_iterations


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lower, upper] in objective space."""

    lower: tuple[float, float]
    upper: tuple[float, float]

    @property
    def area(self) -> float:
        return max(self.upper[0] - self.lower[0], 0.0) * max(self.upper[1] - self.lower[1], 0.0)


@dataclass
class BoState:
    history: list[EvaluationRecord]
    models: Optional[Models]
    front: ParetoFront
    ref_point: np.ndarray
    budget: tuple[int, int]
    seed: int
    hypervolume_trace: list[float] = field(default_factory=list)


def _child_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**31 - 1))


def sobol_init(n: int, d: int, seed: int) -> np.ndarray:
    """n scrambled Sobol points in [0, 1]^d, deterministic given seed."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    sampler = qmc.Sobol(d=d, scramble=True, seed=seed)
    with warnings.catch_warnings():
        # Non power-of-two counts lose the balance guarantee; fine for a design
        warnings.simplefilter("ignore", UserWarning)
        return sampler.random(n)


def _front_inside(front: ParetoFront, ref: np.ndarray) -> np.ndarray:
    pts = front.points
    return pts[np.all(pts < ref, axis=1)] if len(pts) else pts


def pareto_boxes(front: ParetoFront, ref_point: Sequence[float]) -> list[Box]:
    """
    Disjoint boxes tiling the region dominated by the front within ref_point.

    Raises:
        ValueError: a front point is not strictly better than ref_point
    """
    ref = np.asarray(ref_point, dtype=float)
    pts = front.points
    if len(pts) and not np.all(pts < ref):
        raise ValueError(f"reference point {tuple(ref)} does not dominate every front point")
    if len(pts) == 0:
        return []
    right = np.append(pts[1:, 0], ref[0])
    return [
        Box(lower=(float(p[0]), float(p[1])), upper=(float(r), float(ref[1])))
        for p, r in zip(pts, right)
    ]


def _strips(front: ParetoFront, ref: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    The non-dominated region as vertical strips [a_k, b_k) x (-inf, c_k).
    a_0 = -inf; the first strip lies left of every front point.
    """
    pts = _front_inside(front, ref)
    a = np.concatenate([[-np.inf], pts[:, 0]])
    b = np.concatenate([pts[:, 0], [ref[0]]])
    c = np.concatenate([[ref[1]], pts[:, 1]])
    return a, b, c


def _expected_shortfall(c: np.ndarray, mu: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """E[(c - Y)^+] for Y ~ N(mu, sigma^2), broadcasting; c = -inf gives 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        diff = c - mu
        z = diff / sigma
        value = diff * norm.cdf(z) + sigma * norm.pdf(z)
    deterministic = np.maximum(diff, 0.0)
    value = np.where(sigma > 0, value, deterministic)
    value = np.where(np.isneginf(c), 0.0, value)
    return np.maximum(np.nan_to_num(value, nan=0.0), 0.0)


def ehvi_gaussian(
    mean: np.ndarray, std: np.ndarray, front: ParetoFront, ref_point: Sequence[float]
) -> np.ndarray:
    """
    Closed-form EHVI for independent Gaussian objectives.

    EHVI = sum_k (psi_1(b_k) - psi_1(a_k)) psi_2(c_k), psi_i(t) = E[(t - Y_i)^+].
    mean, std: (m, 2) arrays; returns (m,).
    """
    ref = np.asarray(ref_point, dtype=float)
    mean = np.atleast_2d(mean)
    std = np.atleast_2d(std)
    a, b, c = _strips(front, ref)
    mu1, s1 = mean[:, :1], std[:, :1]
    mu2, s2 = mean[:, 1:], std[:, 1:]
    width = _expected_shortfall(b[None], mu1, s1) - _expected_shortfall(a[None], mu1, s1)
    height = _expected_shortfall(c[None], mu2, s2)
    return np.maximum(np.sum(np.maximum(width, 0.0) * height, axis=1), 0.0)


def _posterior_moments(models: Models, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    means, stds = [], []
    for model in models:
        m, v = posterior(model, X)
        means.append(m)
        stds.append(np.sqrt(v))
    return np.stack(means, axis=1), np.stack(stds, axis=1)


def ehvi_batch(models: Models, X: np.ndarray, front: ParetoFront, ref_point: Sequence[float]) -> np.ndarray:
    mean, std = _posterior_moments(models, np.atleast_2d(X))
    return ehvi_gaussian(mean, std, front, ref_point)


def ehvi(models: Models, x: np.ndarray, front: ParetoFront, ref_point: Sequence[float]) -> float:
    """Expected hypervolume improvement of a single candidate x."""
    return float(ehvi_batch(models, np.atleast_2d(x), front, ref_point)[0])


def _improvement(y: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Hypervolume improvement of points y (s, 2) over the strip decomposition."""
    width = np.maximum(b[None] - np.maximum(a[None], y[:, :1]), 0.0)
    height = np.maximum(c[None] - y[:, 1:], 0.0)
    return np.sum(width * height, axis=1)


def mc_qehvi_samples(
    models: Models,
    X_batch: np.ndarray,
    front: ParetoFront,
    ref_point: Sequence[float],
    n_samples: int,
    seed: int,
) -> np.ndarray:
    """
    Per-sample hypervolume improvement of a q-batch under joint posterior samples.

    The union over the batch is handled by inclusion-exclusion: the
    improvement jointly covered by a subset equals the improvement of the
    componentwise worst point of that subset.
    """
    X_batch = np.atleast_2d(X_batch)
    q = X_batch.shape[0]
    ref = np.asarray(ref_point, dtype=float)
    rng = np.random.default_rng(seed)

    samples = np.empty((n_samples, q, 2))
    for j, model in enumerate(models):
        mean, cov = posterior_covariance(model, X_batch)
        scale = max(float(np.max(np.diag(cov))), 1e-12)
        L = cholesky(cov + 1e-10 * scale * np.eye(q), lower=True)
        z = rng.standard_normal((n_samples, q))
        samples[:, :, j] = mean[None] + z @ L.T

    a, b, c = _strips(front, ref)
    total = np.zeros(n_samples)
    for size in range(1, q + 1):
        sign = 1.0 if size % 2 else -1.0
        for subset in itertools.combinations(range(q), size):
            worst = samples[:, list(subset), :].max(axis=1)
            total += sign * _improvement(worst, a, b, c)
    return total


def mc_qehvi(
    models: Models,
    X_batch: np.ndarray,
    front: ParetoFront,
    ref_point: Sequence[float],
    n_samples: int = 1024,
    seed: int = 0,
) -> float:
    return float(np.mean(mc_qehvi_samples(models, X_batch, front, ref_point, n_samples, seed)))


def _pattern_search(
    score: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    v0: float,
    options: AcquisitionOptions,
) -> tuple[np.ndarray, float]:
    x, v = x0.copy(), v0
    d = x.size
    step = options.initial_step
    eye = np.eye(d)
    for _ in range(options.pattern_iterations):
        neighbors = np.clip(np.vstack([x + step * eye, x - step * eye]), 0.0, 1.0)
        values = score(neighbors)
        j = int(np.argmax(values))
        if values[j] > v:
            x, v = neighbors[j], float(values[j])
        else:
            step *= 0.5
            if step < options.min_step:
                break
    return x, v


def maximize_ehvi(
    models: Models,
    front: ParetoFront,
    ref_point: Sequence[float],
    seed: int,
    options: Optional[AcquisitionOptions] = None,
) -> tuple[np.ndarray, float]:
    """
    Best point in the unit cube: quasi-random raw samples, then pattern search
    from the top candidates. Never returns worse than the best raw sample.
    """
    options = options or AcquisitionOptions()
    d = models[0].dim

    def score(X: np.ndarray) -> np.ndarray:
        return ehvi_batch(models, X, front, ref_point)

    raw = sobol_init(options.raw_samples, d, seed)
    values = score(raw)
    order = np.argsort(-values, kind="stable")[: options.top_k]
    best_x, best_v = raw[order[0]].copy(), float(values[order[0]])
    for idx in order:
        x, v = _pattern_search(score, raw[idx], float(values[idx]), options)
        if v > best_v:
            best_x, best_v = x, v
    return np.clip(best_x, 0.0, 1.0), best_v


def optimize_acquisition(
    models: Models,
    front: ParetoFront,
    ref_point: Sequence[float],
    seed: int,
    options: Optional[AcquisitionOptions] = None,
) -> Configuration:
    x, _ = maximize_ehvi(models, front, ref_point, seed, options)
    return decode(x)


def fit_models(
    X: np.ndarray,
    Y: np.ndarray,
    seed: int,
    restarts: int,
    previous: Optional[Models] = None,
) -> Models:
    """One GP per objective column, optionally warm-started from the previous fit."""
    fitted = []
    for j in range(Y.shape[1]):
        initial: Optional[KernelHyperparams] = previous[j].hyperparams if previous else None
        fitted.append(fit_map(X, Y[:, j], restarts=restarts, seed=seed + j, initial=initial))
    return fitted[0], fitted[1]


def bo_loop(
    tensor: CoverageTensor,
    thresholds: Thresholds,
    options: Optional[BoOptions] = None,
    seed: int = 0,
    on_evaluation: Optional[Callable[[EvaluationRecord], None]] = None,
) -> BoState:
    """
    Sobol design followed by n_iterations of fit -> maximize EHVI -> evaluate.
    History length is n_init + n_iterations; deterministic given (tensor, seed).
    """
    options = options or BoOptions()
    ref = np.asarray(options.ref_point, dtype=float)
    rng = np.random.default_rng(seed)
    d = dimension(tensor.n_sectors)

    state = BoState(
        history=[], models=None, front=ParetoFront(), ref_point=ref,
        budget=(options.n_init, options.n_iterations), seed=seed,
    )

    def record(config: Configuration) -> None:
        pair: ObjectivePair = evaluate(config, tensor, thresholds)
        rec = EvaluationRecord(config=config, pair=pair)
        state.history.append(rec)
        state.front = merge(state.front, rec.objectives, config)
        state.hypervolume_trace.append(hypervolume_2d(state.front, ref))
        if on_evaluation:
            on_evaluation(rec)

    for x in sobol_init(options.n_init, d, _child_seed(rng)):
        record(decode(x))
    log.info("BO design: %d points, hypervolume %.4f", options.n_init, state.hypervolume_trace[-1])

    for it in range(options.n_iterations):
        X = encode_many([r.config for r in state.history])
        Y = objective_matrix(state.history)
        restarts = options.fit_restarts if state.models is None else options.refit_restarts
        state.models = fit_models(X, Y, _child_seed(rng), restarts, state.models)
        front = non_dominated(Y, [r.config for r in state.history])
        config = optimize_acquisition(state.models, front, ref, _child_seed(rng), options.acquisition)
        record(config)
        if (it + 1) % options.log_every == 0:
            log.info("BO iteration %d/%d: hypervolume %.4f", it + 1, options.n_iterations, state.hypervolume_trace[-1])
        else:
            log.debug("BO iteration %d: %s", it + 1, state.history[-1].objectives)
    return state
