"""
Gaussian-process regression with a Matern-5/2 ARD kernel.

Hyperparameters (lengthscales, signal variance, noise variance) are fitted by
MAP: log marginal likelihood plus log-normal priors, maximized in log space
with analytic gradients and multiple restarts. Inputs are expected in the
unit cube; outputs are standardized inside the model.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.spatial.distance import cdist

from src.errors import FactorizationError, FitError

log = logging.getLogger(__name__)

SQRT5 = math.sqrt(5.0)
LOG_2PI = math.log(2.0 * math.pi)
JITTER_LADDER = (0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)

# Box constraints for the optimizer, in log space
LOG_LENGTHSCALE_BOUNDS = (math.log(1e-3), math.log(1e3))
LOG_SIGNAL_BOUNDS = (math.log(1e-4), math.log(1e2))
LOG_NOISE_BOUNDS = (math.log(1e-9), math.log(1e1))


class KernelHyperparams(BaseModel):
    """Matern-5/2 ARD hyperparameters; all strictly positive."""

    model_config = ConfigDict(frozen=True)

    lengthscales: tuple[float, ...] = Field(min_length=1)
    signal_variance: float = Field(gt=0)
    noise_variance: float = Field(gt=0)

    @property
    def dim(self) -> int:
        return len(self.lengthscales)

    def to_log(self) -> np.ndarray:
        return np.log(np.array([*self.lengthscales, self.signal_variance, self.noise_variance]))

    @classmethod
    def from_log(cls, theta: np.ndarray) -> "KernelHyperparams":
        values = np.exp(np.asarray(theta, dtype=float))
        return cls(
            lengthscales=tuple(float(v) for v in values[:-2]),
            signal_variance=float(values[-2]),
            noise_variance=float(values[-1]),
        )


class LogNormalPrior(BaseModel):
    """Gaussian over log(value), parameterized by the median and log-std."""

    model_config = ConfigDict(frozen=True)

    median: float = Field(gt=0)
    log_std: float = Field(1.0, gt=0)


class GpPriors(BaseModel):
    model_config = ConfigDict(frozen=True)

    lengthscale: LogNormalPrior = LogNormalPrior(median=0.3)
    signal_variance: LogNormalPrior = LogNormalPrior(median=1.0)
    noise_variance: LogNormalPrior = LogNormalPrior(median=1e-3)

    def _moments(self, dim: int) -> tuple[np.ndarray, np.ndarray]:
        priors = [self.lengthscale] * dim + [self.signal_variance, self.noise_variance]
        mean = np.array([math.log(p.median) for p in priors])
        std = np.array([p.log_std for p in priors])
        return mean, std

    def log_prob(self, theta: np.ndarray) -> tuple[float, np.ndarray]:
        """Log density (up to a constant) over log-hyperparameters and its gradient."""
        mean, std = self._moments(theta.size - 2)
        z = (theta - mean) / std
        return float(-0.5 * np.sum(z**2)), -z / std

    def mode(self, dim: int) -> np.ndarray:
        return self._moments(dim)[0]

    def sample(self, dim: int, rng: np.random.Generator) -> np.ndarray:
        mean, std = self._moments(dim)
        return mean + std * rng.standard_normal(mean.size)


@dataclass(frozen=True, eq=False)
class GpModel:
    """Conditioned GP: normalized inputs, standardized outputs and the Cholesky factor."""

    X: np.ndarray  # (n, d)
    y: np.ndarray  # (n,) standardized
    y_mean: float
    y_std: float
    hyperparams: KernelHyperparams
    chol: np.ndarray  # lower factor of K + (noise + jitter) I
    alpha: np.ndarray  # (K + noise I)^-1 y
    jitter: float = 0.0

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def dim(self) -> int:
        return self.hyperparams.dim


def _scaled_sqdist(A: np.ndarray, B: np.ndarray, lengthscales: np.ndarray) -> np.ndarray:
    return cdist(A / lengthscales, B / lengthscales, "sqeuclidean")


def _matern52_from_r(r: np.ndarray, signal_variance: float) -> np.ndarray:
    return signal_variance * (1.0 + SQRT5 * r + (5.0 / 3.0) * r**2) * np.exp(-SQRT5 * r)


def matern52(x: np.ndarray, x2: np.ndarray, lengthscales: np.ndarray, signal_variance: float) -> float:
    """k = s2 (1 + sqrt5 r + 5 r^2 / 3) exp(-sqrt5 r), r the lengthscale-scaled distance."""
    diff = (np.asarray(x, dtype=float) - np.asarray(x2, dtype=float)) / np.asarray(lengthscales, dtype=float)
    r = float(np.sqrt(np.sum(diff**2)))
    return float(_matern52_from_r(np.asarray(r), signal_variance))


def matern52_matrix(
    A: np.ndarray, B: np.ndarray, lengthscales: np.ndarray, signal_variance: float
) -> np.ndarray:
    r = np.sqrt(np.maximum(_scaled_sqdist(A, B, np.asarray(lengthscales)), 0.0))
    return _matern52_from_r(r, signal_variance)


def _factorize(K: np.ndarray) -> tuple[np.ndarray, float]:
    scale = max(float(np.mean(np.diag(K))), 1.0)
    for jitter in JITTER_LADDER:
        try:
            L = cholesky(K + jitter * scale * np.eye(K.shape[0]), lower=True, check_finite=True)
            return L, jitter * scale
        except (np.linalg.LinAlgError, ValueError):
            continue
    raise FactorizationError(f"kernel matrix ({K.shape[0]}x{K.shape[0]}) not positive definite after max jitter")


def _standardize(y: np.ndarray) -> tuple[np.ndarray, float, float]:
    mean = float(np.mean(y))
    std = float(np.std(y))
    if not np.isfinite(std) or std < 1e-12:
        std = 1.0
    return (y - mean) / std, mean, std


def condition(
    X: np.ndarray,
    y: np.ndarray,
    hyperparams: KernelHyperparams,
    standardize: bool = True,
) -> GpModel:
    """Condition a GP on data with fixed hyperparameters."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.size:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.size} values")
    if X.shape[1] != hyperparams.dim:
        raise ValueError(f"X has {X.shape[1]} columns, hyperparameters have {hyperparams.dim} lengthscales")

    if standardize:
        y_std_units, y_mean, y_std = _standardize(y)
    else:
        y_std_units, y_mean, y_std = y, 0.0, 1.0

    K = matern52_matrix(X, X, np.array(hyperparams.lengthscales), hyperparams.signal_variance)
    K[np.diag_indices_from(K)] += hyperparams.noise_variance
    L, jitter = _factorize(K)
    alpha = cho_solve((L, True), y_std_units)
    return GpModel(
        X=X, y=y_std_units, y_mean=y_mean, y_std=y_std,
        hyperparams=hyperparams, chol=L, alpha=alpha, jitter=jitter,
    )


def prior_model(dim: int, hyperparams: KernelHyperparams, y_mean: float = 0.0, y_std: float = 1.0) -> GpModel:
    """A model with no observations: posterior() returns the prior."""
    if hyperparams.dim != dim:
        raise ValueError(f"expected {dim} lengthscales, got {hyperparams.dim}")
    return GpModel(
        X=np.empty((0, dim)), y=np.empty(0), y_mean=y_mean, y_std=y_std,
        hyperparams=hyperparams, chol=np.empty((0, 0)), alpha=np.empty(0),
    )


def log_marginal_likelihood(model: GpModel) -> tuple[float, np.ndarray]:
    """
    MLL of the standardized outputs and its gradient w.r.t. the log-hyperparameters
    (log lengthscales, log signal variance, log noise variance).
    """
    n = model.n
    X, y, alpha, L = model.X, model.y, model.alpha, model.chol
    hp = model.hyperparams
    ls = np.array(hp.lengthscales)

    value = -0.5 * float(y @ alpha) - float(np.sum(np.log(np.diag(L)))) - 0.5 * n * LOG_2PI

    K_inv = cho_solve((L, True), np.eye(n))
    W = np.outer(alpha, alpha) - K_inv

    r = np.sqrt(np.maximum(_scaled_sqdist(X, X, ls), 0.0))
    exp_term = np.exp(-SQRT5 * r)
    K_f = hp.signal_variance * (1.0 + SQRT5 * r + (5.0 / 3.0) * r**2) * exp_term
    # dK/dlog(l_k) = s2 (5/3) (1 + sqrt5 r) exp(-sqrt5 r) (dx_k / l_k)^2
    G = hp.signal_variance * (5.0 / 3.0) * (1.0 + SQRT5 * r) * exp_term
    M = W * G
    row_sums = M.sum(axis=1)
    quad = row_sums @ (X**2) - np.sum(X * (M @ X), axis=0)
    grad_ls = quad / ls**2

    grad_signal = 0.5 * float(np.sum(W * K_f))
    grad_noise = 0.5 * hp.noise_variance * float(np.trace(W))
    return value, np.concatenate([grad_ls, [grad_signal, grad_noise]])


def _negative_log_posterior(
    theta: np.ndarray, X: np.ndarray, y: np.ndarray, priors: GpPriors
) -> tuple[float, np.ndarray]:
    try:
        model = condition(X, y, KernelHyperparams.from_log(theta), standardize=False)
    except FactorizationError:
        return 1e25, np.zeros_like(theta)
    mll, grad = log_marginal_likelihood(model)
    lp, lp_grad = priors.log_prob(theta)
    value = -(mll + lp)
    if not np.isfinite(value):
        return 1e25, np.zeros_like(theta)
    return value, -(grad + lp_grad)


def _bounds(dim: int) -> list[tuple[float, float]]:
    return [LOG_LENGTHSCALE_BOUNDS] * dim + [LOG_SIGNAL_BOUNDS, LOG_NOISE_BOUNDS]


def fit_map(
    X: np.ndarray,
    y: np.ndarray,
    priors: Optional[GpPriors] = None,
    restarts: int = 8,
    seed: int = 0,
    initial: Optional[KernelHyperparams] = None,
    max_iter: int = 200,
    gtol: float = 1e-6,
) -> GpModel:
    """
    MAP hyperparameters by multi-start L-BFGS-B in log space.

    Starts are the warm-start `initial` (if given), the prior mode, then prior
    samples until `restarts` fresh starts have been used. Deterministic given seed.

    Raises:
        FitError: every restart failed
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] < 2:
        raise FitError(f"need at least 2 observations to fit, got {X.shape[0]}")
    priors = priors or GpPriors()
    dim = X.shape[1]
    y_std_units, y_mean, y_std = _standardize(y)

    rng = np.random.default_rng(seed)
    starts: list[np.ndarray] = []
    if initial is not None:
        starts.append(initial.to_log())
    starts.append(priors.mode(dim))
    while len(starts) < restarts + (initial is not None):
        starts.append(priors.sample(dim, rng))

    lower, upper = np.array(_bounds(dim)).T
    best_theta: Optional[np.ndarray] = None
    best_value = np.inf
    for theta0 in starts:
        theta0 = np.clip(theta0, lower, upper)
        try:
            result = minimize(
                _negative_log_posterior,
                theta0,
                args=(X, y_std_units, priors),
                jac=True,
                method="L-BFGS-B",
                bounds=_bounds(dim),
                options={"maxiter": max_iter, "gtol": gtol},
            )
        except (FactorizationError, np.linalg.LinAlgError, ValueError) as e:
            log.debug("MAP restart failed: %s", e)
            continue
        if np.isfinite(result.fun) and result.fun < best_value and result.fun < 1e24:
            best_value, best_theta = float(result.fun), result.x

    if best_theta is None:
        raise FitError(f"all {len(starts)} MAP restarts failed")

    hyperparams = KernelHyperparams.from_log(best_theta)
    log.debug("MAP fit: n=%d d=%d neg-log-posterior=%.4f", X.shape[0], dim, best_value)
    model = condition(X, y_std_units, hyperparams, standardize=False)
    return GpModel(
        X=model.X, y=model.y, y_mean=y_mean, y_std=y_std, hyperparams=hyperparams,
        chol=model.chol, alpha=model.alpha, jitter=model.jitter,
    )


def _cross_cov(model: GpModel, Xs: np.ndarray) -> np.ndarray:
    hp = model.hyperparams
    return matern52_matrix(Xs, model.X, np.array(hp.lengthscales), hp.signal_variance)


def posterior(model: GpModel, Xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Predictive mean and latent variance at Xs, in output units."""
    Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
    prior_var = model.hyperparams.signal_variance
    if model.n == 0:
        mean = np.zeros(Xs.shape[0])
        var = np.full(Xs.shape[0], prior_var)
    else:
        Ks = _cross_cov(model, Xs)
        mean = Ks @ model.alpha
        v = solve_triangular(model.chol, Ks.T, lower=True)
        var = np.maximum(prior_var - np.sum(v**2, axis=0), 0.0)
    return model.y_mean + model.y_std * mean, model.y_std**2 * var


def posterior_covariance(model: GpModel, Xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Predictive mean and full latent covariance at Xs, in output units."""
    Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
    hp = model.hyperparams
    Kss = matern52_matrix(Xs, Xs, np.array(hp.lengthscales), hp.signal_variance)
    if model.n == 0:
        mean = np.zeros(Xs.shape[0])
        cov = Kss
    else:
        Ks = _cross_cov(model, Xs)
        mean = Ks @ model.alpha
        v = solve_triangular(model.chol, Ks.T, lower=True)
        cov = Kss - v.T @ v
    cov = 0.5 * (cov + cov.T)
    return model.y_mean + model.y_std * mean, model.y_std**2 * cov
