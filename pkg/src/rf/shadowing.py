"""
Spatially correlated log-normal shadowing.

Each sector gets an independent zero-mean Gaussian field (in dB). The field is
built by running a stationary AR(1) recursion over white noise along the rows
and then along the columns:
    S[k] = rho S[k-1] + sqrt(1 - rho^2) z[k],   rho = exp(-resolution / d_corr)
which gives a separable covariance sigma^2 rho^|di| rho^|dj|, i.e. exactly
exp(-d / d_corr) along either grid axis.
"""

import numpy as np
from scipy.signal import lfilter

from src.rf.models import GridSpec

_SEED_MASK = (1 << 64) - 1


def sector_rng(seed: int, sector_index: int) -> np.random.Generator:
    """Independent, reproducible stream per (environment seed, sector)."""
    return np.random.default_rng(np.random.SeedSequence([seed & _SEED_MASK, sector_index]))


def _ar1_filter(noise: np.ndarray, rho: float, axis: int) -> np.ndarray:
    innovation = np.sqrt(1.0 - rho**2)
    x = np.array(noise, dtype=float, copy=True)
    first = [slice(None)] * x.ndim
    first[axis] = 0
    # Start in the stationary distribution: y[0] = z[0]
    x[tuple(first)] /= innovation
    return lfilter([innovation], [1.0, -rho], x, axis=axis)


def shadowing_field(
    grid: GridSpec,
    sigma_db: float,
    decorrelation_m: float,
    seed: int,
    sector_index: int,
) -> np.ndarray:
    """Shadowing in dB on the (rows, cols) grid for one sector."""
    if sigma_db < 0:
        raise ValueError(f"sigma_db must be non-negative, got {sigma_db}")
    if decorrelation_m <= 0:
        raise ValueError(f"decorrelation_m must be positive, got {decorrelation_m}")

    shape = grid.shape
    if sigma_db == 0:
        return np.zeros(shape)

    rho = float(np.exp(-grid.resolution_m / decorrelation_m))
    white = sector_rng(seed, sector_index).standard_normal(shape)
    field = _ar1_filter(_ar1_filter(white, rho, axis=0), rho, axis=1)
    return sigma_db * field
