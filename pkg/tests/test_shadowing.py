"""
Unit tests for correlated shadowing fields.
"""

import numpy as np
import pytest

from src.rf.models import GridSpec
from src.rf.shadowing import shadowing_field


def test_zero_sigma_is_zero():
    """Test sigma = 0 gives an all-zero field."""
    field = shadowing_field(GridSpec(), 0.0, 50.0, seed=1, sector_index=0)
    assert field.shape == (120, 120)
    assert np.all(field == 0.0)


def test_deterministic_per_seed_and_sector():
    """Test fields repeat for the same (seed, sector) and differ otherwise."""
    grid = GridSpec(width_m=200.0, height_m=200.0)
    a = shadowing_field(grid, 8.0, 50.0, seed=3, sector_index=2)
    b = shadowing_field(grid, 8.0, 50.0, seed=3, sector_index=2)
    c = shadowing_field(grid, 8.0, 50.0, seed=3, sector_index=3)
    d = shadowing_field(grid, 8.0, 50.0, seed=4, sector_index=2)
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)
    assert not np.allclose(a, d)


def test_invalid_parameters():
    """Test negative sigma and non-positive decorrelation distance are rejected."""
    with pytest.raises(ValueError):
        shadowing_field(GridSpec(), -1.0, 50.0, seed=0, sector_index=0)
    with pytest.raises(ValueError):
        shadowing_field(GridSpec(), 8.0, 0.0, seed=0, sector_index=0)


def test_field_statistics():
    """Test std within 10% of sigma and lag-d_corr correlation near 1/e, pooled over 5 seeds."""
    grid = GridSpec()
    sigma, d_corr = 8.0, 50.0
    lag = int(d_corr / grid.resolution_m)
    fields = [shadowing_field(grid, sigma, d_corr, seed=s, sector_index=0) for s in range(5)]

    pooled = np.concatenate([f.ravel() for f in fields])
    assert abs(pooled.std() - sigma) / sigma < 0.10

    products, squares = [], []
    for f in fields:
        f = f - f.mean()
        products.append(np.mean(f[:, :-lag] * f[:, lag:]))
        products.append(np.mean(f[:-lag, :] * f[lag:, :]))
        squares.append(np.mean(f**2))
    autocorr = np.mean(products) / np.mean(squares)
    assert abs(autocorr - np.exp(-1.0)) < 0.1
