"""
Pytest fixtures for cco-bench.
"""

import numpy as np
import pytest

from src.objectives.models import Configuration, Thresholds
from src.rf.coverage import precompute_coverage
from src.rf.environment import generate_environment
from src.rf.models import GridSpec, LayoutConfig, SiteConfig


def small_layout(**overrides) -> LayoutConfig:
    """Two sites on a 400 m square at 20 m resolution (6 sectors, 20x20 cells)."""
    fields = dict(
        grid=GridSpec(width_m=400.0, height_m=400.0, resolution_m=20.0),
        sites=[
            SiteConfig(x_m=100.0, y_m=100.0, height_m=25.0, azimuths_deg=(0.0, 120.0, 240.0)),
            SiteConfig(x_m=300.0, y_m=300.0, height_m=25.0, azimuths_deg=(60.0, 180.0, 300.0)),
        ],
        seed=11,
        name="small",
    )
    fields.update(overrides)
    return LayoutConfig(**fields)


@pytest.fixture(scope="session")
def small_env():
    return generate_environment(small_layout())


@pytest.fixture(scope="session")
def small_tensor(small_env):
    return precompute_coverage(small_env)


@pytest.fixture(scope="session")
def default_env():
    """The shipped 5-site layout on the 120x120 grid."""
    return generate_environment(LayoutConfig())


@pytest.fixture(scope="session")
def default_tensor(default_env):
    return precompute_coverage(default_env, max_workers=4)


@pytest.fixture
def thresholds():
    return Thresholds()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_config(
    rng: np.random.Generator,
    n_sectors: int,
    tilts: tuple[int, ...] = tuple(range(11)),
    p_low: float = 30.0,
    p_high: float = 50.0,
) -> Configuration:
    return Configuration.from_arrays(
        rng.choice(tilts, size=n_sectors), rng.uniform(p_low, p_high, size=n_sectors)
    )
