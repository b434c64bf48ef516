"""
Unit-cube encoding of configurations.

x = [d_1/10, ..., d_N/10, (p_1-30)/20, ..., (p_N-30)/20] in [0, 1]^(2N).
Downtilt stays continuous for the surrogate and is rounded half-up on decode.
"""

import numpy as np

from src.objectives.models import DOWNTILT_MAX_DEG, DOWNTILT_MIN_DEG, Configuration
from src.rf.models import POWER_MAX_DBM, POWER_MIN_DBM

TILT_SPAN_DEG = DOWNTILT_MAX_DEG - DOWNTILT_MIN_DEG
POWER_SPAN_DB = POWER_MAX_DBM - POWER_MIN_DBM


def encode(config: Configuration) -> np.ndarray:
    tilts = (config.downtilts - DOWNTILT_MIN_DEG) / TILT_SPAN_DEG
    powers = (config.powers_dbm - POWER_MIN_DBM) / POWER_SPAN_DB
    return np.concatenate([tilts, powers])


def encode_many(configs: list[Configuration]) -> np.ndarray:
    return np.stack([encode(c) for c in configs])


def decode(x: np.ndarray) -> Configuration:
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    if x.ndim != 1 or x.size % 2:
        raise ValueError(f"encoded configuration must be a flat even-length vector, got shape {x.shape}")
    n = x.size // 2
    tilts = np.floor(DOWNTILT_MIN_DEG + x[:n] * TILT_SPAN_DEG + 0.5).astype(int)
    powers = POWER_MIN_DBM + x[n:] * POWER_SPAN_DB
    return Configuration.from_arrays(tilts, powers)


def dimension(n_sectors: int) -> int:
    return 2 * n_sectors
