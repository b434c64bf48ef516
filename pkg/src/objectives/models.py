"""
Pydantic models for coverage objectives.
Configuration vector, thresholds, attachment grid and the objective pair.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.rf.models import POWER_MAX_DBM, POWER_MIN_DBM

DOWNTILT_MIN_DEG = 0
DOWNTILT_MAX_DEG = 10
N_SECTORS = 15


class SectorSetting(BaseModel):
    """a_i = [d_i, p_i] for one sector."""

    model_config = ConfigDict(frozen=True)

    downtilt: int = Field(ge=DOWNTILT_MIN_DEG, le=DOWNTILT_MAX_DEG)
    power_dbm: float = Field(ge=POWER_MIN_DBM, le=POWER_MAX_DBM)


class Configuration(BaseModel):
    """Joint per-sector setting x = [a_1, ..., a_N]; the optimization variable."""

    model_config = ConfigDict(frozen=True)

    settings: tuple[SectorSetting, ...] = Field(min_length=1)

    @classmethod
    def from_arrays(cls, downtilts: Iterable[int], powers_dbm: Iterable[float]) -> "Configuration":
        return cls(
            settings=tuple(
                SectorSetting(downtilt=int(t), power_dbm=float(p))
                for t, p in zip(downtilts, powers_dbm, strict=True)
            )
        )

    @classmethod
    def uniform(cls, downtilt: int, power_dbm: float, n_sectors: int = N_SECTORS) -> "Configuration":
        return cls.from_arrays([downtilt] * n_sectors, [power_dbm] * n_sectors)

    @property
    def n_sectors(self) -> int:
        return len(self.settings)

    @property
    def downtilts(self) -> np.ndarray:
        return np.array([s.downtilt for s in self.settings], dtype=int)

    @property
    def powers_dbm(self) -> np.ndarray:
        return np.array([s.power_dbm for s in self.settings], dtype=float)


class Thresholds(BaseModel):
    """Weak-coverage and over-coverage thresholds plus the sigmoid temperature."""

    model_config = ConfigDict(frozen=True)

    gamma_w_dbm: float = -110.0
    gamma_o_db: float = 6.0
    sigmoid_temperature_db: float = Field(1.0, gt=0)


class CoverageClass(IntEnum):
    """Hard per-cell classification used for percentages and rasters."""

    UNDER = 0
    COVERED = 1
    OVER = 2


@dataclass(frozen=True, eq=False)
class AttachmentGrid:
    """Serving sector per cell (lowest index wins ties) and its RSRP."""

    serving: np.ndarray
    serving_rsrp_dbm: np.ndarray

    @property
    def cell_count(self) -> int:
        return int(self.serving.size)


class ObjectivePair(BaseModel):
    """Sigmoid-sum objectives (both minimized) and hard-threshold fractions."""

    model_config = ConfigDict(frozen=True)

    under_cov: float = Field(ge=0)
    over_cov: float = Field(ge=0)
    under_pct: float = Field(ge=0, le=1)
    over_pct: float = Field(ge=0, le=1)
    cell_count: int = Field(gt=0)

    def normalized(self) -> tuple[float, float]:
        """Objectives divided by the cell count, each in [0, 1]."""
        return self.under_cov / self.cell_count, self.over_cov / self.cell_count
