"""
Pydantic models for the synthetic radio environment.
Grid, antenna hardware, propagation parameters and the site layout.
"""

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.errors import InvalidGridError

SECTORS_PER_SITE = 3
POWER_MIN_DBM = 30.0
POWER_MAX_DBM = 50.0
INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class GridSpec(BaseModel):
    """Square-cell raster covering the network site."""

    model_config = ConfigDict(frozen=True)

    width_m: float = Field(1200.0, gt=0)
    height_m: float = Field(1200.0, gt=0)
    resolution_m: float = Field(10.0, gt=0)

    @staticmethod
    def _exact_count(extent: float, resolution: float, name: str) -> int:
        count = extent / resolution
        rounded = round(count)
        if rounded < 1 or not math.isclose(count, rounded, rel_tol=0.0, abs_tol=1e-9):
            raise InvalidGridError(
                f"{name} {extent} m is not a positive multiple of resolution {resolution} m"
            )
        return int(rounded)

    @property
    def rows(self) -> int:
        return self._exact_count(self.height_m, self.resolution_m, "height")

    @property
    def cols(self) -> int:
        return self._exact_count(self.width_m, self.resolution_m, "width")

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def cell_count(self) -> int:
        return self.rows * self.cols

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """
        Cell-center coordinates as two (rows, cols) arrays.

        Row 0 is the northern edge so rasters render with north up.
        """
        rows, cols = self.shape
        x = (np.arange(cols) + 0.5) * self.resolution_m
        y = self.height_m - (np.arange(rows) + 0.5) * self.resolution_m
        return np.meshgrid(x, y)


class AntennaPattern(BaseModel):
    """Two-plane sector pattern parameters shared by every antenna."""

    model_config = ConfigDict(frozen=True)

    max_gain_dbi: float = 15.0
    h_beamwidth_deg: float = Field(65.0, gt=0)
    v_beamwidth_deg: float = Field(10.0, gt=0)
    front_back_ratio_db: float = Field(30.0, gt=0)  # A_m
    sla_v_db: float = Field(30.0, gt=0)


class PathLossParams(BaseModel):
    """Log-distance path loss: PL = pl0 + 10 n log10(d / d0)."""

    model_config = ConfigDict(frozen=True)

    pl0_db: float = 32.4
    exponent: float = Field(3.76, gt=0)
    d0_m: float = Field(1.0, gt=0)
    d_min_m: float = Field(10.0, gt=0)


class ShadowingParams(BaseModel):
    """Log-normal shadowing with exponential spatial autocorrelation."""

    model_config = ConfigDict(frozen=True)

    sigma_db: float = Field(8.0, ge=0)
    decorrelation_m: float = Field(50.0, gt=0)


class SiteConfig(BaseModel):
    """One base station: ground position, mast height and three sector azimuths."""

    model_config = ConfigDict(frozen=True)

    x_m: float
    y_m: float
    height_m: float = Field(gt=0)
    azimuths_deg: tuple[float, float, float] = (0.0, 120.0, 240.0)


class SectorAntenna(BaseModel):
    """A single sector antenna, fully resolved from its site and the shared pattern."""

    model_config = ConfigDict(frozen=True)

    site_id: int = Field(ge=0)
    sector_index: int = Field(ge=0)
    position: tuple[float, float, float]
    azimuth_deg: float = Field(ge=0, lt=360)
    max_gain_dbi: float
    h_beamwidth_deg: float = Field(gt=0)
    v_beamwidth_deg: float = Field(gt=0)
    front_back_ratio_db: float = Field(gt=0)
    sla_v_db: float = Field(gt=0)

    @property
    def height_m(self) -> float:
        return self.position[2]


def default_sites() -> list[SiteConfig]:
    """
    Four corner sites at 25-30 m and a low 20 m site in the upper-right quadrant.
    """
    return [
        SiteConfig(x_m=200.0, y_m=200.0, height_m=25.0, azimuths_deg=(30.0, 150.0, 270.0)),
        SiteConfig(x_m=1000.0, y_m=200.0, height_m=28.0, azimuths_deg=(0.0, 120.0, 240.0)),
        SiteConfig(x_m=200.0, y_m=1000.0, height_m=30.0, azimuths_deg=(60.0, 180.0, 300.0)),
        SiteConfig(x_m=1000.0, y_m=1000.0, height_m=26.0, azimuths_deg=(90.0, 210.0, 330.0)),
        SiteConfig(x_m=760.0, y_m=720.0, height_m=20.0, azimuths_deg=(15.0, 135.0, 255.0)),
    ]


class LayoutConfig(BaseModel):
    """Everything that determines a RadioEnvironment apart from the seed."""

    grid: GridSpec = Field(default_factory=GridSpec)
    sites: list[SiteConfig] = Field(default_factory=default_sites)
    pattern: AntennaPattern = Field(default_factory=AntennaPattern)
    pathloss: PathLossParams = Field(default_factory=PathLossParams)
    shadowing: ShadowingParams = Field(default_factory=ShadowingParams)

    downtilts_deg: tuple[int, ...] = tuple(range(11))
    reference_power_dbm: float = 40.0
    # Per-subcarrier share of the carrier power (20 MHz, 1200 subcarriers)
    resource_element_offset_db: float = -10.0 * math.log10(1200.0)
    rx_height_m: float = Field(1.5, ge=0)

    seed: int = Field(7, ge=INT64_MIN, le=INT64_MAX)
    name: Optional[str] = None
