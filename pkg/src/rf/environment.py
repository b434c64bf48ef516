"""
Radio environment generation.
Resolves a site layout into sector antennas and draws the shadowing fields.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import BaseModel

from src.errors import InvalidLayoutError
from src.rf.models import (
    SECTORS_PER_SITE,
    GridSpec,
    LayoutConfig,
    SectorAntenna,
)
from src.rf.shadowing import shadowing_field

log = logging.getLogger(__name__)

ENVIRONMENT_FORMAT_VERSION = 1


class EnvironmentDescription(BaseModel):
    """JSON-serializable form of a RadioEnvironment (shadowing is re-derived from the seed)."""

    format_version: int = ENVIRONMENT_FORMAT_VERSION
    seed: int
    layout: LayoutConfig
    antennas: list[SectorAntenna]

    def write(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")

    @classmethod
    def read(cls, path: Path) -> "EnvironmentDescription":
        return cls.model_validate_json(path.read_text(encoding="utf-8"))


@dataclass(frozen=True, eq=False)
class RadioEnvironment:
    """Antennas, propagation parameters and per-sector shadowing fields."""

    layout: LayoutConfig
    antennas: tuple[SectorAntenna, ...]
    seed: int
    shadowing_db: np.ndarray  # (sectors, rows, cols)

    @property
    def grid(self) -> GridSpec:
        return self.layout.grid

    @property
    def reference_power_dbm(self) -> float:
        return self.layout.reference_power_dbm

    @property
    def n_sectors(self) -> int:
        return len(self.antennas)

    def describe(self) -> EnvironmentDescription:
        return EnvironmentDescription(
            seed=self.seed, layout=self.layout, antennas=list(self.antennas)
        )


def _check_azimuths(site_id: int, azimuths: tuple[float, ...]) -> None:
    ordered = sorted(a % 360.0 for a in azimuths)
    gaps = [
        (ordered[(k + 1) % SECTORS_PER_SITE] - ordered[k]) % 360.0
        for k in range(SECTORS_PER_SITE)
    ]
    if not all(math.isclose(g, 120.0, abs_tol=1e-6) for g in gaps):
        raise InvalidLayoutError(
            f"site {site_id}: sector azimuths {azimuths} are not 120 degrees apart"
        )


def build_antennas(layout: LayoutConfig) -> tuple[SectorAntenna, ...]:
    """Expand sites into sector antennas, validating the layout."""
    if not layout.sites:
        raise InvalidLayoutError("layout has no sites")

    for i, a in enumerate(layout.sites):
        for j in range(i + 1, len(layout.sites)):
            b = layout.sites[j]
            if math.hypot(a.x_m - b.x_m, a.y_m - b.y_m) == 0.0:
                raise InvalidLayoutError(f"sites {i} and {j} share position ({a.x_m}, {a.y_m})")

    pattern = layout.pattern
    antennas: list[SectorAntenna] = []
    for site_id, site in enumerate(layout.sites):
        if len(site.azimuths_deg) != SECTORS_PER_SITE:
            raise InvalidLayoutError(f"site {site_id} must have exactly 3 sectors")
        _check_azimuths(site_id, site.azimuths_deg)
        for azimuth in site.azimuths_deg:
            antennas.append(
                SectorAntenna(
                    site_id=site_id,
                    sector_index=len(antennas),
                    position=(site.x_m, site.y_m, site.height_m),
                    azimuth_deg=azimuth % 360.0,
                    max_gain_dbi=pattern.max_gain_dbi,
                    h_beamwidth_deg=pattern.h_beamwidth_deg,
                    v_beamwidth_deg=pattern.v_beamwidth_deg,
                    front_back_ratio_db=pattern.front_back_ratio_db,
                    sla_v_db=pattern.sla_v_db,
                )
            )
    return tuple(antennas)


def generate_environment(layout: LayoutConfig, seed: Optional[int] = None) -> RadioEnvironment:
    """
    Build a RadioEnvironment, deterministic in (layout, seed).

    Raises:
        InvalidGridError: grid extent not a multiple of the resolution
        InvalidLayoutError: overlapping sites or malformed sectors
    """
    seed = layout.seed if seed is None else seed
    rows, cols = layout.grid.shape  # validates the grid
    antennas = build_antennas(layout)

    shadowing = np.stack(
        [
            shadowing_field(
                layout.grid,
                layout.shadowing.sigma_db,
                layout.shadowing.decorrelation_m,
                seed,
                antenna.sector_index,
            )
            for antenna in antennas
        ]
    )
    shadowing.setflags(write=False)
    log.debug("Generated environment: %d sectors on %dx%d grid, seed %d", len(antennas), rows, cols, seed)
    return RadioEnvironment(layout=layout, antennas=antennas, seed=seed, shadowing_db=shadowing)


def environment_from_description(description: EnvironmentDescription) -> RadioEnvironment:
    return generate_environment(description.layout, description.seed)
