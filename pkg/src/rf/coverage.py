"""
Coverage tensor: per-sector, per-downtilt RSRP maps at reference power.

Binary file layout (little-endian):
    header  '<8sHIIIIqdddd'
            magic b"CCOTNSR\\0", version, sectors, downtilts, rows, cols,
            seed, reference power (dBm), width (m), height (m), resolution (m)
    tilts   downtilts x int32
    payload sectors x downtilts x rows x cols float32, row-major
"""

import hashlib
import logging
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import logsumexp

from src.errors import InvalidConfigurationError, TensorFormatError
from src.rf.antenna import antenna_gain, bearing_deg, path_loss, wrap_angle_deg
from src.rf.environment import RadioEnvironment
from src.rf.models import POWER_MAX_DBM, POWER_MIN_DBM, GridSpec

if TYPE_CHECKING:
    from src.objectives.models import Configuration

log = logging.getLogger(__name__)

TENSOR_MAGIC = b"CCOTNSR\0"
TENSOR_VERSION = 1
_HEADER = struct.Struct("<8sHIIIIqdddd")
_LN10_OVER_10 = np.log(10.0) / 10.0


@dataclass(frozen=True, eq=False)
class CoverageTensor:
    """RSRP in dBm indexed [sector, downtilt index, row, col] at reference power."""

    rsrp_dbm: np.ndarray
    seed: int
    grid: GridSpec
    downtilts_deg: tuple[int, ...]
    reference_power_dbm: float

    @property
    def n_sectors(self) -> int:
        return int(self.rsrp_dbm.shape[0])

    @property
    def cell_count(self) -> int:
        return int(self.rsrp_dbm.shape[2] * self.rsrp_dbm.shape[3])

    def tilt_indices(self, downtilts: np.ndarray) -> np.ndarray:
        lookup = {tilt: k for k, tilt in enumerate(self.downtilts_deg)}
        try:
            return np.array([lookup[int(t)] for t in downtilts], dtype=np.intp)
        except KeyError as e:
            raise InvalidConfigurationError(
                f"downtilt {e.args[0]} not in tensor set {self.downtilts_deg}"
            ) from None


def _sector_geometry(env: RadioEnvironment, sector: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Horizontal distance, azimuth offset and elevation (below horizontal) per cell."""
    antenna = env.antennas[sector]
    x, y = env.grid.cell_centers()
    ax, ay, az = antenna.position
    dx, dy = x - ax, y - ay
    d_h = np.hypot(dx, dy)
    az_offset = wrap_angle_deg(bearing_deg(dx, dy) - antenna.azimuth_deg)
    elevation = np.degrees(np.arctan2(az - env.layout.rx_height_m, d_h))
    return d_h, az_offset, elevation


def _sector_maps(env: RadioEnvironment, sector: int) -> np.ndarray:
    antenna = env.antennas[sector]
    layout = env.layout
    d_h, az_offset, elevation = _sector_geometry(env, sector)
    d_3d = np.hypot(d_h, antenna.height_m - layout.rx_height_m)
    base = (
        layout.reference_power_dbm
        + layout.resource_element_offset_db
        - path_loss(d_3d, layout.pathloss)
        + env.shadowing_db[sector]
    )
    return np.stack(
        [base + antenna_gain(antenna, az_offset, elevation, tilt) for tilt in layout.downtilts_deg]
    )


def precompute_coverage(env: RadioEnvironment, max_workers: int = 1) -> CoverageTensor:
    """
    rsrp = reference power + RE offset + antenna gain - path loss + shadowing,
    for every (sector, downtilt, cell). Sectors are independent and may be
    computed on a thread pool; the result does not depend on max_workers.
    """
    rows, cols = env.grid.shape
    tilts = env.layout.downtilts_deg
    rsrp = np.empty((env.n_sectors, len(tilts), rows, cols))

    def fill(sector: int) -> None:
        rsrp[sector] = _sector_maps(env, sector)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            list(pool.map(fill, range(env.n_sectors)))
    else:
        for sector in range(env.n_sectors):
            fill(sector)

    rsrp.setflags(write=False)
    log.info("Precomputed %d coverage maps on %dx%d grid", env.n_sectors * len(tilts), rows, cols)
    return CoverageTensor(
        rsrp_dbm=rsrp,
        seed=env.seed,
        grid=env.grid,
        downtilts_deg=tuple(tilts),
        reference_power_dbm=env.reference_power_dbm,
    )


def apply_configuration(tensor: CoverageTensor, config: "Configuration") -> np.ndarray:
    """
    Per-sector RSRP maps for a configuration: tensor[i, tilt_i] + (p_i - reference).

    Returns a new (sectors, rows, cols) array; the tensor is not modified.
    """
    downtilts = config.downtilts
    powers = config.powers_dbm
    if len(downtilts) != tensor.n_sectors:
        raise InvalidConfigurationError(
            f"configuration has {len(downtilts)} sectors, tensor has {tensor.n_sectors}"
        )
    if np.any(powers < POWER_MIN_DBM) or np.any(powers > POWER_MAX_DBM) or not np.all(np.isfinite(powers)):
        raise InvalidConfigurationError(
            f"transmit powers must lie in [{POWER_MIN_DBM}, {POWER_MAX_DBM}] dBm"
        )
    tilt_idx = tensor.tilt_indices(downtilts)
    offsets = (powers - tensor.reference_power_dbm)[:, None, None]
    return tensor.rsrp_dbm[np.arange(tensor.n_sectors), tilt_idx] + offsets


def summed_rsrp_dbm(maps: np.ndarray) -> np.ndarray:
    """Linear-power sum over the sector axis, back in dBm."""
    return logsumexp(np.asarray(maps) * _LN10_OVER_10, axis=0) / _LN10_OVER_10


def save_tensor(tensor: CoverageTensor, path: Path) -> None:
    n_sectors, n_tilts, rows, cols = tensor.rsrp_dbm.shape
    header = _HEADER.pack(
        TENSOR_MAGIC,
        TENSOR_VERSION,
        n_sectors,
        n_tilts,
        rows,
        cols,
        tensor.seed,
        tensor.reference_power_dbm,
        tensor.grid.width_m,
        tensor.grid.height_m,
        tensor.grid.resolution_m,
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.asarray(tensor.downtilts_deg, dtype="<i4").tobytes())
        f.write(np.ascontiguousarray(tensor.rsrp_dbm, dtype="<f4").tobytes())


def load_tensor(path: Path) -> CoverageTensor:
    """Read a tensor file; the header length check rejects truncated files."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise TensorFormatError(f"{path}: file shorter than the {_HEADER.size}-byte header")

    (magic, version, n_sectors, n_tilts, rows, cols, seed, ref_power, width, height, res) = (
        _HEADER.unpack_from(data)
    )
    if magic != TENSOR_MAGIC:
        raise TensorFormatError(f"{path}: not a coverage tensor file")
    if version != TENSOR_VERSION:
        raise TensorFormatError(f"{path}: unsupported tensor version {version}")

    n_values = n_sectors * n_tilts * rows * cols
    expected = _HEADER.size + 4 * n_tilts + 4 * n_values
    if len(data) != expected:
        raise TensorFormatError(
            f"{path}: expected {expected} bytes for {n_sectors}x{n_tilts}x{rows}x{cols}, got {len(data)}"
        )

    offset = _HEADER.size
    tilts = np.frombuffer(data, dtype="<i4", count=n_tilts, offset=offset)
    offset += 4 * n_tilts
    payload = np.frombuffer(data, dtype="<f4", count=n_values, offset=offset)
    rsrp = payload.astype(np.float64).reshape(n_sectors, n_tilts, rows, cols)
    rsrp.setflags(write=False)
    return CoverageTensor(
        rsrp_dbm=rsrp,
        seed=seed,
        grid=GridSpec(width_m=width, height_m=height, resolution_m=res),
        downtilts_deg=tuple(int(t) for t in tilts),
        reference_power_dbm=ref_power,
    )


def tensor_checksum(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
