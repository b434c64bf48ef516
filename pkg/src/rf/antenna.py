"""
Sector antenna pattern and log-distance path loss.

The pattern is the usual two-plane macro-cell sector model:
    A_H = -min(12 (phi / phi_3dB)^2, A_m)
    A_V = -min(12 ((theta - theta_tilt) / theta_3dB)^2, SLA_v)
    G   = G_max - min(-(A_H + A_V), A_m)
All functions broadcast over numpy arrays.
"""

import numpy as np
from numpy.typing import ArrayLike

from src.rf.models import PathLossParams, SectorAntenna


def wrap_angle_deg(angle_deg: ArrayLike) -> np.ndarray:
    """Map angles to [-180, 180)."""
    return (np.asarray(angle_deg, dtype=float) + 180.0) % 360.0 - 180.0


def horizontal_attenuation_db(
    az_offset_deg: ArrayLike, h_beamwidth_deg: float, front_back_ratio_db: float
) -> np.ndarray:
    phi = wrap_angle_deg(az_offset_deg)
    return -np.minimum(12.0 * (phi / h_beamwidth_deg) ** 2, front_back_ratio_db)


def vertical_attenuation_db(
    el_offset_deg: ArrayLike, downtilt_deg: float, v_beamwidth_deg: float, sla_v_db: float
) -> np.ndarray:
    theta = np.asarray(el_offset_deg, dtype=float) - downtilt_deg
    return -np.minimum(12.0 * (theta / v_beamwidth_deg) ** 2, sla_v_db)


def antenna_gain(
    antenna: SectorAntenna,
    az_offset_deg: ArrayLike,
    el_offset_deg: ArrayLike,
    downtilt_deg: float,
) -> np.ndarray:
    """
    Directional gain in dBi.

    Args:
        antenna: sector whose pattern is evaluated
        az_offset_deg: angle between boresight azimuth and the evaluation point
        el_offset_deg: angle below horizontal from the antenna to the point
        downtilt_deg: electrical tilt of the main beam

    Returns:
        gain in [max_gain - A_m, max_gain]
    """
    a_h = horizontal_attenuation_db(
        az_offset_deg, antenna.h_beamwidth_deg, antenna.front_back_ratio_db
    )
    a_v = vertical_attenuation_db(
        el_offset_deg, downtilt_deg, antenna.v_beamwidth_deg, antenna.sla_v_db
    )
    return antenna.max_gain_dbi - np.minimum(-(a_h + a_v), antenna.front_back_ratio_db)


def path_loss(d_m: ArrayLike, params: PathLossParams) -> np.ndarray:
    """Log-distance path loss in dB; distances below d_min are clamped to d_min."""
    d = np.maximum(np.asarray(d_m, dtype=float), params.d_min_m)
    return params.pl0_db + 10.0 * params.exponent * np.log10(d / params.d0_m)


def bearing_deg(dx: ArrayLike, dy: ArrayLike) -> np.ndarray:
    """Compass bearing (0 = north, clockwise) of the vector (dx east, dy north)."""
    return np.degrees(np.arctan2(dx, dy)) % 360.0
