"""Synthetic RF environment and coverage tensor precomputation."""
from .models import GridSpec, LayoutConfig, SectorAntenna, SiteConfig
from .antenna import antenna_gain, path_loss
from .shadowing import shadowing_field
from .environment import EnvironmentDescription, RadioEnvironment, generate_environment
from .coverage import (
    CoverageTensor,
    apply_configuration,
    load_tensor,
    precompute_coverage,
    save_tensor,
    summed_rsrp_dbm,
    tensor_checksum,
)

__all__ = [
    "GridSpec",
    "LayoutConfig",
    "SectorAntenna",
    "SiteConfig",
    "antenna_gain",
    "path_loss",
    "shadowing_field",
    "EnvironmentDescription",
    "RadioEnvironment",
    "generate_environment",
    "CoverageTensor",
    "apply_configuration",
    "load_tensor",
    "precompute_coverage",
    "save_tensor",
    "summed_rsrp_dbm",
    "tensor_checksum",
]
