"""Coverage objectives: attachment, interference, sigmoid sums and scalarization."""
from .models import (
    AttachmentGrid,
    Configuration,
    CoverageClass,
    ObjectivePair,
    SectorSetting,
    Thresholds,
)
from .coverage import (
    attach,
    coverage_classes,
    coverage_percentages,
    evaluate,
    interference_db,
    linear_utility,
    over_coverage,
    scalarize,
    under_coverage,
)

__all__ = [
    "AttachmentGrid",
    "Configuration",
    "CoverageClass",
    "ObjectivePair",
    "SectorSetting",
    "Thresholds",
    "attach",
    "coverage_classes",
    "coverage_percentages",
    "evaluate",
    "interference_db",
    "linear_utility",
    "over_coverage",
    "scalarize",
    "under_coverage",
]
