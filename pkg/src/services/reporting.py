"""
Report generation: frontier comparison, sample-efficiency curves and
coverage-classification rasters.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.image as mpimg  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from src.objectives.coverage import attach, coverage_classes  # noqa: E402
from src.objectives.models import Configuration, CoverageClass, Thresholds  # noqa: E402
from src.optim.pareto import FrontierComparison, ParetoFront, compare_frontiers, cumulative_hypervolume  # noqa: E402
from src.rf.coverage import CoverageTensor, apply_configuration, summed_rsrp_dbm  # noqa: E402
from src.rf.models import POWER_MAX_DBM, POWER_MIN_DBM  # noqa: E402
from src.services.history import FLOAT_FORMAT, MethodHistory  # noqa: E402

log = logging.getLogger(__name__)

# Gray levels per class: under black, covered gray, over white
CLASS_LEVELS = {
    CoverageClass.UNDER: 0.0,
    CoverageClass.COVERED: 0.5,
    CoverageClass.OVER: 1.0,
}


@dataclass
class Report:
    comparison: Optional[FrontierComparison]
    sample_efficiency_path: Path
    comparison_path: Optional[Path] = None
    rasters: list[Path] = field(default_factory=list)


def unique_names(histories: Sequence[MethodHistory]) -> list[str]:
    """Method names, suffixed with the file stem when two histories share one."""
    names = [h.method for h in histories]
    out = []
    for h in histories:
        if names.count(h.method) > 1:
            stem = h.path.stem if h.path is not None else str(len(out))
            out.append(f"{h.method}:{stem}")
        else:
            out.append(h.method)
    if len(set(out)) < len(out):
        out = [f"{name}#{k}" for k, name in enumerate(out)]
    return out


def compare_histories(
    histories: Sequence[MethodHistory], ref_point: Sequence[float]
) -> Optional[FrontierComparison]:
    """None with fewer than two histories."""
    if len(histories) < 2:
        return None
    names = unique_names(histories)
    fronts = {name: h.front() for name, h in zip(names, histories)}
    evaluations = {name: len(h) for name, h in zip(names, histories)}
    return compare_frontiers(fronts, ref_point, evaluations)


def sample_efficiency_frame(
    histories: Sequence[MethodHistory], ref_point: Sequence[float]
) -> pd.DataFrame:
    """Long-format hypervolume after each evaluation, recomputed from the objectives."""
    frames = []
    for name, h in zip(unique_names(histories), histories):
        hv = cumulative_hypervolume(h.points, ref_point)
        frames.append(
            pd.DataFrame({"method": name, "evaluations": np.arange(1, len(hv) + 1), "hypervolume": hv})
        )
    return pd.concat(frames, ignore_index=True)


def best_for_lambda(front: ParetoFront, lam: float) -> Configuration:
    """Front configuration with the smallest lam * under + (1 - lam) * over."""
    if front.is_empty:
        raise ValueError("empty front")
    scores = lam * front.points[:, 0] + (1.0 - lam) * front.points[:, 1]
    config = front.configs[int(np.argmin(scores))]
    if config is None:
        raise ValueError("front point has no configuration")
    return config


def class_image(classes: np.ndarray) -> np.ndarray:
    image = np.empty(classes.shape, dtype=float)
    for cls, level in CLASS_LEVELS.items():
        image[classes == cls] = level
    return image


def render_classes(path: Path, tensor: CoverageTensor, config: Configuration, thresholds: Thresholds) -> Path:
    """Lossless grayscale PNG, row 0 at the north edge."""
    stack = apply_configuration(tensor, config)
    classes = coverage_classes(stack, attach(stack), thresholds)
    path.parent.mkdir(parents=True, exist_ok=True)
    mpimg.imsave(path, class_image(classes), cmap="gray", vmin=0.0, vmax=1.0, format="png")
    return path


def render_rsrp(path: Path, tensor: CoverageTensor, config: Configuration) -> Path:
    summed = summed_rsrp_dbm(apply_configuration(tensor, config))
    path.parent.mkdir(parents=True, exist_ok=True)
    mpimg.imsave(path, summed, cmap="viridis", format="png")
    return path


def write_report(
    histories: Sequence[MethodHistory],
    out_dir: Path,
    ref_point: Sequence[float],
    tensor: Optional[CoverageTensor] = None,
    thresholds: Optional[Thresholds] = None,
    lam: float = 0.6,
) -> Report:
    if not histories:
        raise ValueError("report needs at least one history")
    out_dir.mkdir(parents=True, exist_ok=True)

    efficiency_path = out_dir / "sample_efficiency.csv"
    sample_efficiency_frame(histories, ref_point).to_csv(
        efficiency_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
    )
    report = Report(comparison=compare_histories(histories, ref_point), sample_efficiency_path=efficiency_path)
    if report.comparison is not None:
        report.comparison_path = out_dir / "comparison.json"
        report.comparison_path.write_text(report.comparison.model_dump_json(indent=2) + "\n", encoding="utf-8")

    if tensor is not None:
        thresholds = thresholds or Thresholds()
        n = tensor.n_sectors
        tilt = tensor.downtilts_deg[0]
        for label, power in (("min_power", POWER_MIN_DBM), ("max_power", POWER_MAX_DBM)):
            config = Configuration.uniform(tilt, power, n)
            report.rasters.append(render_classes(out_dir / f"classes_{label}.png", tensor, config, thresholds))
        for name, h in zip(unique_names(histories), histories):
            config = best_for_lambda(h.front(), lam)
            safe = name.replace(":", "_").replace("#", "_")
            report.rasters.append(render_classes(out_dir / f"classes_{safe}.png", tensor, config, thresholds))
            report.rasters.append(render_rsrp(out_dir / f"rsrp_{safe}.png", tensor, config))
        log.info("Rendered %d rasters (lambda=%.2f)", len(report.rasters), lam)
    return report
