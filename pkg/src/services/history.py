"""
History and front CSV files.

One history row per black-box evaluation, shared by every method:
iteration, method, lambda, tilt_1..tilt_N, power_1..power_N,
under_cov, over_cov, under_pct, over_pct, hypervolume.
under_cov/over_cov are divided by the cell count; lambda is empty for
methods without one; hypervolume is that of the running front.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError

from src.errors import HistoryFormatError
from src.objectives.models import DOWNTILT_MAX_DEG, DOWNTILT_MIN_DEG, Configuration
from src.optim.pareto import ParetoFront, cumulative_hypervolume, non_dominated
from src.optim.records import EvaluationRecord, objective_matrix
from src.rf.models import POWER_MAX_DBM, POWER_MIN_DBM

OBJECTIVE_COLUMNS = ["under_cov", "over_cov", "under_pct", "over_pct"]
FLOAT_FORMAT = "%.10g"


def config_columns(n_sectors: int) -> list[str]:
    return [f"tilt_{i}" for i in range(1, n_sectors + 1)] + [
        f"power_{i}" for i in range(1, n_sectors + 1)
    ]


def history_columns(n_sectors: int) -> list[str]:
    return ["iteration", "method", "lambda", *config_columns(n_sectors), *OBJECTIVE_COLUMNS, "hypervolume"]


class HistoryRow(BaseModel):
    iteration: int = Field(ge=1)
    method: str = Field(min_length=1)
    lam: Optional[float] = Field(None, ge=0, le=1)
    downtilts: list[Annotated[int, Field(ge=DOWNTILT_MIN_DEG, le=DOWNTILT_MAX_DEG)]]
    powers_dbm: list[Annotated[float, Field(ge=POWER_MIN_DBM, le=POWER_MAX_DBM)]]
    under_cov: float = Field(ge=0, le=1)
    over_cov: float = Field(ge=0, le=1)
    under_pct: float = Field(ge=0, le=1)
    over_pct: float = Field(ge=0, le=1)
    hypervolume: float = Field(ge=0)

    def configuration(self) -> Configuration:
        return Configuration.from_arrays(self.downtilts, self.powers_dbm)


@dataclass
class MethodHistory:
    """Parsed history file of one method."""

    method: str
    rows: list[HistoryRow]
    path: Optional[Path] = None

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def points(self) -> np.ndarray:
        return np.array([[r.under_cov, r.over_cov] for r in self.rows], dtype=float).reshape(-1, 2)

    @property
    def hypervolumes(self) -> np.ndarray:
        return np.array([r.hypervolume for r in self.rows], dtype=float)

    def configurations(self) -> list[Configuration]:
        return [r.configuration() for r in self.rows]

    def front(self) -> ParetoFront:
        return non_dominated(self.points, self.configurations())


def history_frame(
    records: Sequence[EvaluationRecord], method: str, ref_point: Sequence[float]
) -> pd.DataFrame:
    if not records:
        raise ValueError("no evaluations to write")
    n = records[0].config.n_sectors
    points = objective_matrix(list(records))
    hv = cumulative_hypervolume(points, ref_point)
    data: dict[str, list[object]] = {
        "iteration": list(range(1, len(records) + 1)),
        "method": [method] * len(records),
        "lambda": [r.lam for r in records],
    }
    tilts = np.array([r.config.downtilts for r in records])
    powers = np.array([r.config.powers_dbm for r in records])
    for i in range(n):
        data[f"tilt_{i + 1}"] = tilts[:, i].tolist()
    for i in range(n):
        data[f"power_{i + 1}"] = powers[:, i].tolist()
    data["under_cov"] = points[:, 0].tolist()
    data["over_cov"] = points[:, 1].tolist()
    data["under_pct"] = [r.pair.under_pct for r in records]
    data["over_pct"] = [r.pair.over_pct for r in records]
    data["hypervolume"] = hv.tolist()
    return pd.DataFrame(data, columns=history_columns(n))


def write_history(
    path: Path, records: Sequence[EvaluationRecord], method: str, ref_point: Sequence[float]
) -> pd.DataFrame:
    frame = history_frame(records, method, ref_point)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return frame


def _n_sectors(columns: Sequence[str]) -> int:
    return sum(1 for c in columns if c.startswith("tilt_"))


def _column_name(loc: tuple[int | str, ...]) -> str:
    """Model field location -> CSV column (downtilts.0 -> tilt_1)."""
    prefixes = {"downtilts": "tilt", "powers_dbm": "power", "lam": "lambda"}
    if len(loc) == 2 and loc[0] in prefixes and isinstance(loc[1], int):
        return f"{prefixes[str(loc[0])]}_{loc[1] + 1}"
    if loc and loc[0] in prefixes:
        return prefixes[str(loc[0])]
    return ".".join(str(p) for p in loc)


def read_history(path: Path) -> MethodHistory:
    """
    Parse a history CSV.

    Raises:
        HistoryFormatError: missing columns or unparsable rows; diagnostics
            name every bad row (1-based, header excluded)
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except FileNotFoundError:
        raise HistoryFormatError(f"history file not found: {path}") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise HistoryFormatError(f"{path}: {e}") from e

    n = _n_sectors(frame.columns)
    missing = [c for c in history_columns(max(n, 1)) if c not in frame.columns]
    if missing:
        raise HistoryFormatError(f"{path}: missing columns {', '.join(missing)}")

    rows: list[HistoryRow] = []
    diagnostics: list[str] = []
    for k, raw in enumerate(frame.to_dict(orient="records"), start=1):
        try:
            rows.append(
                HistoryRow(
                    iteration=raw["iteration"],
                    method=raw["method"],
                    lam=raw["lambda"] or None,
                    downtilts=[raw[f"tilt_{i}"] for i in range(1, n + 1)],
                    powers_dbm=[raw[f"power_{i}"] for i in range(1, n + 1)],
                    under_cov=raw["under_cov"],
                    over_cov=raw["over_cov"],
                    under_pct=raw["under_pct"],
                    over_pct=raw["over_pct"],
                    hypervolume=raw["hypervolume"],
                )
            )
        except ValidationError as e:
            err = e.errors()[0]
            field = _column_name(err["loc"])
            diagnostics.append(f"row {k}: {field}: {err['msg']}")

    if diagnostics:
        raise HistoryFormatError(f"{path}: {len(diagnostics)} malformed row(s)", diagnostics)
    if not rows:
        raise HistoryFormatError(f"{path}: no rows")
    methods = sorted({r.method for r in rows})
    if len(methods) > 1:
        raise HistoryFormatError(f"{path}: mixes methods {', '.join(methods)}")
    return MethodHistory(method=methods[0], rows=rows, path=path)


def write_front(path: Path, front: ParetoFront, method: str) -> pd.DataFrame:
    """Final non-dominated set, one row per point, sorted by under_cov."""
    configs = [c for c in front.configs if c is not None]
    if len(configs) != len(front):
        raise ValueError("every front point needs its configuration")
    n = configs[0].n_sectors if configs else 0
    data: dict[str, list[object]] = {"method": [method] * len(front)}
    for i in range(n):
        data[f"tilt_{i + 1}"] = [int(c.downtilts[i]) for c in configs]
    for i in range(n):
        data[f"power_{i + 1}"] = [float(c.powers_dbm[i]) for c in configs]
    data["under_cov"] = front.points[:, 0].tolist()
    data["over_cov"] = front.points[:, 1].tolist()
    frame = pd.DataFrame(data, columns=["method", *config_columns(n), "under_cov", "over_cov"])
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return frame
