"""Hold-out evaluation of the hierarchical model against group-mean baselines."""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from src.errors import ConfigError, DataError
from src.localfit import Centering, evaluate_curve, fit_series
from src.schema import DAY_NAMES, GROUPINGS, BinnedSeries, CoefficientRecord

logger = logging.getLogger("hiercast.eval")

PLOT_KINDS = ("daily_fit", "boxplot_by_group", "pred_vs_actual")


@dataclass(frozen=True)
class SplitAssignment:
    seed: int
    labels: Dict[Tuple, str]

    def train(self, records: Iterable[CoefficientRecord]) -> List[CoefficientRecord]:
        return [r for r in records if self.labels[r.key] == "train"]

    def test(self, records: Iterable[CoefficientRecord]) -> List[CoefficientRecord]:
        return [r for r in records if self.labels[r.key] == "test"]

    @property
    def train_fraction(self) -> float:
        return sum(v == "train" for v in self.labels.values()) / len(self.labels)


def _coin(seed: int, location: int, ordinal: int) -> bool:
    word = np.random.SeedSequence([seed, location, ordinal]).generate_state(1)[0]
    return bool(word & 1)


def split(records: Sequence[CoefficientRecord], seed: int) -> SplitAssignment:
    """Independent fair coin per record, keyed on (location, calendar day)."""
    if not records:
        raise DataError("Cannot split an empty coefficient dataset")
    labels = {r.key: "train" if _coin(seed, r.location_number, r.calendar_day.toordinal()) else "test" for r in records}
    assignment = SplitAssignment(seed=seed, labels=labels)
    logger.info(f"Split {len(labels)} records: train fraction {assignment.train_fraction:.3f}")
    return assignment


def _effect_label(grouping: str, group_id) -> Tuple[str, str]:
    if grouping == "location":
        return "z_j[", str(group_id)
    if grouping == "day_of_week":
        if isinstance(group_id, str):
            return "z_d[", group_id
        if not 0 <= int(group_id) < 7:
            raise DataError(f"Unknown day_of_week group {group_id}")
        return "z_d[", DAY_NAMES[int(group_id)]
    raise ConfigError([f"grouping must be one of {GROUPINGS}, got {grouping!r}"])


def predict_group(summary: pd.DataFrame, grouping: str, group_id, scale_factor: float = 1.0) -> float:
    """(mu + z_group) posterior means, mapped back to coefficient units; the other
    grouping's effect is left at its prior mean of zero."""
    prefix, label = _effect_label(grouping, group_id)
    rows = summary.set_index("parameter")
    effect = summary[summary["parameter"].str.startswith(prefix) & (summary["label"] == label)]
    if effect.empty:
        raise DataError(f"No {grouping} effect for group {group_id!r} in the posterior summary")
    return float((rows.loc["mu", "mean"] + effect["mean"].iloc[0]) * scale_factor)


def baseline_group_mean(records: Sequence[CoefficientRecord], grouping: str, group_id, coefficient: str) -> float:
    """Mean coefficient of one group in `records`; evaluation passes the train set."""
    values = [r.coefficient(coefficient) for r in records if r.group_id(grouping) == group_id]
    if not values:
        raise DataError(f"{grouping} group {group_id!r} has no records")
    return math.fsum(values) / len(values)


def score(predictions: Sequence[float], actuals: Sequence[float]) -> Tuple[float, float]:
    """(bias, rmse); bias is the mean of prediction minus actual."""
    p = np.asarray(predictions, dtype=float)
    a = np.asarray(actuals, dtype=float)
    if p.shape != a.shape:
        raise DataError(f"Cannot score {len(p)} predictions against {len(a)} actuals")
    if p.size == 0:
        raise DataError("Cannot score an empty prediction vector")
    diff = p - a
    return float(diff.mean()), float(np.sqrt(np.mean(diff * diff)))


class VarianceDecomposition(BaseModel):
    s_d: float
    s_j: float
    s_eps: float
    combined: float = Field(..., description="sqrt(s_d^2 + s_j^2 + s_eps^2)")
    sigma_y: float = Field(..., description="Sample SD of the modelled outcome")
    r_squared: float
    scale_factor: float = 1.0
    combined_coefficient_units: float
    sigma_y_coefficient_units: float


def variance_decomposition(summary: pd.DataFrame, y: Sequence[float], scale_factor: float = 1.0) -> VarianceDecomposition:
    means = summary.set_index("parameter")["mean"]
    s_d, s_j, s_eps = float(means["s_d"]), float(means["s_j"]), float(means["s_eps"])
    combined = math.sqrt(s_d**2 + s_j**2 + s_eps**2)
    y = np.asarray(y, dtype=float)
    sigma_y = float(y.std(ddof=1)) if len(y) > 1 else 0.0
    r_squared = 1.0 - s_eps**2 / sigma_y**2 if sigma_y > 0 else float("nan")
    return VarianceDecomposition(
        s_d=s_d,
        s_j=s_j,
        s_eps=s_eps,
        combined=combined,
        sigma_y=sigma_y,
        r_squared=r_squared,
        scale_factor=scale_factor,
        combined_coefficient_units=combined * abs(scale_factor),
        sigma_y_coefficient_units=sigma_y * abs(scale_factor),
    )


class EvalRow(BaseModel):
    coefficient: str
    grouping: str
    baseline_bias: float
    baseline_rmse: float
    hier_bias: float
    hier_rmse: float
    n_groups: int
    excluded_groups: List[str] = Field(default_factory=list)


class EvalReport(BaseModel):
    split_seed: int
    per_record: bool = False
    n_train: int
    n_test: int
    rows: List[EvalRow] = Field(default_factory=list)
    test_on_train: List[EvalRow] = Field(default_factory=list)
    variance: Dict[str, VarianceDecomposition] = Field(default_factory=dict)
    reduction_ratio: Optional[float] = None

    def rmse_table(self) -> pd.DataFrame:
        """One RMSE row per coefficient and grouping, baseline next to hierarchy."""
        return pd.DataFrame(
            [
                {
                    "Coefficient": r.coefficient,
                    "Group": "Location" if r.grouping == "location" else "Day-Of-Week",
                    "Average": r.baseline_rmse,
                    "Hierarchy": r.hier_rmse,
                }
                for r in self.rows
            ],
            columns=["Coefficient", "Group", "Average", "Hierarchy"],
        )


@dataclass
class GroupComparison:
    row: EvalRow
    pairs: pd.DataFrame


def compare_grouping(
    summary: pd.DataFrame,
    train: Sequence[CoefficientRecord],
    test: Sequence[CoefficientRecord],
    coefficient: str,
    grouping: str,
    scale_factor: float,
    per_record: bool = False,
) -> GroupComparison:
    """Scores the hierarchy and the train-set group mean against the test set.

    Each baseline is `baseline_group_mean` over `train`; `test` only supplies
    the actuals, so a group's baseline never sees the values it is scored on.

    Groups present in the test set but missing from the train set or the
    model are excluded and listed.
    """
    group_ids = sorted({r.group_id(grouping) for r in test})
    pairs, excluded = [], []
    for gid in group_ids:
        try:
            hier = predict_group(summary, grouping, gid, scale_factor)
            base = baseline_group_mean(train, grouping, gid, coefficient)
        except DataError as e:
            logger.debug(f"Excluding {grouping} group {gid}: {e}")
            excluded.append(str(gid))
            continue
        if per_record:
            for r in test:
                if r.group_id(grouping) == gid:
                    pairs.append((gid, hier, base, r.coefficient(coefficient)))
        else:
            pairs.append((gid, hier, base, baseline_group_mean(test, grouping, gid, coefficient)))

    if not pairs:
        raise DataError(f"No {grouping} group of {coefficient} could be scored")
    frame = pd.DataFrame(pairs, columns=["group", "hierarchy", "baseline", "actual"])
    hier_bias, hier_rmse = score(frame["hierarchy"], frame["actual"])
    base_bias, base_rmse = score(frame["baseline"], frame["actual"])
    if excluded:
        logger.warning(f"{coefficient}/{grouping}: excluded {len(excluded)} groups without train data or effects")
    row = EvalRow(
        coefficient=coefficient,
        grouping=grouping,
        baseline_bias=base_bias,
        baseline_rmse=base_rmse,
        hier_bias=hier_bias,
        hier_rmse=hier_rmse,
        n_groups=frame["group"].nunique(),
        excluded_groups=excluded,
    )
    return GroupComparison(row=row, pairs=frame)


def score_on_train(
    summary: pd.DataFrame, train: Sequence[CoefficientRecord], coefficient: str, grouping: str, scale_factor: float
) -> EvalRow:
    """Model predictions against the train group means the model was fitted on."""
    return compare_grouping(summary, train, train, coefficient, grouping, scale_factor).row


def _daily_fit_frame(series: BinnedSeries, epsilon: float = 1.0, centering: Centering = "midpoint",
                     curve_points: int = 200) -> pd.DataFrame:
    fit = fit_series(series, epsilon, centering)
    observed = pd.DataFrame(
        {
            "series": "observed",
            "t": fit.t,
            "minute": (fit.t + 1.0) * series.daily_minutes_open / 2.0,
            "log_count": fit.y,
            "fitted": fit.fitted,
        }
    )
    t = np.linspace(-1.0, 1.0, curve_points)
    curve = pd.DataFrame(
        {
            "series": "curve",
            "t": t,
            "minute": (t + 1.0) * series.daily_minutes_open / 2.0,
            "log_count": np.nan,
            "fitted": evaluate_curve(fit, t),
        }
    )
    return pd.concat([observed, curve], ignore_index=True)


def _boxplot_frame(records: Sequence[CoefficientRecord], coefficient: str, grouping: str) -> pd.DataFrame:
    if not records:
        raise DataError("boxplot_by_group needs at least one record")
    frame = pd.DataFrame(
        {"group": [r.group_id(grouping) for r in records], "value": [r.coefficient(coefficient) for r in records]}
    )
    stats = frame.groupby("group")["value"].describe(percentiles=[0.25, 0.5, 0.75])
    stats = stats.rename(columns={"count": "n", "25%": "q1", "50%": "median", "75%": "q3"})
    stats.insert(0, "coefficient", coefficient)
    stats.insert(1, "grouping", grouping)
    return stats.reset_index()[["coefficient", "grouping", "group", "n", "min", "q1", "median", "q3", "max", "mean"]]


def _pred_vs_actual_frame(pairs: pd.DataFrame) -> pd.DataFrame:
    if pairs.empty:
        raise DataError("pred_vs_actual needs at least one prediction")
    out = pairs.rename(columns={"hierarchy": "predicted"})[["group", "predicted", "actual"]].copy()
    out["identity"] = out["actual"]
    return out


def emit_plot_data(kind: str, **inputs) -> pd.DataFrame:
    """Tabular data behind each figure class.

    daily_fit         series, epsilon, centering
    boxplot_by_group  records, coefficient, grouping
    pred_vs_actual    pairs (the frame returned by compare_grouping)
    """
    if kind == "daily_fit":
        return _daily_fit_frame(**inputs)
    if kind == "boxplot_by_group":
        return _boxplot_frame(**inputs)
    if kind == "pred_vs_actual":
        return _pred_vs_actual_frame(**inputs)
    raise ConfigError([f"Unknown plot kind {kind!r}; expected one of {PLOT_KINDS}"])
