"""Per location-day quadratic fit of log item counts.

The basis is the discrete orthonormal (Legendre-type) polynomial family on
the day's bin grid, normalized under the mean inner product (1/K) sum_k, so
P0 is the constant 1 and c0 is the mean log-count.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Literal, Sequence, Tuple

import numpy as np

from src.errors import DataError, UnderdeterminedFit
from src.schema import BinnedSeries, CoefficientRecord, FitFailure

logger = logging.getLogger("hiercast.localfit")

Centering = Literal["midpoint", "left"]


@dataclass(frozen=True)
class LogQuadraticFit:
    coefficients: np.ndarray
    standard_errors: np.ndarray
    basis: np.ndarray
    t: np.ndarray
    y: np.ndarray

    @property
    def fitted(self) -> np.ndarray:
        return self.basis @ self.coefficients


@dataclass(frozen=True)
class Rescaled:
    y: np.ndarray
    scale_factor: float
    fallback: bool


def bin_grid(n_bins: int, bin_width: int, minutes_open: int, centering: Centering = "midpoint") -> np.ndarray:
    left = np.arange(n_bins, dtype=float) * bin_width
    if centering == "left":
        points = left
    else:
        right = np.minimum(left + bin_width, minutes_open)
        points = 0.5 * (left + right)
    return 2.0 * points / minutes_open - 1.0


def orthonormal_basis(t: np.ndarray) -> np.ndarray:
    """Columns P0, P1, P2 with (1/K) P^T P = I and positive leading coefficients."""
    k = len(t)
    q, r = np.linalg.qr(np.vander(t, 3, increasing=True))
    q = q * np.sign(np.diag(r))
    return q * np.sqrt(k)


@lru_cache(maxsize=256)
def _cached_basis(n_bins: int, bin_width: int, minutes_open: int, centering: str) -> Tuple[np.ndarray, np.ndarray]:
    t = bin_grid(n_bins, bin_width, minutes_open, centering)
    return t, orthonormal_basis(t)


def fit_log_values(y: np.ndarray, t: np.ndarray, basis: np.ndarray = None) -> LogQuadraticFit:
    y = np.asarray(y, dtype=float)
    if basis is None:
        basis = orthonormal_basis(t)
    k = len(y)
    coefficients = basis.T @ y / k

    dof = k - 3
    if dof > 0:
        resid = y - basis @ coefficients
        se = np.full(3, np.sqrt(resid @ resid / dof / k))
    else:
        se = np.full(3, np.nan)
    return LogQuadraticFit(coefficients=coefficients, standard_errors=se, basis=basis, t=t, y=y)


def fit_series(series: BinnedSeries, epsilon: float = 1.0, centering: Centering = "midpoint") -> LogQuadraticFit:
    counts = np.asarray(series.counts, dtype=float)
    if series.total == 0:
        raise UnderdeterminedFit(series.key, 0)

    shifted = counts + epsilon
    usable = shifted > 0
    n_usable = int(usable.sum())
    if n_usable < 3:
        raise UnderdeterminedFit(series.key, n_usable)

    if usable.all():
        t, basis = _cached_basis(len(counts), series.bin_width, series.daily_minutes_open, centering)
        return fit_log_values(np.log(shifted), t, basis)

    t = bin_grid(len(counts), series.bin_width, series.daily_minutes_open, centering)[usable]
    return fit_log_values(np.log(shifted[usable]), t)


def fit_log_quadratic(
    series: BinnedSeries, epsilon: float = 1.0, centering: Centering = "midpoint"
) -> CoefficientRecord:
    c0, c1, c2 = fit_series(series, epsilon, centering).coefficients
    return CoefficientRecord(
        location_number=series.location_number,
        calendar_day=series.calendar_day,
        day_of_week=series.day_of_week,
        c0=float(c0),
        c1=float(c1),
        c2=float(c2),
    )


def evaluate_curve(fit: LogQuadraticFit, t: np.ndarray) -> np.ndarray:
    """The fitted quadratic evaluated off the bin grid."""
    monomial = np.polyfit(fit.t, fit.fitted, 2)
    return np.polyval(monomial, np.asarray(t, dtype=float))


def build_coefficient_dataset(
    groups: Dict[Tuple, BinnedSeries],
    epsilon: float = 1.0,
    centering: Centering = "midpoint",
    workers: int = 1,
) -> Tuple[List[CoefficientRecord], List[FitFailure]]:
    keys = sorted(groups)

    def _fit(key):
        try:
            return fit_log_quadratic(groups[key], epsilon, centering)
        except DataError as e:
            return FitFailure(location_number=key[0], calendar_day=key[1], reason=str(e))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_fit, keys))
    else:
        results = [_fit(k) for k in keys]

    records = [r for r in results if isinstance(r, CoefficientRecord)]
    failures = [r for r in results if isinstance(r, FitFailure)]
    logger.info(f"Fitted {len(records)} location-days, {len(failures)} failures")
    return records, failures


def rescale_for_inference(records: Sequence[CoefficientRecord], target_coefficient: str) -> Rescaled:
    if not records:
        raise DataError("Cannot rescale an empty coefficient dataset")
    y = np.array([r.coefficient(target_coefficient) for r in records], dtype=float)
    mean = float(y.mean())

    if mean != 0.0 and abs(mean) > 1e-12 * float(np.abs(y).max()):
        return Rescaled(y=y / mean, scale_factor=mean, fallback=False)

    nonzero = np.abs(y[y != 0.0])
    scale = float(nonzero.mean()) if len(nonzero) else 1.0
    logger.warning(f"Mean of {target_coefficient} is zero; standardizing by mean |y| = {scale:.4g}")
    return Rescaled(y=y / scale, scale_factor=scale, fallback=True)


def unscale(values, scale_factor: float):
    return np.asarray(values, dtype=float) * scale_factor


def reduction_ratio(n_coefficient_records: int, n_transactions: int) -> float:
    return 3.0 * n_coefficient_records / n_transactions if n_transactions else float("nan")
