import logging
import math
from typing import Any, Dict, List, Optional

import arviz as az
import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from src.errors import InferenceError
from src.hier import PosteriorDraws

logger = logging.getLogger("hiercast.diagnostics")

RHAT_THRESHOLD = 1.01
QUANTILES = (0.025, 0.25, 0.5, 0.75, 0.975)


class ParameterDiagnostics(BaseModel):
    name: str
    r_hat: Optional[float] = None
    ess_bulk: Optional[float] = None
    flagged: bool = False


class DiagnosticsReport(BaseModel):
    backend: str
    chains: int
    iterations: int
    warmup: int
    draws_per_chain: int
    sigma_upper: float
    lp_mean: float
    lp_se_mean: Optional[float] = None
    lp_sd: float
    parameters: List[ParameterDiagnostics] = Field(default_factory=list)
    flagged: List[str] = Field(default_factory=list)
    converged: bool = True
    sampler_info: Dict[str, Any] = Field(default_factory=dict)


def _finite_or_none(value: float) -> Optional[float]:
    value = float(value)
    return value if math.isfinite(value) else None


def _constant(values: np.ndarray) -> bool:
    return bool(np.ptp(values) == 0)


def _rhat(chains: np.ndarray) -> float:
    if np.all(chains.std(axis=1) == 0):
        return float("nan")
    return float(az.rhat(chains, method="rank"))


def _ess(values: np.ndarray) -> float:
    return float("nan") if _constant(values) else float(az.ess(values, method="bulk"))


def _mcse(values: np.ndarray) -> float:
    return 0.0 if _constant(values) else float(az.mcse(values, method="mean"))


def diagnostics(draws: PosteriorDraws) -> DiagnosticsReport:
    if draws.n_chains < 2:
        raise InferenceError("R-hat needs at least two chains")

    params = []
    for name, values in draws.parameters().items():
        r_hat = _rhat(values)
        ess = _ess(values)
        flagged = not (r_hat <= RHAT_THRESHOLD)
        params.append(
            ParameterDiagnostics(name=name, r_hat=_finite_or_none(r_hat), ess_bulk=_finite_or_none(ess), flagged=flagged)
        )

    flagged = [p.name for p in params if p.flagged]
    if flagged:
        logger.warning(f"R-hat above {RHAT_THRESHOLD} (or undefined) for {len(flagged)} parameters: {flagged[:5]}")

    return DiagnosticsReport(
        backend=draws.backend,
        chains=draws.n_chains,
        iterations=draws.iterations,
        warmup=draws.warmup,
        draws_per_chain=draws.n_draws,
        sigma_upper=draws.sigma_upper,
        lp_mean=float(draws.lp.mean()),
        lp_se_mean=_finite_or_none(_mcse(draws.lp)),
        lp_sd=float(draws.lp.std(ddof=1)),
        parameters=params,
        flagged=flagged,
        converged=not flagged,
        sampler_info=draws.sampler_info,
    )


def _label(draws: PosteriorDraws, name: str) -> str:
    if name.startswith("z_d["):
        k = int(name[4:-1])
        return str(draws.day_labels[k]) if draws.day_labels else str(k)
    if name.startswith("z_j["):
        k = int(name[4:-1])
        return str(draws.location_labels[k]) if draws.location_labels else str(k)
    return ""


def posterior_summary(draws: PosteriorDraws) -> pd.DataFrame:
    """One row per mu, s_d, s_j, s_eps, z_d[*], z_j[*] with rstan-style columns."""
    rows = []
    for name, values in draws.parameters().items():
        flat = values.reshape(-1)
        row = {
            "parameter": name,
            "label": _label(draws, name),
            "mean": float(flat.mean()),
            "se_mean": _mcse(values),
            "sd": float(flat.std(ddof=1)) if len(flat) > 1 else 0.0,
        }
        for p, q in zip(QUANTILES, np.quantile(flat, QUANTILES)):
            row[f"{p * 100:g}%"] = float(q)
        row["n_eff"] = _ess(values)
        row["Rhat"] = _rhat(values) if draws.n_chains > 1 else float("nan")
        rows.append(row)
    return pd.DataFrame(rows)

