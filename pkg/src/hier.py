"""Two-way crossed random-effects model and its MCMC engine.

    y_i ~ Normal(mu + z_d[d_i] + z_j[j_i], s_eps)
    z_d = s_d * eta_d,  eta_d ~ Normal(0, 1)
    z_j = s_j * eta_j,  eta_j ~ Normal(0, 1)

mu and the three scales carry flat priors; the scales are bounded above by
sigma_upper so the posterior is proper. Two backends share this density:

  gibbs  exact block conditional for (mu, z_d, z_j), truncated inverse-gamma
         scale conditionals, and an interleaved non-centered scale update
  mwg    random-walk Metropolis-within-Gibbs on (mu, eta, log s)
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, special

from src.errors import DataError, SamplingError
from src.schema import DAY_NAMES, CoefficientRecord, SamplerConfig

logger = logging.getLogger("hiercast.hier")

_LOG_2PI = math.log(2.0 * math.pi)
_TARGET_ACCEPT = 0.44
_ADAPT_BATCH = 50


@dataclass(frozen=True)
class HierData:
    day_index: np.ndarray
    location_index: np.ndarray
    y: np.ndarray
    n_days: int = 7
    n_locations: int = 1
    day_labels: Tuple = ()
    location_labels: Tuple = ()

    def __post_init__(self):
        d = np.asarray(self.day_index, dtype=np.int64)
        j = np.asarray(self.location_index, dtype=np.int64)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "day_index", d)
        object.__setattr__(self, "location_index", j)
        object.__setattr__(self, "y", y)
        if not (len(d) == len(j) == len(y)):
            raise DataError(f"Index and outcome vectors differ in length: {len(d)}, {len(j)}, {len(y)}")
        if self.n_days < 1 or self.n_locations < 1:
            raise DataError("HierData needs at least one day and one location level")
        if len(d) and (d.min() < 0 or d.max() >= self.n_days):
            raise DataError(f"day_index outside [0, {self.n_days})")
        if len(j) and (j.min() < 0 or j.max() >= self.n_locations):
            raise DataError(f"location_index outside [0, {self.n_locations})")
        if not np.all(np.isfinite(y)):
            raise DataError("y contains non-finite values")
        if not self.day_labels:
            object.__setattr__(self, "day_labels", tuple(range(self.n_days)))
        if not self.location_labels:
            object.__setattr__(self, "location_labels", tuple(range(self.n_locations)))

    @property
    def n(self) -> int:
        return len(self.y)

    @classmethod
    def from_records(
        cls,
        records: Sequence[CoefficientRecord],
        y: np.ndarray,
        location_labels: Optional[Sequence[int]] = None,
    ) -> "HierData":
        """Rows map to (day_of_week, location) with locations indexed in sorted order."""
        labels = tuple(sorted(set(location_labels) if location_labels else {r.location_number for r in records}))
        index = {loc: i for i, loc in enumerate(labels)}
        return cls(
            day_index=np.array([r.day_of_week for r in records], dtype=np.int64),
            location_index=np.array([index[r.location_number] for r in records], dtype=np.int64),
            y=np.asarray(y, dtype=float),
            n_days=7,
            n_locations=len(labels),
            day_labels=DAY_NAMES,
            location_labels=labels,
        )


@dataclass
class ParamState:
    mu: float
    eta_d: np.ndarray
    eta_j: np.ndarray
    s_d: float
    s_j: float
    s_eps: float

    def as_dict(self) -> Dict[str, Any]:
        return {
            "mu": float(self.mu),
            "eta_d": np.asarray(self.eta_d).tolist(),
            "eta_j": np.asarray(self.eta_j).tolist(),
            "s_d": float(self.s_d),
            "s_j": float(self.s_j),
            "s_eps": float(self.s_eps),
        }


@dataclass(frozen=True)
class TransformedState:
    z_d: np.ndarray
    z_j: np.ndarray
    yhat: np.ndarray


def transform(state: ParamState, data: HierData) -> TransformedState:
    z_d = state.s_d * np.asarray(state.eta_d)
    z_j = state.s_j * np.asarray(state.eta_j)
    yhat = state.mu + z_d[data.day_index] + z_j[data.location_index]
    return TransformedState(z_d=z_d, z_j=z_j, yhat=yhat)


def _normal_logpdf_sum(x: np.ndarray, loc, scale: float) -> float:
    r = (x - loc) / scale
    return float(-0.5 * (r @ r) - len(r) * (math.log(scale) + 0.5 * _LOG_2PI))


def log_posterior(state: ParamState, data: HierData, sigma_upper: Optional[float] = None) -> float:
    scales = (state.s_d, state.s_j, state.s_eps)
    if any(not (s > 0) or not math.isfinite(s) for s in scales):
        return -math.inf
    if sigma_upper is not None and any(s > sigma_upper for s in scales):
        return -math.inf

    eta_d = np.asarray(state.eta_d, dtype=float)
    eta_j = np.asarray(state.eta_j, dtype=float)
    lp = _normal_logpdf_sum(eta_d, 0.0, 1.0) + _normal_logpdf_sum(eta_j, 0.0, 1.0)
    if data.n:
        lp += _normal_logpdf_sum(data.y, transform(state, data).yhat, state.s_eps)
    return lp


@dataclass
class PosteriorDraws:
    """Retained draws, arrays shaped (chains, draws[, levels])."""

    mu: np.ndarray
    s_d: np.ndarray
    s_j: np.ndarray
    s_eps: np.ndarray
    eta_d: np.ndarray
    eta_j: np.ndarray
    lp: np.ndarray
    iterations: int
    warmup: int
    backend: str
    sigma_upper: float
    day_labels: Tuple = ()
    location_labels: Tuple = ()
    sampler_info: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_chains(self) -> int:
        return self.mu.shape[0]

    @property
    def n_draws(self) -> int:
        return self.mu.shape[1]

    @property
    def z_d(self) -> np.ndarray:
        return self.s_d[..., None] * self.eta_d

    @property
    def z_j(self) -> np.ndarray:
        return self.s_j[..., None] * self.eta_j

    def yhat(self, data: HierData) -> np.ndarray:
        return self.mu[..., None] + self.z_d[..., data.day_index] + self.z_j[..., data.location_index]

    def parameters(self, include_eta: bool = False) -> Dict[str, np.ndarray]:
        """Flat name -> (chains, draws) mapping in summary order."""
        out = {"mu": self.mu, "s_d": self.s_d, "s_j": self.s_j, "s_eps": self.s_eps}
        z_d, z_j = self.z_d, self.z_j
        for k in range(z_d.shape[-1]):
            out[f"z_d[{k}]"] = z_d[..., k]
        for k in range(z_j.shape[-1]):
            out[f"z_j[{k}]"] = z_j[..., k]
        if include_eta:
            for k in range(self.eta_d.shape[-1]):
                out[f"eta_d[{k}]"] = self.eta_d[..., k]
            for k in range(self.eta_j.shape[-1]):
                out[f"eta_j[{k}]"] = self.eta_j[..., k]
        return out


def default_sigma_upper(data: HierData) -> float:
    sd = float(np.std(data.y)) if data.n > 1 else 0.0
    return 1e3 * (sd if sd > 0 else 1.0)


def _truncated_normal(rng: np.random.Generator, mean: float, sd: float, lower: float, upper: float) -> float:
    a, b = (lower - mean) / sd, (upper - mean) / sd
    if a > 0:
        pa, pb = special.ndtr(-a), special.ndtr(-b)
        if pa <= pb:
            return lower
        x = -special.ndtri(pb + (pa - pb) * rng.random())
    else:
        pa, pb = special.ndtr(a), special.ndtr(b)
        if pb <= pa:
            return min(max(mean, lower), upper)
        x = special.ndtri(pa + (pb - pa) * rng.random())
    return min(max(mean + sd * x, lower), upper)


def _log_scale_density(sigma: float, count: int, ss: float) -> float:
    # flat prior on sigma, proposal on log sigma
    return -(count - 1) * math.log(sigma) - ss / (2.0 * sigma * sigma)


def _metropolis_log_scale(
    rng: np.random.Generator, sigma: float, count: int, ss: float, lower: float, upper: float, step: float = 0.5
) -> float:
    proposal = sigma * math.exp(step * rng.standard_normal())
    if not (lower < proposal <= upper):
        return sigma
    log_ratio = _log_scale_density(proposal, count, ss) - _log_scale_density(sigma, count, ss)
    return proposal if math.log(rng.random()) < log_ratio else sigma


def _sample_scale(
    rng: np.random.Generator, sigma: float, count: int, ss: float, lower: float, upper: float
) -> float:
    """sigma | ss for p(sigma) ∝ sigma^-count exp(-ss / 2 sigma^2) on (lower, upper].

    In sigma^2 this is inverse-gamma with shape (count - 1) / 2; the precision
    1/sigma^2 is drawn from the gamma truncated at 1/upper^2 by inverse CDF.
    """
    shape = 0.5 * (count - 1)
    rate = 0.5 * max(ss, lower * lower)
    if shape <= 0:
        return _metropolis_log_scale(rng, sigma, count, ss, lower, upper)

    p_lo = special.gammainc(shape, rate / (upper * upper))
    if p_lo >= 1.0:
        return upper
    u = p_lo + (1.0 - p_lo) * rng.random()
    precision = special.gammaincinv(shape, u) / rate
    if not (precision > 0) or not math.isfinite(precision):
        return min(max(sigma, lower), upper)
    return min(max(1.0 / math.sqrt(precision), lower), upper)


class _Chain:
    def __init__(self, data: HierData, sigma_upper: float, rng: np.random.Generator, chain_id: int):
        self.data = data
        self.upper = sigma_upper
        self.rng = rng
        self.chain_id = chain_id
        self.n, self.D, self.J = data.n, data.n_days, data.n_locations
        self.d, self.j, self.y = data.day_index, data.location_index, data.y
        self.n_d = np.bincount(self.d, minlength=self.D).astype(float)
        self.n_j = np.bincount(self.j, minlength=self.J).astype(float)

        sd_y = float(np.std(self.y)) if self.n > 1 else 0.0
        self.y_scale = sd_y if sd_y > 0 else 1.0
        self.lower = 1e-8 * self.y_scale

    def _initial_state(self) -> ParamState:
        rng = self.rng
        mean_y = float(np.mean(self.y))

        def scale():
            return min(self.y_scale * math.exp(rng.uniform(-1.0, 1.0)), 0.5 * self.upper)

        return ParamState(
            mu=mean_y + 0.5 * self.y_scale * rng.standard_normal(),
            eta_d=rng.standard_normal(self.D),
            eta_j=rng.standard_normal(self.J),
            s_d=scale(),
            s_j=scale(),
            s_eps=scale(),
        )

    def _check(self, state: ParamState, lp: float, iteration: int) -> None:
        if not math.isfinite(lp):
            raise SamplingError(
                f"Non-finite log posterior in chain {self.chain_id} at iteration {iteration}",
                dump={"chain": self.chain_id, "iteration": iteration, "lp": str(lp), "state": state.as_dict()},
            )

    def step(self, state: ParamState, warmup: bool) -> ParamState:
        raise NotImplementedError

    def info(self) -> Dict[str, Any]:
        return {}

    def run(self, iterations: int, warmup: int) -> Dict[str, np.ndarray]:
        keep = iterations - warmup
        out = {
            "mu": np.empty(keep),
            "s_d": np.empty(keep),
            "s_j": np.empty(keep),
            "s_eps": np.empty(keep),
            "eta_d": np.empty((keep, self.D)),
            "eta_j": np.empty((keep, self.J)),
            "lp": np.empty(keep),
        }
        state = self._initial_state()
        for it in range(iterations):
            state = self.step(state, warmup=it < warmup)
            if it < warmup:
                continue
            lp = log_posterior(state, self.data, self.upper)
            self._check(state, lp, it)
            k = it - warmup
            out["mu"][k], out["s_d"][k], out["s_j"][k], out["s_eps"][k] = state.mu, state.s_d, state.s_j, state.s_eps
            out["eta_d"][k], out["eta_j"][k], out["lp"][k] = state.eta_d, state.eta_j, lp
            if (it + 1) % 1000 == 0:
                logger.debug(f"chain {self.chain_id}: iteration {it + 1}/{iterations}, lp={lp:.3f}")
        return out


class GibbsChain(_Chain):
    def __init__(self, data: HierData, sigma_upper: float, rng: np.random.Generator, chain_id: int):
        super().__init__(data, sigma_upper, rng, chain_id)
        D, J = self.D, self.J
        p = 1 + D + J
        n_dj = np.zeros((D, J))
        np.add.at(n_dj, (self.d, self.j), 1.0)

        xtx = np.zeros((p, p))
        xtx[0, 0] = self.n
        xtx[0, 1 : 1 + D] = xtx[1 : 1 + D, 0] = self.n_d
        xtx[0, 1 + D :] = xtx[1 + D :, 0] = self.n_j
        xtx[1 : 1 + D, 1 : 1 + D] = np.diag(self.n_d)
        xtx[1 + D :, 1 + D :] = np.diag(self.n_j)
        xtx[1 : 1 + D, 1 + D :] = n_dj
        xtx[1 + D :, 1 : 1 + D] = n_dj.T
        self.xtx = xtx
        self.xty = np.concatenate(
            [
                [self.y.sum()],
                np.bincount(self.d, weights=self.y, minlength=D),
                np.bincount(self.j, weights=self.y, minlength=J),
            ]
        )

    def _block(self, s_d: float, s_j: float, s_eps: float) -> np.ndarray:
        D = self.D
        precision = self.xtx / (s_eps * s_eps)
        idx = np.arange(1, precision.shape[0])
        precision[idx, idx] += np.where(idx <= D, 1.0 / (s_d * s_d), 1.0 / (s_j * s_j))
        try:
            chol = np.linalg.cholesky(precision)
        except np.linalg.LinAlgError as e:
            raise SamplingError(
                f"Block precision not positive definite in chain {self.chain_id}",
                dump={"chain": self.chain_id, "s_d": s_d, "s_j": s_j, "s_eps": s_eps},
            ) from e
        mean = linalg.cho_solve((chol, True), self.xty / (s_eps * s_eps))
        noise = linalg.solve_triangular(chol.T, self.rng.standard_normal(len(mean)), lower=False)
        return mean + noise

    def _noncentered_scale(self, scale: float, eta: np.ndarray, idx: np.ndarray, counts: np.ndarray,
                           partial: np.ndarray, s_eps: float) -> float:
        # partial = y - (everything except this factor's effect)
        weight = float(counts @ (eta * eta))
        if weight <= 0:
            return scale
        cross = float(eta @ np.bincount(idx, weights=partial, minlength=len(eta)))
        return _truncated_normal(self.rng, cross / weight, s_eps / math.sqrt(weight), self.lower, self.upper)

    def step(self, state: ParamState, warmup: bool) -> ParamState:
        D = self.D
        s_d, s_j, s_eps = state.s_d, state.s_j, state.s_eps

        theta = self._block(s_d, s_j, s_eps)
        mu, z_d, z_j = theta[0], theta[1 : 1 + D], theta[1 + D :]

        s_d = _sample_scale(self.rng, s_d, D, float(z_d @ z_d), self.lower, self.upper)
        s_j = _sample_scale(self.rng, s_j, self.J, float(z_j @ z_j), self.lower, self.upper)

        resid = self.y - mu - z_d[self.d] - z_j[self.j]
        s_eps = _sample_scale(self.rng, s_eps, self.n, float(resid @ resid), self.lower, self.upper)

        # interweave: redraw each group scale with its standardized effects held fixed
        eta_d = z_d / s_d
        s_d = self._noncentered_scale(s_d, eta_d, self.d, self.n_d, resid + z_d[self.d], s_eps)
        z_d = s_d * eta_d
        resid = self.y - mu - z_d[self.d] - z_j[self.j]
        eta_j = z_j / s_j
        s_j = self._noncentered_scale(s_j, eta_j, self.j, self.n_j, resid + z_j[self.j], s_eps)

        return ParamState(mu=float(mu), eta_d=eta_d, eta_j=eta_j, s_d=s_d, s_j=s_j, s_eps=s_eps)


class MetropolisWithinGibbsChain(_Chain):
    def __init__(self, data: HierData, sigma_upper: float, rng: np.random.Generator, chain_id: int):
        super().__init__(data, sigma_upper, rng, chain_id)
        self.log_step = {
            "mu": np.array([math.log(0.5 * self.y_scale / math.sqrt(max(self.n, 1)))]),
            "eta_d": np.full(self.D, math.log(0.5)),
            "eta_j": np.full(self.J, math.log(0.5)),
            "scales": np.full(3, math.log(0.3)),
            "shift": np.full(2, math.log(0.2 * self.y_scale)),
            "rescale": np.full(2, math.log(0.3)),
        }
        self.accepted = {k: np.zeros_like(v) for k, v in self.log_step.items()}
        self.proposed = 0
        self.batch_accepted = {k: np.zeros_like(v) for k, v in self.log_step.items()}
        self.batches = 0
        self.in_warmup = True

    def _accept(self, log_ratio) -> np.ndarray:
        log_ratio = np.atleast_1d(log_ratio)
        return np.log(self.rng.random(len(log_ratio))) < log_ratio

    def _effects_update(self, eta, scale, idx, counts, resid, s_eps, key):
        step = np.exp(self.log_step[key])
        proposal = eta + step * self.rng.standard_normal(len(eta))
        delta = scale * (proposal - eta)
        sums = np.bincount(idx, weights=resid, minlength=len(eta))
        d_ss = -2.0 * delta * sums + counts * delta * delta
        log_ratio = -d_ss / (2.0 * s_eps * s_eps) - 0.5 * (proposal**2 - eta**2)
        ok = self._accept(log_ratio)
        self.batch_accepted[key] += ok
        eta = np.where(ok, proposal, eta)
        return eta, resid - np.where(ok, delta, 0.0)[idx]

    def _shift(self, mu, eta, scale, slot):
        # move mu and the effects in opposite directions so yhat is unchanged
        delta = math.exp(self.log_step["shift"][slot]) * self.rng.standard_normal()
        proposal = eta - delta / scale
        log_ratio = -0.5 * float(proposal @ proposal - eta @ eta)
        if self._accept(log_ratio)[0]:
            self.batch_accepted["shift"][slot] += 1
            return mu + delta, proposal
        return mu, eta

    def _group_scale_update(self, scale, eta, idx, counts, resid, s_eps, slot):
        proposal = scale * math.exp(math.exp(self.log_step["scales"][slot]) * self.rng.standard_normal())
        if not (self.lower < proposal <= self.upper):
            return scale, resid
        delta = (proposal - scale) * eta
        sums = np.bincount(idx, weights=resid, minlength=len(eta))
        d_ss = float(np.sum(-2.0 * delta * sums + counts * delta * delta))
        log_ratio = -d_ss / (2.0 * s_eps * s_eps) + math.log(proposal / scale)
        if self._accept(log_ratio)[0]:
            self.batch_accepted["scales"][slot] += 1
            return proposal, resid - delta[idx]
        return scale, resid

    def _rescale(self, scale, eta, slot):
        # s and eta move inversely so s * eta, and the likelihood, stay fixed
        delta = math.exp(self.log_step["rescale"][slot]) * self.rng.standard_normal()
        proposal = scale * math.exp(delta)
        if not (self.lower < proposal <= self.upper):
            return scale, eta
        shrunk = eta * math.exp(-delta)
        log_ratio = -0.5 * float(shrunk @ shrunk - eta @ eta) + (1 - len(eta)) * delta
        if self._accept(log_ratio)[0]:
            self.batch_accepted["rescale"][slot] += 1
            return proposal, shrunk
        return scale, eta

    def step(self, state: ParamState, warmup: bool) -> ParamState:
        if self.in_warmup and not warmup:
            self.in_warmup = False
            for acc in self.batch_accepted.values():
                acc[:] = 0
        mu, eta_d, eta_j = state.mu, state.eta_d.copy(), state.eta_j.copy()
        s_d, s_j, s_eps = state.s_d, state.s_j, state.s_eps
        resid = self.y - transform(state, self.data).yhat

        prop = mu + math.exp(self.log_step["mu"][0]) * self.rng.standard_normal()
        delta = prop - mu
        d_ss = -2.0 * delta * resid.sum() + self.n * delta * delta
        if self._accept(-d_ss / (2.0 * s_eps * s_eps))[0]:
            self.batch_accepted["mu"][0] += 1
            mu, resid = prop, resid - delta

        eta_d, resid = self._effects_update(eta_d, s_d, self.d, self.n_d, resid, s_eps, "eta_d")
        eta_j, resid = self._effects_update(eta_j, s_j, self.j, self.n_j, resid, s_eps, "eta_j")
        mu, eta_d = self._shift(mu, eta_d, s_d, 0)
        mu, eta_j = self._shift(mu, eta_j, s_j, 1)
        s_d, resid = self._group_scale_update(s_d, eta_d, self.d, self.n_d, resid, s_eps, 0)
        s_j, resid = self._group_scale_update(s_j, eta_j, self.j, self.n_j, resid, s_eps, 1)
        s_d, eta_d = self._rescale(s_d, eta_d, 0)
        s_j, eta_j = self._rescale(s_j, eta_j, 1)

        proposal = s_eps * math.exp(math.exp(self.log_step["scales"][2]) * self.rng.standard_normal())
        if self.lower < proposal <= self.upper:
            ss = float(resid @ resid)
            log_ratio = _log_scale_density(proposal, self.n, ss) - _log_scale_density(s_eps, self.n, ss)
            if self._accept(log_ratio)[0]:
                self.batch_accepted["scales"][2] += 1
                s_eps = proposal

        self._adapt(warmup)
        return ParamState(mu=mu, eta_d=eta_d, eta_j=eta_j, s_d=s_d, s_j=s_j, s_eps=s_eps)

    def _adapt(self, warmup: bool) -> None:
        if not warmup:
            for k in self.accepted:
                self.accepted[k] += self.batch_accepted[k]
                self.batch_accepted[k][:] = 0
            return
        self.proposed += 1
        if self.proposed % _ADAPT_BATCH:
            return
        self.batches += 1
        gain = min(0.1, 1.0 / math.sqrt(self.batches))
        for k, acc in self.batch_accepted.items():
            rate = acc / _ADAPT_BATCH
            self.log_step[k] += np.where(rate > _TARGET_ACCEPT, gain, -gain)
            acc[:] = 0

    def info(self) -> Dict[str, Any]:
        return {"step_sizes": {k: np.exp(v).tolist() for k, v in self.log_step.items()}}


_BACKENDS = {"gibbs": GibbsChain, "mwg": MetropolisWithinGibbsChain}


def run_mcmc(data: HierData, cfg: SamplerConfig) -> PosteriorDraws:
    if data.n < 1:
        raise DataError("run_mcmc needs at least one observation")
    if np.ptp(data.y) == 0:
        logger.warning("Outcome has zero variance; the posterior is degenerate and scales collapse to their floor")

    upper = cfg.sigma_upper or default_sigma_upper(data)
    warmup = cfg.n_warmup
    chain_cls = _BACKENDS[cfg.backend]
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.chains)
    chains = [chain_cls(data, upper, np.random.default_rng(s), c) for c, s in enumerate(seeds)]

    logger.info(
        f"Sampling {cfg.chains} chains x {cfg.iterations} iterations ({warmup} warmup) with {cfg.backend}, "
        f"N={data.n}, D={data.n_days}, J={data.n_locations}"
    )
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(lambda ch: ch.run(cfg.iterations, warmup), chains))
    else:
        results = [ch.run(cfg.iterations, warmup) for ch in chains]

    info: Dict[str, Any] = {"chains": [ch.info() for ch in chains]}
    if cfg.backend == "mwg":
        kept = cfg.iterations - warmup
        info["acceptance"] = [
            {k: (v / kept).tolist() for k, v in ch.accepted.items()} for ch in chains  # type: ignore[attr-defined]
        ]

    def stack(name):
        return np.stack([r[name] for r in results])

    return PosteriorDraws(
        mu=stack("mu"),
        s_d=stack("s_d"),
        s_j=stack("s_j"),
        s_eps=stack("s_eps"),
        eta_d=stack("eta_d"),
        eta_j=stack("eta_j"),
        lp=stack("lp"),
        iterations=cfg.iterations,
        warmup=warmup,
        backend=cfg.backend,
        sigma_upper=upper,
        day_labels=data.day_labels,
        location_labels=data.location_labels,
        sampler_info=info,
    )
