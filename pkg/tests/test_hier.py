import logging
import math
import time
from datetime import date, timedelta
from unittest.mock import patch

import numpy as np
import pytest
from scipy import stats

from src.diagnostics import diagnostics, posterior_summary
from src.errors import DataError, InferenceError, SamplingError
from src.hier import (
    HierData,
    MetropolisWithinGibbsChain,
    ParamState,
    default_sigma_upper,
    log_posterior,
    run_mcmc,
    transform,
)
from src.schema import CoefficientRecord, SamplerConfig
from src.synthgen import reference_regime

LOG_2PI = math.log(2 * math.pi)


def _crossed(n_days, n_locations, per_cell, mu, z_d, z_j, s_eps, seed):
    rng = np.random.default_rng(seed)
    d = np.repeat(np.arange(n_days), n_locations * per_cell)
    j = np.tile(np.repeat(np.arange(n_locations), per_cell), n_days)
    y = mu + np.asarray(z_d)[d] + np.asarray(z_j)[j] + rng.normal(0.0, s_eps, size=len(d))
    return HierData(day_index=d, location_index=j, y=y, n_days=n_days, n_locations=n_locations)


def _state(data, mu=0.0, s=(1.0, 1.0, 1.0), eta_d=None, eta_j=None):
    return ParamState(
        mu=mu,
        eta_d=np.zeros(data.n_days) if eta_d is None else np.asarray(eta_d, dtype=float),
        eta_j=np.zeros(data.n_locations) if eta_j is None else np.asarray(eta_j, dtype=float),
        s_d=s[0],
        s_j=s[1],
        s_eps=s[2],
    )


class TestHierData:
    def test_rejects_inconsistent_inputs(self):
        with pytest.raises(DataError):
            HierData(day_index=[0, 1], location_index=[0], y=[1.0, 2.0], n_days=2, n_locations=1)
        with pytest.raises(DataError):
            HierData(day_index=[0, 2], location_index=[0, 0], y=[1.0, 2.0], n_days=2, n_locations=1)
        with pytest.raises(DataError):
            HierData(day_index=[0], location_index=[0], y=[float("nan")], n_days=1, n_locations=1)

    def test_from_records_indexes_sorted_locations(self):
        day = date(2021, 1, 4)
        records = [
            CoefficientRecord(location_number=loc, calendar_day=day + timedelta(days=k),
                              day_of_week=(day + timedelta(days=k)).weekday(), c0=1.0, c1=0.0, c2=0.0)
            for k, loc in enumerate([30, 10, 20, 10])
        ]
        data = HierData.from_records(records, np.ones(4))
        assert data.location_labels == (10, 20, 30)
        assert data.location_index.tolist() == [2, 0, 1, 0]
        assert data.day_index.tolist() == [0, 1, 2, 3]
        assert data.n_days == 7 and data.day_labels[0] == "Monday"


class TestLogPosterior:
    def test_prior_only_without_data(self):
        data = HierData(day_index=[], location_index=[], y=[], n_days=3, n_locations=4)
        eta_d, eta_j = np.array([0.1, -0.5, 1.2]), np.array([0.3, 0.0, -2.0, 0.7])
        lp = log_posterior(_state(data, eta_d=eta_d, eta_j=eta_j), data)
        expected = stats.norm.logpdf(eta_d).sum() + stats.norm.logpdf(eta_j).sum()
        assert lp == pytest.approx(expected, rel=1e-12)

    def test_single_observation_at_the_mode(self):
        data = HierData(day_index=[0], location_index=[0], y=[2.5], n_days=1, n_locations=1)
        lp = log_posterior(_state(data, mu=2.5), data)
        prior = 2 * (-0.5 * LOG_2PI)
        assert lp - prior == pytest.approx(-0.5 * LOG_2PI, rel=1e-12)

    def test_matches_independent_resummation(self):
        rng = np.random.default_rng(8)
        data = HierData(day_index=[0, 1, 0, 1, 1, 0], location_index=[0, 0, 1, 1, 0, 1],
                        y=rng.normal(size=6), n_days=2, n_locations=2)
        state = _state(data, mu=0.3, s=(0.7, 1.4, 0.9), eta_d=rng.normal(size=2), eta_j=rng.normal(size=2))
        oracle = 0.0
        for x in list(state.eta_d) + list(state.eta_j):
            oracle += math.log(stats.norm.pdf(x))
        for y, d, j in zip(data.y, data.day_index, data.location_index):
            mean = state.mu + state.s_d * state.eta_d[d] + state.s_j * state.eta_j[j]
            oracle += math.log(stats.norm.pdf(y, mean, state.s_eps))
        assert log_posterior(state, data) == pytest.approx(oracle, rel=1e-12)

    @pytest.mark.parametrize("scales", [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 0.0)])
    def test_non_positive_scale_is_minus_infinity(self, scales):
        data = HierData(day_index=[0], location_index=[0], y=[1.0], n_days=1, n_locations=1)
        assert log_posterior(_state(data, s=scales), data) == -math.inf

    def test_scale_above_bound_is_minus_infinity(self):
        data = HierData(day_index=[0], location_index=[0], y=[1.0], n_days=1, n_locations=1)
        assert log_posterior(_state(data, s=(1.0, 5.0, 1.0)), data, sigma_upper=4.0) == -math.inf
        assert math.isfinite(log_posterior(_state(data, s=(1.0, 5.0, 1.0)), data))

    def test_transform_follows_the_linear_predictor(self):
        data = HierData(day_index=[0, 1, 1], location_index=[1, 0, 2], y=[0.0, 0.0, 0.0], n_days=2, n_locations=3)
        out = transform(_state(data, mu=1.0, s=(2.0, 0.5, 1.0), eta_d=[1.0, -1.0], eta_j=[0.0, 2.0, 4.0]), data)
        np.testing.assert_array_equal(out.z_d, [2.0, -2.0])
        np.testing.assert_array_equal(out.z_j, [0.0, 1.0, 2.0])
        np.testing.assert_array_equal(out.yhat, [4.0, -1.0, 1.0])


def _grid_posterior_means(data, upper, n=60):
    """E[mu] and E[s_eps] with mu and the effects integrated out analytically."""
    y, N = data.y, data.n
    a_d = np.eye(data.n_days)[data.day_index]
    a_j = np.eye(data.n_locations)[data.location_index]
    k_d, k_j = a_d @ a_d.T, a_j @ a_j.T
    grid = (np.arange(n) + 0.5) * upper / n
    s_j, s_eps = (g.ravel() for g in np.meshgrid(grid, grid, indexing="ij"))

    log_w, mu_hat, eps = [], [], []
    for s_d in grid:
        cov = s_eps[:, None, None] ** 2 * np.eye(N) + s_d**2 * k_d + s_j[:, None, None] ** 2 * k_j
        inv = np.linalg.inv(cov)
        _, logdet = np.linalg.slogdet(cov)
        ones = inv.sum(axis=(1, 2))
        b = inv @ y
        b1 = b.sum(axis=1)
        quad = b @ y - b1**2 / ones
        log_w.append(-0.5 * logdet - 0.5 * np.log(ones) - 0.5 * quad)
        mu_hat.append(b1 / ones)
        eps.append(s_eps)
    log_w = np.concatenate(log_w)
    w = np.exp(log_w - log_w.max())
    w /= w.sum()
    return float(w @ np.concatenate(mu_hat)), float(w @ np.concatenate(eps))


class TestSampler:
    def test_requires_observations(self):
        data = HierData(day_index=[], location_index=[], y=[], n_days=2, n_locations=2)
        with pytest.raises(DataError):
            run_mcmc(data, SamplerConfig(chains=2, iterations=10))

    def test_default_bound_scales_with_data(self):
        data = HierData(day_index=[0, 0], location_index=[0, 0], y=[1.0, 3.0], n_days=1, n_locations=1)
        assert default_sigma_upper(data) == pytest.approx(1000.0)

    @pytest.mark.parametrize("backend", ["gibbs", "mwg"])
    def test_shapes_identities_and_determinism(self, backend):
        data = _crossed(3, 4, 2, 1.0, [0.2, 0.0, -0.2], [0.3, -0.1, 0.0, -0.2], 0.3, seed=1)
        cfg = SamplerConfig(backend=backend, chains=3, iterations=300, seed=77)
        a, b = run_mcmc(data, cfg), run_mcmc(data, cfg)

        assert a.mu.shape == (3, 150)
        assert a.eta_d.shape == (3, 150, 3) and a.eta_j.shape == (3, 150, 4)
        assert np.all(np.isfinite(a.lp))
        for name in ("mu", "s_d", "s_j", "s_eps", "eta_d", "eta_j", "lp"):
            np.testing.assert_array_equal(getattr(a, name), getattr(b, name))

        np.testing.assert_array_equal(a.z_d, a.s_d[..., None] * a.eta_d)
        yhat = a.yhat(data)
        np.testing.assert_allclose(
            yhat - a.mu[..., None] - a.z_d[..., data.day_index] - a.z_j[..., data.location_index], 0.0, atol=1e-12
        )
        assert np.all(a.s_eps > 0) and np.all(a.s_d > 0) and np.all(a.s_j > 0)

        other = run_mcmc(data, cfg.model_copy(update={"seed": 78}))
        assert not np.array_equal(other.mu, a.mu)

    def test_threaded_chains_match_sequential(self):
        data = _crossed(2, 3, 3, 0.0, [0.1, -0.1], [0.2, 0.0, -0.2], 0.4, seed=2)
        cfg = SamplerConfig(chains=2, iterations=200, seed=5)
        np.testing.assert_array_equal(
            run_mcmc(data, cfg).mu, run_mcmc(data, cfg.model_copy(update={"workers": 2})).mu
        )

    def test_mwg_reports_acceptance(self):
        data = _crossed(3, 4, 3, 1.0, [0.2, 0.0, -0.2], [0.3, -0.1, 0.0, -0.2], 0.3, seed=3)
        draws = run_mcmc(data, SamplerConfig(backend="metropolis-within-gibbs", chains=2, iterations=2000, seed=9))
        assert draws.backend == "mwg"
        rates = draws.sampler_info["acceptance"][0]
        assert 0.1 < rates["mu"][0] < 0.9
        assert all(0.05 < r < 0.95 for r in rates["eta_j"])
        assert all(0.05 < r < 0.95 for r in rates["rescale"])

    def test_non_finite_log_posterior_aborts_with_dump(self):
        data = _crossed(2, 2, 2, 0.0, [0.0, 0.0], [0.0, 0.0], 1.0, seed=4)
        with patch("src.hier.log_posterior", return_value=float("nan")):
            with pytest.raises(SamplingError) as err:
                run_mcmc(data, SamplerConfig(chains=2, iterations=20, seed=1))
        assert err.value.dump["chain"] == 0
        assert "state" in err.value.dump
        assert err.value.exit_code == 4

    def test_zero_variance_data_warns(self, caplog):
        data = HierData(day_index=[0, 1, 0, 1], location_index=[0, 0, 1, 1], y=[2.0] * 4, n_days=2, n_locations=2)
        with caplog.at_level(logging.WARNING, logger="hiercast.hier"):
            try:
                run_mcmc(data, SamplerConfig(chains=2, iterations=20, seed=1))
            except InferenceError:
                pass
        assert "zero variance" in caplog.text

    def test_gibbs_matches_grid_integration(self):
        rng = np.random.default_rng(2024)
        d = np.array([0, 0, 1, 1, 0, 0, 1, 1])
        j = np.array([0, 1, 0, 1, 0, 1, 0, 1])
        y = 10.0 + np.array([0.3, -0.3])[d] + np.array([0.5, -0.5])[j] + rng.normal(0.0, 0.4, size=8)
        data = HierData(day_index=d, location_index=j, y=y, n_days=2, n_locations=2)
        upper = 2.0

        mu_grid, eps_grid = _grid_posterior_means(data, upper)
        draws = run_mcmc(data, SamplerConfig(chains=4, iterations=12000, warmup=2000, seed=11, sigma_upper=upper))
        assert draws.mu.mean() == pytest.approx(mu_grid, rel=0.02)
        assert draws.s_eps.mean() == pytest.approx(eps_grid, rel=0.05)

    def test_backends_agree(self):
        data = _crossed(4, 6, 3, 2.0, [0.4, -0.2, 0.1, -0.3], [0.6, -0.5, 0.2, 0.9, -0.7, 0.0], 0.5, seed=6)
        base = SamplerConfig(chains=4, iterations=20000, warmup=4000, seed=3, sigma_upper=3.0)
        gibbs = posterior_summary(run_mcmc(data, base)).set_index("parameter")
        mwg = posterior_summary(run_mcmc(data, base.model_copy(update={"backend": "mwg"}))).set_index("parameter")

        diff = (gibbs["mean"] - mwg["mean"]).abs()
        mcse = np.sqrt(gibbs["se_mean"] ** 2 + mwg["se_mean"] ** 2)
        assert len(diff) == 4 + 4 + 6
        assert (diff <= 4 * mcse).all()
        assert (diff <= 3 * mcse).mean() >= 0.9

    def test_recovers_truth_across_seeds(self):
        covered, total = 0, 0
        for seed in range(20):
            rng = np.random.default_rng(1000 + seed)
            z_d, z_j = rng.normal(0, 0.2, size=7), rng.normal(0, 0.3, size=49)
            data = _crossed(7, 49, 20, 1.0, z_d, z_j, 0.25, seed=seed)
            draws = run_mcmc(data, SamplerConfig(chains=2, iterations=1000, seed=seed))
            truth = np.concatenate([[1.0], z_d, z_j])
            post = np.concatenate(
                [draws.mu.reshape(-1, 1), draws.z_d.reshape(-1, 7), draws.z_j.reshape(-1, 49)], axis=1
            )
            covered += int(np.sum(np.abs(post.mean(axis=0) - truth) <= 3 * post.std(axis=0)))
            total += len(truth)
        assert covered / total >= 0.95

    def test_posterior_contracts_with_data(self):
        sds = []
        for n in (100, 1000, 10000):
            rng = np.random.default_rng(n)
            d, j = rng.integers(0, 7, size=n), rng.integers(0, 10, size=n)
            data = HierData(day_index=d, location_index=j, y=1.0 + rng.normal(0, 0.5, size=n),
                            n_days=7, n_locations=10)
            draws = run_mcmc(data, SamplerConfig(chains=2, iterations=2000, seed=17))
            sds.append(draws.mu.std())
        for a, b in zip(sds, sds[1:]):
            assert math.sqrt(10) / 2 <= a / b <= 2 * math.sqrt(10)


def _reference_scale_data(seed=0):
    truth = reference_regime()
    rng = np.random.default_rng(seed)
    n = 4302
    d = rng.integers(0, 7, size=n)
    j = np.arange(n) % 49
    y = truth.mu + np.asarray(truth.day_effects)[d] + np.asarray(truth.location_effects)[j]
    y = y + rng.normal(0.0, truth.sigma_eps, size=n)
    return HierData(day_index=d, location_index=j, y=y, n_days=7, n_locations=49)


class TestReferenceScale:
    """Seven weekdays, 49 locations and about 4300 location-days."""

    def _run(self, cfg):
        data = _reference_scale_data()
        started = time.perf_counter()
        draws = run_mcmc(data, cfg)
        per_chain = (time.perf_counter() - started) / cfg.chains
        return diagnostics(draws), per_chain

    def test_gibbs_converges_within_a_minute_per_chain(self):
        report, per_chain = self._run(SamplerConfig(chains=4, iterations=4000, seed=2021))
        assert len(report.parameters) == 4 + 7 + 49
        assert report.flagged == []
        assert max(p.r_hat for p in report.parameters) < 1.01
        assert per_chain < 60

    def test_mwg_converges_on_group_scales(self):
        cfg = SamplerConfig(backend="mwg", chains=4, iterations=12000, warmup=4000, seed=2021)
        report, per_chain = self._run(cfg)
        r_hat = {p.name: p.r_hat for p in report.parameters}
        assert len(r_hat) == 60
        assert r_hat["s_d"] < 1.01 and r_hat["s_j"] < 1.01
        assert max(r_hat.values()) < 1.01
        assert per_chain < 60

    def test_rescale_move_keeps_group_effects(self):
        data = _reference_scale_data()
        chain = MetropolisWithinGibbsChain(data, default_sigma_upper(data), np.random.default_rng(5), 0)
        eta = np.random.default_rng(6).standard_normal(49)
        moved = 0
        for _ in range(200):
            s, shrunk = chain._rescale(0.33, eta, 1)
            np.testing.assert_allclose(s * shrunk, 0.33 * eta, rtol=1e-12)
            moved += s != 0.33
        assert moved > 0
