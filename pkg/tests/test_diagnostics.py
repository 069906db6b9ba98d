import numpy as np
import pytest

from src.diagnostics import RHAT_THRESHOLD, diagnostics, posterior_summary
from src.errors import InferenceError
from src.hier import HierData, PosteriorDraws, run_mcmc
from src.schema import DAY_NAMES, SamplerConfig


def _draws(chains, draws, n_days, n_locations, rng=None, constant=False, location_labels=()):
    shape = (chains, draws)
    if constant:
        fill = lambda *extra: np.ones(shape + extra)
    else:
        fill = lambda *extra: rng.normal(size=shape + extra)
    return PosteriorDraws(
        mu=fill(),
        s_d=np.abs(fill()) + 0.1,
        s_j=np.abs(fill()) + 0.1,
        s_eps=np.abs(fill()) + 0.1,
        eta_d=fill(n_days),
        eta_j=fill(n_locations),
        lp=fill(),
        iterations=2 * draws,
        warmup=draws,
        backend="gibbs",
        sigma_upper=10.0,
        day_labels=DAY_NAMES[:n_days],
        location_labels=tuple(location_labels) or tuple(range(1, n_locations + 1)),
    )


def test_single_chain_has_no_rhat():
    with pytest.raises(InferenceError):
        diagnostics(_draws(1, 100, 2, 2, rng=np.random.default_rng(0)))


def test_constant_chains_are_flagged():
    report = diagnostics(_draws(2, 100, 2, 3, constant=True))
    assert not report.converged
    assert set(report.flagged) == {p.name for p in report.parameters}
    assert all(p.r_hat is None for p in report.parameters)


def test_iid_draws_pass():
    report = diagnostics(_draws(4, 2000, 3, 4, rng=np.random.default_rng(1)))
    assert report.converged
    assert report.chains == 4 and report.draws_per_chain == 2000
    for p in report.parameters:
        assert 0.999 <= p.r_hat <= RHAT_THRESHOLD
        assert p.ess_bulk > 4000


def test_stuck_chain_is_flagged():
    draws = _draws(4, 500, 2, 2, rng=np.random.default_rng(2))
    draws.mu[0] += 5.0
    report = diagnostics(draws)
    assert "mu" in report.flagged
    assert not report.converged


def test_lp_summary_in_report():
    draws = _draws(2, 300, 2, 2, rng=np.random.default_rng(3))
    report = diagnostics(draws)
    assert report.lp_mean == pytest.approx(draws.lp.mean())
    assert report.lp_sd == pytest.approx(draws.lp.std(ddof=1))
    assert report.lp_se_mean > 0


def test_summary_has_one_row_per_parameter():
    summary = posterior_summary(_draws(2, 200, 7, 49, rng=np.random.default_rng(4)))
    assert len(summary) == 60
    assert list(summary["parameter"][:4]) == ["mu", "s_d", "s_j", "s_eps"]
    for column in ("mean", "se_mean", "sd", "2.5%", "25%", "50%", "75%", "97.5%", "n_eff", "Rhat"):
        assert column in summary.columns
    days = summary[summary["parameter"].str.startswith("z_d[")]
    assert list(days["label"]) == list(DAY_NAMES)
    assert summary.loc[summary["parameter"] == "z_j[48]", "label"].item() == "49"
    assert (summary["2.5%"] <= summary["50%"]).all() and (summary["50%"] <= summary["97.5%"]).all()


def test_summary_is_label_equivariant():
    rng = np.random.default_rng(5)
    draws = _draws(2, 200, 2, 5, rng=rng, location_labels=[11, 12, 13, 14, 15])
    perm = np.array([3, 0, 4, 1, 2])
    permuted = _draws(2, 200, 2, 5, rng=np.random.default_rng(5), location_labels=[14, 11, 15, 12, 13])
    permuted.eta_j = draws.eta_j[..., perm]

    a = posterior_summary(draws).set_index("label")
    b = posterior_summary(permuted).set_index("label")
    for label in ("11", "12", "13", "14", "15"):
        assert a.loc[label, "mean"] == pytest.approx(b.loc[label, "mean"], rel=1e-12)
        assert a.loc[label, "sd"] == pytest.approx(b.loc[label, "sd"], rel=1e-12)


def test_summary_of_fixed_seed_run_is_stable():
    rng = np.random.default_rng(6)
    d, j = rng.integers(0, 3, size=60), rng.integers(0, 4, size=60)
    data = HierData(day_index=d, location_index=j, y=rng.normal(1.0, 0.3, size=60), n_days=3, n_locations=4)
    cfg = SamplerConfig(chains=2, iterations=400, seed=10)
    first, second = run_mcmc(data, cfg), run_mcmc(data, cfg)
    assert first.lp.mean() == second.lp.mean()
    assert posterior_summary(first).equals(posterior_summary(second))
