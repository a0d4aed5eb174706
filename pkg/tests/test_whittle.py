import math

import numpy as np
import pytest

from pointspectra import (
    GDPP, DomainSpec, LGCPExp, Matern, OptimizerConfig, PeriodogramField, PointPattern, Poisson, Taper, Thomas,
    Window, best_fit_oracle, build_grid, fit, fit_reduced_tcp, periodogram_grid, simulate, whittle_objective,
)
from pointspectra.whittle import DEFAULT_BOXES, fit_field, fit_reduced_field, spectral_divergence

D2PI = DomainSpec(np.pi / 10, 2 * np.pi)
D5PI = DomainSpec(np.pi / 10, 5 * np.pi)


def _exact_field(model, window, domain=D2PI):
    g = build_grid(window, domain)
    return PeriodogramField(g, model.spectral_density(g.frequencies), window, "exact", model.intensity)


def test_poisson_scan_minimum():
    w = Window.cube(20, 2)
    field = _exact_field(Poisson(1.7), w)
    lams = np.linspace(1.0, 2.5, 151)
    vals = [whittle_objective(field, "poisson", [x]) for x in lams]
    assert lams[int(np.argmin(vals))] == pytest.approx(1.7)
    f = Poisson(1.7).spectral_density(field.frequencies)
    assert whittle_objective(field, "poisson", [1.7]) == pytest.approx(np.sum(1 + np.log(f)))


def test_zero_field_and_sentinels():
    w = Window.cube(20, 2)
    g = build_grid(w, D2PI)
    zero = PeriodogramField(g, np.zeros(len(g)), w)
    f = Thomas(0.2, 10, 0.25).spectral_density(g.frequencies)
    assert whittle_objective(zero, "thomas", [0.2, 10, 0.25]) == pytest.approx(np.sum(np.log(f)))
    assert whittle_objective(zero, "thomas", [-1, 10, 0.25]) == np.inf
    assert whittle_objective(zero, "gdpp", [1.0, 0.5]) == np.inf  # existence violated
    assert whittle_objective(zero, "poisson", [1e-14]) == np.inf  # below the spectrum floor


@pytest.mark.parametrize("model,family", [
    (Thomas(0.2, 10, 0.25), "thomas"), (GDPP(1, 0.3025), "gdpp"), (Matern(0.2, 10, 0.5), "matern"),
    (Poisson(0.8), "poisson"),
])
def test_exact_spectrum_fixed_point(model, family):
    w = Window.cube(20, 2)
    res = best_fit_oracle(model, family, D2PI, w)
    np.testing.assert_allclose(res.theta, model.theta, rtol=1e-4)
    assert res.converged
    # the divergence at the truth is a lower bound for every other parameter
    assert spectral_divergence(model, family, model.theta, build_grid(w, D2PI)) <= res.objective + 1e-8


def test_hawkes_fixed_point():
    from pointspectra import HawkesExp
    m = HawkesExp(0.5, 0.5, 1.0)
    w = Window.cube(200, 1)
    res = best_fit_oracle(m, "hawkes_exp", DomainSpec(0.05, 2 * np.pi), w)
    np.testing.assert_allclose(res.theta, m.theta, rtol=1e-3)


def test_misspecified_oracle_table_values():
    truth = LGCPExp(-0.5, 2, 1)
    w = Window.cube(20, 2)
    a = best_fit_oracle(truth, "thomas", D2PI, w)
    b = best_fit_oracle(truth, "thomas", D5PI, w)
    np.testing.assert_allclose(a.theta, [0.31, 7.74, 0.18], atol=0.02)
    np.testing.assert_allclose(b.theta, [0.24, 7.37, 0.10], atol=0.02)
    assert a.implied_intensity == pytest.approx(2.43, abs=0.03)
    assert b.implied_intensity == pytest.approx(1.80, abs=0.03)
    assert a.implied_intensity > truth.intensity > 0 and abs(b.implied_intensity - truth.intensity) < 0.2


def test_fit_determinism_and_trace():
    w = Window.cube(20, 2)
    p = simulate(Thomas(0.2, 10, 0.25), w, seed=4)
    opt = OptimizerConfig(keep_trace=True)
    a = fit(p, "thomas", D2PI, Taper.smooth(), opt)
    b = fit(p, "thomas", D2PI, Taper.smooth(), opt)
    assert np.array_equal(a.theta, b.theta)
    lo, hi = DEFAULT_BOXES["thomas"]
    assert np.all(a.theta >= lo) and np.all(a.theta <= hi)
    assert all(a.objective <= v + 1e-9 for _, v in a.trace)
    d = a.to_dict()
    assert set(d["theta"]) == {"kappa", "alpha", "sigma2"} and "trace" in d
    assert a.intensity_hat > 0 and d["grid"]["spacing"] == 20


def test_fit_budget_exhausted():
    w = Window.cube(20, 2)
    p = simulate(Thomas(0.2, 10, 0.25), w, seed=4)
    res = fit(p, "thomas", D2PI, optimizer=OptimizerConfig(max_iterations=3, n_starts=1, polish=False))
    assert not res.converged and np.all(np.isfinite(res.theta))


def test_fit_errors():
    w = Window.cube(20, 2)
    with pytest.raises(ValueError, match="empty"):
        fit(PointPattern(w, np.empty((0, 2))), "poisson", D2PI)
    p = simulate(Poisson(1.0), w, seed=1)
    with pytest.raises(ValueError):
        fit(p, "lgcp_exp", D2PI)
    with pytest.raises(ValueError):
        fit(p, "nope", D2PI)
    with pytest.raises(ValueError):
        OptimizerConfig(method="bfgs")
    with pytest.raises(ValueError):
        fit(p, "poisson", D2PI, optimizer=OptimizerConfig(box=([1.0], [0.5])))


def test_gdpp_fit_respects_existence():
    w = Window.cube(20, 2)
    p = simulate(GDPP(1, 0.3025), w, seed=2)
    res = fit(p, "gdpp", D2PI)
    assert res.theta[1] <= GDPP.rho2_max(res.theta[0], 2) * (1 + 1e-12)


def test_reduced_fit():
    w = Window.cube(20, 2)
    p = simulate(Thomas(0.2, 10, 0.25), w, seed=6)
    field = periodogram_grid(p, Taper.smooth(), build_grid(w, D2PI))
    red = fit_reduced_field(field)
    full = fit_field(field, "thomas")
    assert red.implied_intensity == field.intensity
    assert red.full_theta[0] * red.full_theta[1] == pytest.approx(field.intensity, rel=1e-15)
    assert red.objective >= full.objective - 1e-9
    assert fit_reduced_tcp(p, D2PI).theta.tolist() == red.theta.tolist()


def test_reduced_oracle_values():
    truth = LGCPExp(-0.5, 2, 1)
    w = Window.cube(40, 2)
    a = best_fit_oracle(truth, "thomas", D2PI, w, reduced=True)
    assert a.implied_intensity == truth.intensity
    np.testing.assert_allclose(a.theta, [0.2138, 0.0911], atol=2e-3)


def test_objective_orders_truth_before_perturbation():
    """Truth beats kappa doubled in at least 95% of replicates."""
    m = Thomas(0.2, 10, 0.25)
    w = Window.cube(40, 2)
    g = build_grid(w, D2PI)
    wins = 0
    for i in range(200):
        field = periodogram_grid(simulate(m, w, seed=(31, i)), Taper.smooth(), g)
        wins += whittle_objective(field, "thomas", [0.2, 10, 0.25]) < whittle_objective(field, "thomas", [0.4, 10, 0.25])
    assert wins >= 190
