import math

import numpy as np
import pytest
from scipy import integrate

from pointspectra import DomainSpec, PeriodogramField, Poisson, Taper, Thomas, Window, build_grid, periodogram_grid, simulate
from pointspectra.specmean import SpectralFunctional, evaluate_phi, spectral_mean_estimate, spectral_mean_true


def test_constant_phi_poisson():
    w = Window.cube(40, 2)
    dom = DomainSpec(np.pi / 10, 2 * np.pi)
    g = build_grid(w, dom)
    val = spectral_mean_true(Poisson(2.0), 1.0, g)
    area = (4 * np.pi) ** 2 - (np.pi / 5) ** 2
    cell = (2 * np.pi / 40) ** 2
    assert abs(val - 2.0 / (2 * np.pi) ** 2 * area) < 2.0 / (2 * np.pi) ** 2 * (8 * 4 * np.pi / (2 * np.pi / 40)) * cell
    assert spectral_mean_true(Poisson(2.0), 0.0, g) == 0


def _quad_annulus(fun, d0, d1):
    """Integral over the sup-norm annulus as the outer square minus the inner one."""
    big, _ = integrate.dblquad(lambda y, x: fun(x, y), -d1, d1, -d1, d1, epsabs=1e-12, epsrel=1e-10)
    small, _ = integrate.dblquad(lambda y, x: fun(x, y), -d0, d0, -d0, d0, epsabs=1e-12, epsrel=1e-10)
    return big - small


def test_thomas_riemann_against_quadrature():
    m = Thomas(0.2, 10, 0.25)
    g = build_grid(Window.cube(40, 2), DomainSpec(np.pi / 10, 2 * np.pi), 40)
    got = spectral_mean_true(m, lambda om: m.spectral_density(om), g)
    f = lambda x, y: m.spectral_density(np.array([x, y])) ** 2
    # the lattice sum is the midpoint rule on the union of cells centred at the
    # lattice points: |k|_inf from 2 to 40, i.e. sup-norm between 1.5 and 40.5 steps
    step = 2 * np.pi / 40
    ref = _quad_annulus(f, 1.5 * step, 40.5 * step)
    assert got == pytest.approx(ref, rel=1e-3)
    # the gap to the annulus itself is exactly the half-cell rims at both edges
    exact = _quad_annulus(f, np.pi / 10, 2 * np.pi)
    rims = _quad_annulus(f, 1.5 * step, 2 * step) + _quad_annulus(f, 40 * step, 40.5 * step)
    assert got - exact == pytest.approx(rims, rel=0.05)


def test_estimate_linearity_and_vector_phi(rng):
    w = Window.cube(10, 2)
    g = build_grid(w, DomainSpec(0.2, 3.0))
    f = PeriodogramField(g, rng.exponential(size=len(g)), w)
    p1, p2 = rng.normal(size=len(g)), rng.normal(size=len(g))
    lhs = spectral_mean_estimate(f, 2.0 * p1 - 3.5 * p2)
    rhs = 2.0 * spectral_mean_estimate(f, p1) - 3.5 * spectral_mean_estimate(f, p2)
    assert lhs == pytest.approx(rhs, rel=1e-13)
    vec = spectral_mean_estimate(f, np.stack([p1, p2], 1))
    np.testing.assert_allclose(vec, [spectral_mean_estimate(f, p1), spectral_mean_estimate(f, p2)])
    assert spectral_mean_estimate(f, 0.0) == 0
    assert spectral_mean_estimate(f, np.abs(p1)) >= 0
    sf = SpectralFunctional(lambda om: np.cos(om[:, 0]), g.domain)
    np.testing.assert_allclose(evaluate_phi(sf, g), np.cos(g.frequencies[:, 0]))
    with pytest.raises(ValueError):
        evaluate_phi(np.ones(3), g)


@pytest.mark.slow
def test_integrated_periodogram_mean_and_variance_scaling():
    m = Thomas(0.2, 10, 0.25)
    dom = DomainSpec(np.pi / 10, 2 * np.pi)
    h = Taper.smooth()
    out = {}
    for A, reps in ((20, 300), (40, 300)):
        w = Window.cube(A, 2)
        g = build_grid(w, dom)
        vals = np.array([spectral_mean_estimate(periodogram_grid(simulate(m, w, seed=(21, i)), h, g), 1.0)
                         for i in range(reps)])
        truth = spectral_mean_true(m, 1.0, g)
        out[A] = vals.var(ddof=1) * w.volume
        if A == 40:
            assert abs(vals.mean() - truth) < 3 * vals.std(ddof=1) / math.sqrt(reps)
    assert 1 / 1.5 < out[20] / out[40] < 1.5
