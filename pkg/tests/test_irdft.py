import math

import numpy as np
import pytest
from scipy import integrate

from pointspectra import (
    IntensityField, PointPattern, Taper, Thomas, Window, dft, ir_dft, ir_periodogram, ir_psd, periodogram,
    simulate, simulate_inhomogeneous_poisson,
)
from pointspectra.irdft import ir_moment

from conftest import random_pattern

RAMP = IntensityField(lambda u: 1.5 + u[:, 0], lower_bound=1.0, upper_bound=2.0)


def test_constant_intensity_reduction(rng):
    p = simulate(Thomas(0.2, 10, 0.25), Window.cube(20, 2), seed=1)
    h = Taper.smooth()
    lam = IntensityField.constant(2.0)
    om = rng.uniform(-3, 3, (20, 2))
    np.testing.assert_array_equal(ir_dft(p, h, lam, om), dft(p, h, om) / 2)
    np.testing.assert_allclose(ir_periodogram(p, h, lam, om), periodogram(p, h, om, intensity=2.0) / 4,
                               rtol=1e-13, atol=1e-18)


def test_empty_even_and_errors(rng):
    h = Taper.smooth()
    empty = PointPattern(Window.cube(10, 2), np.empty((0, 2)))
    assert ir_dft(empty, h, RAMP, np.array([1.0, 2.0])) == 0
    p = random_pattern(rng, n=40)
    om = np.array([[0.7, -0.2], [-0.7, 0.2]])
    I = ir_periodogram(p, h, RAMP, om)
    assert I[0] == pytest.approx(I[1], rel=1e-12)
    bad = IntensityField(lambda u: u[:, 0], lower_bound=0.1)
    with pytest.raises(ValueError, match="not positive"):
        ir_dft(p, h, bad, om)
    with pytest.raises(ValueError):
        IntensityField(lambda u: u, lower_bound=0.0)


def test_ir_moment_against_separable_quadrature():
    h = Taper.smooth(0.1)
    x, _ = integrate.quad(lambda t: h.profile(t) ** 2 / (1.5 + t), -0.5, 0.5, points=[-0.4, 0.4], epsabs=1e-13)
    assert ir_moment(h, RAMP, 2) == pytest.approx(x * h.moment1d(2), rel=1e-8)
    assert ir_moment(h, IntensityField.constant(4.0), 3) == pytest.approx(h.moment(2, 3) / 4)


def test_psd_poisson_constant():
    h = Taper.smooth()
    om = np.array([[0.0, 0.0], [1.0, 3.0]])
    v = ir_psd(None, h, RAMP, om)
    expect = ir_moment(h, RAMP, 2) / h.moment(2, 2) / (2 * np.pi) ** 2
    np.testing.assert_allclose(v, expect)
    assert np.all(v > 0)


def test_psd_stationary_thomas():
    """Constant intensity lambda and ell2 = g - 1 reduce to f / lambda^2."""
    m = Thomas(0.2, 10, 0.25)
    lam = IntensityField.constant(m.intensity)
    om = np.array([[1.0, 1.0], [0.0, 0.5], [-1.0, -1.0]])
    got = ir_psd(m.pcf, Taper.uniform(), lam, om)
    np.testing.assert_allclose(got, m.spectral_density(om) / m.intensity**2, atol=1e-4 * got.max(), rtol=1e-6)
    assert got[0] == pytest.approx(got[2])


def test_inhomogeneous_simulator_mean():
    w = Window.cube(20, 2)
    n = np.array([len(simulate_inhomogeneous_poisson(RAMP, w, seed=(2, i))) for i in range(300)])
    assert abs(n.mean() - 600) < 3 * math.sqrt(600 / 300)
    with pytest.raises(ValueError, match="upper bound"):
        simulate_inhomogeneous_poisson(IntensityField(lambda u: 1 + 0 * u[:, 0], 1.0), w)
    # points are denser on the right half, 1.75 vs 1.25 on average
    xs = np.concatenate([simulate_inhomogeneous_poisson(RAMP, w, seed=(3, i)).points[:, 0] for i in range(50)])
    assert np.mean(xs > 0) == pytest.approx(1.75 / 3, abs=0.02)


@pytest.mark.slow
def test_ir_periodogram_mean_matches_psd():
    w = Window.cube(20, 2)
    h = Taper.smooth()
    om = np.array([[np.pi, np.pi], [np.pi / 2, 0.0], [2.0, -1.0]])
    vals = np.array([ir_periodogram(simulate_inhomogeneous_poisson(RAMP, w, seed=(4, i)), h, RAMP, om)
                     for i in range(1000)])
    target = ir_psd(None, h, RAMP, om)
    se = vals.std(axis=0, ddof=1) / math.sqrt(len(vals))
    assert np.all(np.abs(vals.mean(axis=0) - target) < 3 * se)
