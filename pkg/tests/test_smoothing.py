import numpy as np
import pytest

from pointspectra import DomainSpec, PeriodogramField, Poisson, Taper, Window, build_grid, ksde, periodogram_grid, simulate, smooth_field
from pointspectra.smoothing import SmoothingKernel, default_bandwidth, triangular


def test_default_bandwidth():
    assert default_bandwidth(Window.cube(40, 2)) == pytest.approx(0.29240, abs=5e-6)
    assert default_bandwidth(Window.cube(10, 2)) == pytest.approx(0.46416, abs=5e-6)
    assert default_bandwidth(Window.cube(1, 2)) == 1.0


def test_kernel_integrates_to_one():
    x = np.linspace(-1, 1, 200_001)
    assert np.trapezoid(triangular(x), x) == pytest.approx(1.0, abs=1e-9)
    k = SmoothingKernel(0.3)
    g = np.linspace(-0.2, 0.2, 801)
    X, Y = np.meshgrid(g, g, indexing="ij")
    vals = k(np.stack([X, Y], -1))
    assert np.trapezoid(np.trapezoid(vals, g, axis=1), g) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        SmoothingKernel(0.0)


def _field(rng, A=10.0, d=2, d1=3.0):
    w = Window.cube(A, d)
    g = build_grid(w, DomainSpec(0.0, d1))
    return PeriodogramField(g, rng.exponential(size=len(g)), w)


def test_ksde_brute_force(rng):
    f = _field(rng)
    om = rng.uniform(-2.5, 2.5, size=(25, 2))
    for b in (0.7, 1.3):
        got = ksde(f, om, b)
        W = np.prod(triangular((om[:, None, :] - f.frequencies[None]) / b), axis=-1)
        ref = (W @ f.values) / W.sum(axis=1)
        np.testing.assert_allclose(got, ref, rtol=1e-12)


def test_ksde_brute_force_3d(rng):
    f = _field(rng, A=6.0, d=3, d1=2.5)
    om = rng.uniform(-2, 2, size=(10, 3))
    got = ksde(f, om, 1.5)
    W = np.prod(triangular((om[:, None, :] - f.frequencies[None]) / 1.5), axis=-1)
    np.testing.assert_allclose(got, (W @ f.values) / W.sum(axis=1), rtol=1e-12)


def test_ksde_constant_and_single_point(rng):
    f = _field(rng)
    c = f.with_values(np.full(len(f.grid), 2.5))
    np.testing.assert_allclose(ksde(c, rng.uniform(-2, 2, (8, 2)), 0.9), 2.5)
    # kernel half-width below the lattice step: on-grid probes return their own ordinate
    step = 2 * np.pi / 10
    k = np.array([[3, -2], [0, 1]])
    om = step * k
    idx = [int(np.flatnonzero(np.all(f.grid.k == kk, axis=1))[0]) for kk in k]
    np.testing.assert_allclose(ksde(f, om, 1.5 * step), f.values[idx])


def test_ksde_empty_window(rng):
    f = _field(rng)
    step = 2 * np.pi / 10
    with pytest.raises(ValueError, match="bandwidth below grid resolution"):
        ksde(f, np.array([[step / 2, step / 2]]), 0.5 * step)
    with pytest.raises(ValueError, match="bandwidth below grid resolution"):
        ksde(f, np.array([[20.0, 0.0]]), 1.0)


def test_smooth_field_metadata():
    w = Window.cube(20, 2)
    p = simulate(Poisson(1.0), w, seed=1)
    f = periodogram_grid(p, Taper.smooth(), build_grid(w, DomainSpec(0.3, 3.0)))
    s = smooth_field(f, "auto")
    assert s.extra["bandwidth"] == repr(default_bandwidth(w))
    s = smooth_field(f, 1.0)
    assert np.all(s.values >= 0) and s.values.std() < f.values.std()
    with pytest.raises(ValueError):
        smooth_field(f, -1.0)
