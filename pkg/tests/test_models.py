import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate

from pointspectra import GDPP, HawkesExp, LGCPExp, Matern, Poisson, Thomas, make_model, parse_model
from pointspectra.fourier import PanelRule, radial_transform, radial_transform_quad

TWO_PI = 2 * np.pi


def test_frozen_values():
    # direct symbolic evaluation with exact constants
    assert Thomas(0.2, 10, 0.25).spectral_density(np.zeros(2)) == pytest.approx(22 / (4 * math.pi**2), rel=1e-15)
    # 22 / (4 pi^2) = 0.557266...; the rounded figure 0.55724 quoted elsewhere is off in the 5th digit
    om = np.array([[0.0, 0.0], [3.0, -7.0]])
    np.testing.assert_allclose(Poisson(0.5).spectral_density(om), 0.5 / (4 * math.pi**2), rtol=1e-15)
    assert Poisson(0.5).spectral_density(om)[0] == pytest.approx(0.012665, abs=5e-7)
    g = GDPP(1, 0.3025).spectral_density(np.zeros(2))
    assert g == pytest.approx((1 - math.pi * 0.3025 / 2) / (4 * math.pi**2), rel=1e-14)
    assert g == pytest.approx(0.013294, abs=5e-7)


def test_hawkes_against_general_form():
    """f = lambda / (2 pi) |1 - F(eta)(w)|^{-2} with F(eta)(w) = a / (beta + i w)."""
    m = HawkesExp(0.5, 0.5, 1.0)
    assert m.intensity == pytest.approx(1.0)
    w = np.array([0.0, 0.3, 1.0, 5.0, 40.0])
    general = m.intensity / TWO_PI / np.abs(1 - 0.5 / (1.0 + 1j * w)) ** 2
    np.testing.assert_allclose(m.spectral_density(w), general, rtol=1e-14)
    # the excess above the asymptote is lambda/(2 pi) a(2 beta - a)/((beta - a)^2 + w^2)
    assert m.spectral_density(0.0) - 1 / TWO_PI == pytest.approx(3 / TWO_PI)
    assert m.spectral_density(0.0) == pytest.approx(2 / math.pi)


@pytest.mark.parametrize("model", [
    Thomas(0.2, 10, 0.25, dim=1), Thomas(0.2, 10, 0.25), Thomas(0.5, 3, 0.4, dim=3),
    GDPP(1, 0.3025), GDPP(2, 0.05, dim=1), GDPP(1, 0.2, dim=3),
    LGCPExp(-0.5, 2, 1), LGCPExp(0.2, 1, 0.5, dim=1), LGCPExp(0.0, 0.5, 0.7, dim=3), Poisson(2.0),
])
def test_pcf_spectrum_duality(model):
    """f(w) - (2 pi)^{-d} lambda equals (2 pi)^{-d} lambda^2 F(g - 1)(w), by adaptive quadrature."""
    d = model.dim
    lam = model.intensity
    for w in (0.0, 0.7, 1.5, 3.0, 6.0):
        ref = (lam + lam**2 * radial_transform_quad(model.pcf, w, d, rmax=60.0)) / TWO_PI**d
        om = np.zeros(d)
        om[0] = w
        assert model.spectral_density(om) == pytest.approx(ref, rel=1e-8, abs=1e-13)


def test_thomas_duality_2d_quadrature():
    m = Thomas(0.2, 10, 0.25)
    om = np.array([1.0, 1.0])
    val, _ = integrate.dblquad(lambda y, x: m.pcf(math.hypot(x, y)) * math.cos(x + y), -8, 8, -8, 8,
                               epsabs=1e-12, epsrel=1e-12)
    ref = (m.intensity + m.intensity**2 * val) / TWO_PI**2
    assert m.spectral_density(om) == pytest.approx(ref, abs=1e-6)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_matern_ball_transform(d):
    """Transform of the uniform ball density against radial quadrature."""
    m = Matern(0.3, 4.0, 0.8, dim=d)
    vol = math.pi ** (d / 2) / math.gamma(d / 2 + 1) * 0.8**d
    for w in (0.0, 1e-7, 0.9, 4.0, 11.0):
        F = radial_transform_quad(lambda r: (r <= 0.8) / vol, w, d, rmax=0.8)
        om = np.zeros(d)
        om[-1] = w
        ref = 0.3 * 4.0 * (1 + 4.0 * F**2) / TWO_PI**d
        assert m.spectral_density(om) == pytest.approx(ref, rel=1e-9)


def _fd(fun, theta, i, rel=1e-6):
    h = rel * abs(theta[i])
    up, dn = np.array(theta, float), np.array(theta, float)
    up[i] += h
    dn[i] -= h
    return (fun(up) - fun(dn)) / (2 * h)


@pytest.mark.parametrize("model", [
    Poisson(0.7), Thomas(0.2, 10, 0.25), Thomas(0.3, 5, 0.1, dim=1), Matern(0.2, 10, 0.5),
    Matern(0.4, 3, 0.3, dim=3), GDPP(1, 0.3025), GDPP(1.5, 0.1, dim=1), HawkesExp(0.5, 0.5, 1.0),
])
def test_gradient_and_hessian_finite_differences(model):
    d = model.dim
    oms = np.array([[0.0] * d, [1.0] + [0.0] * (d - 1), [0.4 * (i + 1) for i in range(d)], [2.5] * d])
    if d == 1:
        oms = oms[:, 0]
    G = model.gradient(oms)
    H = model.hessian(oms)
    th = np.array(model.theta)
    for i in range(len(th)):
        fd = _fd(lambda t: model.with_params(t).spectral_density(oms), th, i)
        np.testing.assert_allclose(G[:, i], fd, rtol=1e-5, atol=1e-12)
        fd2 = _fd(lambda t: model.with_params(t).gradient(oms), th, i)
        np.testing.assert_allclose(H[:, :, i], fd2, rtol=1e-5, atol=1e-8 * np.abs(H).max())
    np.testing.assert_allclose(H, np.swapaxes(H, 1, 2))


def test_poisson_gradient_is_constant():
    np.testing.assert_allclose(Poisson(3.0).gradient(np.ones((4, 2)))[:, 0], TWO_PI**-2)


def test_lgcp_has_no_gradient():
    m = LGCPExp(-0.5, 2, 1)
    assert not m.has_gradient
    with pytest.raises(NotImplementedError, match="quadrature-defined"):
        m.gradient(np.zeros(2))


def test_lgcp_intensity_and_transform_rule():
    m = LGCPExp(-0.5, 2, 1)
    assert m.intensity == pytest.approx(math.exp(0.5))
    w = np.array([0.0, 0.3, 2.0, 9.0])
    fixed = radial_transform(m.pcf, w, 2, PanelRule())
    ref = [radial_transform_quad(m.pcf, x, 2) for x in w]
    np.testing.assert_allclose(fixed, ref, rtol=1e-10, atol=1e-12)


def test_gdpp_existence():
    lam = 1.0
    top = GDPP.rho2_max(lam, 2)
    assert top == pytest.approx(1 / math.pi)
    GDPP(lam, top)
    with pytest.raises(ValueError, match="existence"):
        GDPP(lam, top * 1.001)
    with pytest.raises(ValueError):
        GDPP(2.0, 0.2, dim=1)
    # at the bound f(0) stays strictly positive: (2 pi)^{-d} lambda (1 - 2^{-d/2})
    for d in (1, 2, 3):
        m = GDPP(1.3, GDPP.rho2_max(1.3, d), dim=d)
        assert m.spectral_density(np.zeros(d)) == pytest.approx(1.3 * (1 - 2 ** (-d / 2)) / TWO_PI**d)
        w = np.linspace(0, 20, 200)[:, None] * np.eye(d)[0]
        assert np.all(m.spectral_density(w) > 0)


def test_pcf_values():
    assert GDPP(1, 0.3025).pcf(0.0) == pytest.approx(-1.0)
    np.testing.assert_array_equal(Poisson(1).pcf([0.0, 2.0]), 0.0)
    with pytest.raises(NotImplementedError):
        Matern(1, 1, 1).pcf(0.5)


def test_asymptote_and_excess_sign():
    for m in (Thomas(0.2, 10, 0.25), GDPP(1, 0.3025)):
        tail = m.spectral_density(np.array([50.0, 0.0]))
        assert abs(tail - m.intensity / TWO_PI**2) < 1e-6 * m.intensity / TWO_PI**2
    assert Thomas(0.2, 10, 0.25).spectral_density(np.zeros(2)) > 10 / TWO_PI**2 * 0.2
    lg = LGCPExp(-0.5, 2, 1)
    assert lg.spectral_density(np.zeros(2)) > lg.intensity / TWO_PI**2
    assert GDPP(1, 0.3025).spectral_density(np.zeros(2)) < 1 / TWO_PI**2


@pytest.mark.parametrize("bad", [
    lambda: Thomas(0, 1, 1), lambda: Matern(1, -1, 1), lambda: HawkesExp(1, 2, 1),
    lambda: HawkesExp(1, 0.5, 1, dim=2), lambda: LGCPExp(0, -1, 1), lambda: Poisson(-1),
    lambda: Thomas(1, 1, 1, dim=4), lambda: Thomas(np.nan, 1, 1),
])
def test_invalid_parameters(bad):
    with pytest.raises(ValueError):
        bad()


def test_parse_and_repr():
    m = parse_model("thomas:kappa=0.2,alpha=10,sigma2=0.25")
    assert m == Thomas(0.2, 10, 0.25) and repr(m) == "thomas:kappa=0.2,alpha=10,sigma2=0.25"
    assert parse_model(repr(m)) == m
    assert parse_model("gdpp:lam=1,rho2=0.3025,dim=3").dim == 3
    assert parse_model("hawkes_exp:nu=0.5,a=0.5,beta=1").dim == 1
    assert make_model("poisson", {"lambda": 2}, 1).spectral_density(0.0) == pytest.approx(2 / TWO_PI)
    for bad in ("thomas:kappa=1", "foo:x=1", "thomas:kappa=1,alpha=2,sigma2", "poisson:lambda=1,x=2"):
        with pytest.raises(ValueError):
            parse_model(bad)
