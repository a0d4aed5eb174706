"""Parametric spectral densities and pair correlation functions.

All families are isotropic, so every quantity is computed from the squared
frequency norm ``w2 = |omega|^2``. Spectral densities use the convention

    f(omega) = (2 pi)^{-d} [lambda + lambda^2 int (g(x) - 1) exp(-i x.omega) dx],

so ``f`` tends to ``(2 pi)^{-d} lambda`` at high frequency.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special

from ..fourier import PanelRule, radial_transform

__all__ = [
    "SpectralModel",
    "Poisson",
    "Thomas",
    "Matern",
    "GDPP",
    "HawkesExp",
    "LGCPExp",
    "FAMILIES",
    "parse_model",
    "make_model",
]


class SpectralModel:
    """Base class: a parameter vector plus a dimension.

    Subclasses set ``family`` and ``param_names`` and implement ``_f`` (and
    ``_grad``/``_hess`` when a closed form exists).
    """

    family = ""
    param_names: tuple = ()
    dims = (1, 2, 3)

    def __init__(self, *params, dim: int = 2):
        if len(params) != len(self.param_names):
            raise ValueError(f"{self.family} takes parameters {self.param_names}")
        if dim not in self.dims:
            raise ValueError(f"{self.family} is defined for d in {self.dims}, got d={dim}")
        self.theta = np.array(params, dtype=float)
        self.theta.setflags(write=False)
        self.dim = int(dim)
        if not np.all(np.isfinite(self.theta)):
            raise ValueError("parameters must be finite")
        self._validate()

    def _validate(self):
        pass

    @property
    def c(self) -> float:
        return (2 * np.pi) ** (-self.dim)

    @property
    def params(self) -> dict:
        return dict(zip(self.param_names, self.theta.tolist()))

    def with_params(self, theta) -> "SpectralModel":
        return type(self)(*np.asarray(theta, dtype=float), dim=self.dim)

    def __repr__(self):
        args = ",".join(f"{k}={v:.6g}" for k, v in self.params.items())
        return f"{self.family}:{args}"

    def __eq__(self, other):
        return type(self) is type(other) and self.dim == other.dim and np.array_equal(self.theta, other.theta)

    def __hash__(self):
        return hash((self.family, self.dim, self.theta.tobytes()))

    @property
    def intensity(self) -> float:
        raise NotImplementedError

    @staticmethod
    def _w2(omega, dim):
        omega = np.asarray(omega, dtype=float)
        if dim == 1 and (omega.ndim == 0 or omega.shape[-1] != 1):
            return omega**2
        return np.sum(omega**2, axis=-1)

    def spectral_density(self, omega) -> np.ndarray:
        """``f_theta`` at frequencies of shape ``(..., d)``."""
        return self._f(self._w2(omega, self.dim))

    def gradient(self, omega) -> np.ndarray:
        """``d f / d theta``, shape ``(..., p)``."""
        return self._grad(self._w2(omega, self.dim))

    def hessian(self, omega) -> np.ndarray:
        """``d^2 f / d theta^2``, shape ``(..., p, p)``."""
        return self._hess(self._w2(omega, self.dim))

    def _grad(self, w2):
        raise NotImplementedError(f"no analytic gradient for {self.family}")

    def _hess(self, w2):
        raise NotImplementedError(f"no analytic Hessian for {self.family}")

    def pcf(self, r) -> np.ndarray:
        """``g(r) - 1`` at distances ``r``."""
        raise NotImplementedError(f"pair correlation not available for {self.family}")

    @property
    def has_gradient(self) -> bool:
        return type(self)._grad is not SpectralModel._grad


def _stack(cols):
    return np.stack(np.broadcast_arrays(*cols), axis=-1)


def _stack2(rows):
    return np.stack([_stack(r) for r in rows], axis=-2)


class Poisson(SpectralModel):
    """Homogeneous Poisson process of intensity ``lambda``."""

    family = "poisson"
    param_names = ("lambda",)

    def _validate(self):
        if not self.theta[0] > 0:
            raise ValueError("poisson needs lambda > 0")

    @property
    def intensity(self):
        return float(self.theta[0])

    def _f(self, w2):
        return np.full(np.shape(w2), self.c * self.theta[0])

    def _grad(self, w2):
        return np.full(np.shape(w2) + (1,), self.c)

    def _hess(self, w2):
        return np.zeros(np.shape(w2) + (1, 1))

    def pcf(self, r):
        return np.zeros(np.shape(r))


class Thomas(SpectralModel):
    """Thomas cluster process: Poisson(kappa) parents, Poisson(alpha) offspring
    displaced by an isotropic Gaussian with variance ``sigma2`` per coordinate."""

    family = "thomas"
    param_names = ("kappa", "alpha", "sigma2")

    def _validate(self):
        if not np.all(self.theta > 0):
            raise ValueError("thomas needs kappa, alpha, sigma2 > 0")

    @property
    def intensity(self):
        return float(self.theta[0] * self.theta[1])

    def _f(self, w2):
        k, a, s2 = self.theta
        return self.c * k * a * (1 + a * np.exp(-s2 * w2))

    def _grad(self, w2):
        k, a, s2 = self.theta
        c, E = self.c, np.exp(-s2 * np.asarray(w2))
        return _stack([c * a * (1 + a * E), c * k * (1 + 2 * a * E), -c * k * a**2 * w2 * E])

    def _hess(self, w2):
        k, a, s2 = self.theta
        w2 = np.asarray(w2)
        c, E = self.c, np.exp(-s2 * w2)
        ka = c * (1 + 2 * a * E)
        ks = -c * a**2 * w2 * E
        aa = 2 * c * k * E
        as_ = -2 * c * k * a * w2 * E
        ss = c * k * a**2 * w2**2 * E
        return _stack2([[0.0 * E, ka, ks], [ka, aa, as_], [ks, as_, ss]])

    def pcf(self, r):
        k, _, s2 = self.theta
        r = np.asarray(r, dtype=float)
        return (4 * np.pi * s2) ** (-self.dim / 2) / k * np.exp(-(r**2) / (4 * s2))


class Matern(SpectralModel):
    """Matern cluster process: offspring uniform in a ball of radius ``r``."""

    family = "matern"
    param_names = ("kappa", "alpha", "r")

    def _validate(self):
        if not np.all(self.theta > 0):
            raise ValueError("matern needs kappa, alpha, r > 0")

    @property
    def intensity(self):
        return float(self.theta[0] * self.theta[1])

    def _ball(self, z):
        """Ball-kernel transform ``F(z)`` and its first two derivatives."""
        nu = self.dim / 2
        cst = special.gamma(nu + 1) * 2**nu
        z = np.asarray(z, dtype=float)
        small = z < 1e-6
        zz = np.where(small, 1.0, z)
        jn, jn1 = special.jv(nu, zz), special.jv(nu + 1, zz)
        zp = zz**-nu
        F = cst * zp * jn
        F1 = -cst * zp * jn1
        F2 = -cst * zp * (jn - (2 * nu + 1) / zz * jn1)
        m = self.dim + 2
        F = np.where(small, 1 - z**2 / (2 * m), F)
        F1 = np.where(small, -z / m, F1)
        F2 = np.where(small, -1.0 / m, F2)
        return F, F1, F2

    def _f(self, w2):
        k, a, r = self.theta
        F, _, _ = self._ball(r * np.sqrt(w2))
        return self.c * k * a * (1 + a * F**2)

    def _grad(self, w2):
        k, a, r = self.theta
        w = np.sqrt(np.asarray(w2, dtype=float))
        F, F1, _ = self._ball(r * w)
        c = self.c
        return _stack([c * a * (1 + a * F**2), c * k * (1 + 2 * a * F**2), c * k * a**2 * 2 * F * F1 * w])

    def _hess(self, w2):
        k, a, r = self.theta
        w = np.sqrt(np.asarray(w2, dtype=float))
        F, F1, F2 = self._ball(r * w)
        c = self.c
        dr = 2 * F * F1 * w
        ka = c * (1 + 2 * a * F**2)
        kr = c * a**2 * dr
        aa = 2 * c * k * F**2
        ar = 2 * c * k * a * dr
        rr = c * k * a**2 * 2 * w**2 * (F1**2 + F * F2)
        return _stack2([[0.0 * F, ka, kr], [ka, aa, ar], [kr, ar, rr]])


class GDPP(SpectralModel):
    """Determinantal process with Gaussian kernel ``lambda exp(-|x|^2 / rho2)``.

    Exists iff ``rho2 <= 1 / (pi lambda^{2/d})``.
    """

    family = "gdpp"
    param_names = ("lambda", "rho2")

    def _validate(self):
        lam, s = self.theta
        if not (lam > 0 and s > 0):
            raise ValueError("gdpp needs lambda > 0 and rho2 > 0")
        if s > self.rho2_max(lam, self.dim) * (1 + 1e-12):
            raise ValueError(
                f"gdpp existence violated: rho2={s:g} exceeds 1/(pi lambda^(2/d))={self.rho2_max(lam, self.dim):g}"
            )

    @staticmethod
    def rho2_max(lam: float, dim: int) -> float:
        return 1.0 / (np.pi * lam ** (2.0 / dim))

    @property
    def intensity(self):
        return float(self.theta[0])

    def _P(self, w2):
        s = self.theta[1]
        return (np.pi * s / 2) ** (self.dim / 2) * np.exp(-s * np.asarray(w2) / 8)

    def _f(self, w2):
        lam = self.theta[0]
        return self.c * (lam - lam**2 * self._P(w2))

    def _grad(self, w2):
        lam, s = self.theta
        P = self._P(w2)
        dP = P * (self.dim / (2 * s) - np.asarray(w2) / 8)
        return _stack([self.c * (1 - 2 * lam * P), -self.c * lam**2 * dP])

    def _hess(self, w2):
        lam, s = self.theta
        d, c = self.dim, self.c
        P = self._P(w2)
        q = d / (2 * s) - np.asarray(w2) / 8
        dP = P * q
        d2P = dP * q - P * d / (2 * s**2)
        ls = -2 * c * lam * dP
        return _stack2([[-2 * c * P, ls], [ls, -c * lam**2 * d2P]])

    def pcf(self, r):
        r = np.asarray(r, dtype=float)
        return -np.exp(-2 * r**2 / self.theta[1])


class HawkesExp(SpectralModel):
    """Linear Hawkes process on the line with kernel ``a exp(-beta t)``, t > 0.

    Stationary intensity ``lambda = nu beta / (beta - a)``.
    """

    family = "hawkes_exp"
    param_names = ("nu", "a", "beta")
    dims = (1,)

    def __init__(self, *params, dim: int = 1):
        super().__init__(*params, dim=dim)

    def _validate(self):
        nu, a, b = self.theta
        if not (nu > 0 and 0 < a < b):
            raise ValueError("hawkes_exp needs nu > 0 and 0 < a < beta")

    @property
    def intensity(self):
        nu, a, b = self.theta
        return float(nu * b / (b - a))

    def _f(self, w2):
        a, b = self.theta[1:]
        return self.intensity / (2 * np.pi) * (b**2 + w2) / ((b - a) ** 2 + w2)

    def _glog(self, w2):
        nu, a, b = self.theta
        w2 = np.asarray(w2, dtype=float)
        u = b - a
        P, Q = b**2 + w2, u**2 + w2
        return _stack([1 / nu + 0 * w2, 1 / u + 2 * u / Q, 1 / b - 1 / u + 2 * b / P - 2 * u / Q])

    def _grad(self, w2):
        return self._f(w2)[..., None] * self._glog(w2)

    def _hess(self, w2):
        nu, a, b = self.theta
        w2 = np.asarray(w2, dtype=float)
        u = b - a
        P, Q = b**2 + w2, u**2 + w2
        z = 0 * w2
        aa = 1 / u**2 + 2 * (u**2 - w2) / Q**2
        ab = -1 / u**2 + 2 * (w2 - u**2) / Q**2
        bb = -1 / b**2 + 1 / u**2 + 2 * (w2 - b**2) / P**2 - 2 * (w2 - u**2) / Q**2
        H = _stack2([[-1 / nu**2 + z, z, z], [z, aa, ab], [z, ab, bb]])
        g = self._glog(w2)
        return self._f(w2)[..., None, None] * (H + g[..., :, None] * g[..., None, :])


class LGCPExp(SpectralModel):
    """Log-Gaussian Cox process with log-field covariance ``s2 exp(-|x| / phi)``.

    The spectrum has no closed form; the radial transform of ``exp(R) - 1`` is
    evaluated with a fixed composite Gauss-Legendre rule and cached per norm.
    """

    family = "lgcp_exp"
    param_names = ("mu", "s2", "phi")

    def __init__(self, *params, dim: int = 2, rule: PanelRule | None = None):
        super().__init__(*params, dim=dim)
        self._rule = rule
        self._cache = {}

    def with_params(self, theta):
        return type(self)(*np.asarray(theta, dtype=float), dim=self.dim, rule=self._rule)

    def _validate(self):
        _, s2, phi = self.theta
        if not (s2 >= 0 and phi > 0):
            raise ValueError("lgcp_exp needs s2 >= 0 and phi > 0")

    @property
    def intensity(self):
        mu, s2, _ = self.theta
        return float(math.exp(mu + s2 / 2))

    def pcf(self, r):
        _, s2, phi = self.theta
        return np.expm1(s2 * np.exp(-np.asarray(r, dtype=float) / phi))

    def _rule_for(self):
        if self._rule is None:
            # integrand decays like s2 exp(-r/phi); keep 60 correlation lengths
            phi = self.theta[2]
            self._rule = PanelRule(rmax=60.0 * phi, width=0.05 * phi, order=20)
        return self._rule

    def excess_transform(self, w) -> np.ndarray:
        """``int (exp(R(x)) - 1) exp(-i x.w) dx`` at norms ``w``."""
        w = np.asarray(w, dtype=float)
        flat = w.ravel()
        missing = np.array(sorted({x for x in flat.tolist() if x not in self._cache}))
        if missing.size:
            vals = radial_transform(self.pcf, missing, self.dim, self._rule_for())
            self._cache.update(zip(missing.tolist(), vals.tolist()))
        return np.array([self._cache[x] for x in flat.tolist()]).reshape(w.shape)

    def _f(self, w2):
        lam = self.intensity
        return self.c * (lam + lam**2 * self.excess_transform(np.sqrt(w2)))

    def gradient(self, omega):
        raise NotImplementedError("gradient unavailable for quadrature-defined spectrum")

    def hessian(self, omega):
        raise NotImplementedError("Hessian unavailable for quadrature-defined spectrum")

    @property
    def has_gradient(self) -> bool:
        return False


FAMILIES = {cls.family: cls for cls in (Poisson, Thomas, Matern, GDPP, HawkesExp, LGCPExp)}

_ALIASES = {"lam": "lambda"}


def make_model(family: str, params: dict, dim: int = 2) -> SpectralModel:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    cls = FAMILIES[family]
    params = {_ALIASES.get(k, k): v for k, v in params.items()}
    missing = [p for p in cls.param_names if p not in params]
    extra = [p for p in params if p not in cls.param_names]
    if missing or extra:
        raise ValueError(f"{family} expects parameters {cls.param_names}; missing {missing}, unexpected {extra}")
    if cls is HawkesExp:
        dim = 1
    return cls(*(float(params[p]) for p in cls.param_names), dim=dim)


def parse_model(text: str, dim: int = 2) -> SpectralModel:
    """Parse ``family:key=value,...``, e.g. ``thomas:kappa=0.2,alpha=10,sigma2=0.25``."""
    family, _, rest = text.strip().partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise ValueError(f"bad parameter {item!r} in model {text!r}")
        if key.strip() == "dim":
            dim = int(value)
            continue
        params[key.strip()] = float(value)
    return make_model(family.strip(), params, dim)
