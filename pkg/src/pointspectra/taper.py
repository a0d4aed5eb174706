"""Separable data tapers, their moments and Fourier transforms.

Two 1-D profiles are provided on ``[-1/2, 1/2]``:

* ``uniform``: ``h(t) = 1``;
* ``smooth(a)``: a plateau of height one joined to zero by ramps of width
  ``a`` of the form ``g(y) = y/a - sin(2 pi y/a)/(2 pi)``, where ``y`` is the
  distance to the nearest edge of the support.

A d-dimensional taper is the product of the 1-D profile over coordinates, so a
single :class:`Taper` serves every dimension.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .core import Window

__all__ = [
    "Taper",
    "taper_value",
    "taper_moment",
    "taper_ft",
    "H_n",
    "bias_factor",
    "fejer",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)
# closed-form ramp transform loses digits when s*a is near 0 or near 2*pi
_UNSAFE_BAND = 0.1


@dataclass(frozen=True)
class Taper:
    """A 1-D taper profile, applied as a product across coordinates.

    Parameters
    ----------
    kind : {"uniform", "smooth"}
    a : float
        Ramp width of the smooth taper, in ``(0, 1/2)``. Ignored for uniform.
    """

    kind: str = "uniform"
    a: float = 0.0

    def __post_init__(self):
        if self.kind == "uniform":
            object.__setattr__(self, "a", 0.0)
        elif self.kind == "smooth":
            if not 0 < self.a < 0.5:
                raise ValueError(f"smooth taper needs 0 < a < 1/2, got a={self.a}")
            object.__setattr__(self, "a", float(self.a))
        else:
            raise ValueError(f"unknown taper kind {self.kind!r}")

    @classmethod
    def uniform(cls) -> "Taper":
        return cls("uniform")

    @classmethod
    def smooth(cls, a: float = 0.025) -> "Taper":
        return cls("smooth", a)

    @classmethod
    def parse(cls, text: str) -> "Taper":
        """Parse ``uniform``, ``smooth`` or ``smooth:<a>``."""
        name, _, arg = text.strip().partition(":")
        if name == "uniform" and not arg:
            return cls.uniform()
        if name == "smooth":
            return cls.smooth(float(arg) if arg else 0.025)
        raise ValueError(f"cannot parse taper {text!r}")

    @property
    def label(self) -> str:
        return "uniform" if self.kind == "uniform" else f"smooth:{self.a:g}"

    @property
    def is_uniform(self) -> bool:
        return self.kind == "uniform"

    # -- 1-D profile -----------------------------------------------------

    def _ramp(self, y):
        a = self.a
        return y / a - np.sin(2 * np.pi * y / a) / (2 * np.pi)

    def profile(self, t) -> np.ndarray:
        """The 1-D profile ``h(t)``; zero outside ``[-1/2, 1/2]``."""
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) <= 0.5
        if self.is_uniform:
            return inside.astype(float)
        y = 0.5 - np.abs(t)
        out = np.where(y >= self.a, 1.0, self._ramp(np.clip(y, 0.0, self.a)))
        return np.where(inside, out, 0.0)

    def __call__(self, x) -> np.ndarray:
        """Product taper at points ``x`` of shape ``(..., d)``."""
        return np.prod(self.profile(x), axis=-1)

    @lru_cache(maxsize=None)
    def moment1d(self, k: int) -> float:
        """``int_{-1/2}^{1/2} h(t)^k dt``."""
        if k < 1:
            raise ValueError("moment order must be >= 1")
        if self.is_uniform:
            return 1.0
        if k == 1:
            return 1.0 - self.a
        ramp, _ = integrate.quad(lambda y: self._ramp(y) ** k, 0.0, self.a,
                                 epsabs=1e-14, epsrel=1e-13, limit=200)
        return (1.0 - 2 * self.a) + 2 * ramp

    def moment(self, k: int, dim: int = 1) -> float:
        """``H_{h,k}``: integral of ``h^k`` over the unit cube in ``dim`` dimensions."""
        return self.moment1d(int(k)) ** dim

    # -- Fourier transform ----------------------------------------------

    def ft_unit(self, s) -> np.ndarray:
        """``int_{-1/2}^{1/2} h(t) exp(-i s t) dt``; real because ``h`` is even."""
        s = np.asarray(s, dtype=float)
        if self.is_uniform:
            return np.sinc(s / (2 * np.pi))
        a = self.a
        c = 0.5 - a
        plateau = 2 * c * np.sinc(s * c / np.pi)
        ramp = np.empty_like(s)
        sa = np.abs(s) * a
        unsafe = (sa < _UNSAFE_BAND) | (np.abs(sa - 2 * np.pi) < _UNSAFE_BAND)
        if np.any(~unsafe):
            ss = s[~unsafe]
            b = 2 * np.pi / a
            e = np.exp(-1j * ss * a)
            i1 = e * (1j * a / ss + 1 / ss**2) - 1 / ss**2
            i2 = (1 - e) * b / (b**2 - ss**2)
            g = i1 / a - i2 / (2 * np.pi)
            ramp[~unsafe] = 2 * np.real(np.exp(0.5j * ss) * g)
        if np.any(unsafe):
            ramp[unsafe] = self._ramp_quadrature(s[unsafe], 1)
        return plateau + ramp

    def _ramp_quadrature(self, s, k):
        # both ramps of h^k against cos(s t), Gauss-Legendre on y in [0, a]
        y = 0.5 * self.a * (_GL_X + 1)
        w = 0.5 * self.a * _GL_W
        gk = self._ramp(y) ** k
        return 2 * np.cos(np.multiply.outer(s, 0.5 - y)) @ (w * gk)

    def ft(self, omega, A) -> np.ndarray:
        """``u(omega, A) = int_{-A/2}^{A/2} h(x/A) exp(-i x omega) dx``."""
        A = np.asarray(A, dtype=float)
        return A * self.ft_unit(A * np.asarray(omega, dtype=float))

    def ft_power(self, k: int, omega, A) -> np.ndarray:
        """Transform of ``h(x/A)^k`` over ``[-A/2, A/2]``."""
        if k == 1 or self.is_uniform:
            return self.ft(omega, A)
        omega = np.asarray(omega, dtype=float)
        A = np.broadcast_to(np.asarray(A, dtype=float), omega.shape)
        out = np.empty(omega.shape)
        c = 0.5 - self.a
        for idx in np.ndindex(omega.shape):
            s = A[idx] * omega[idx]
            ramp, _ = integrate.quad(lambda y: self._ramp(y) ** k * math.cos(s * (0.5 - y)),
                                     0.0, self.a, epsabs=1e-14, epsrel=1e-12, limit=200)
            out[idx] = A[idx] * (2 * c * np.sinc(s * c / np.pi) + 2 * ramp)
        return out


def taper_value(taper: Taper, x) -> np.ndarray:
    return taper(np.atleast_1d(np.asarray(x, dtype=float)))


def taper_moment(taper: Taper, k: int, dim: int = 1) -> float:
    return taper.moment(k, dim)


def taper_ft(taper: Taper, omega, A) -> np.ndarray:
    return taper.ft(omega, A)


def H_n(taper: Taper, window: Window, k: int, omega) -> np.ndarray:
    """``int_D h(x/A)^k exp(-i x.omega) dx`` at frequencies ``omega`` of shape ``(..., d)``."""
    omega = np.asarray(omega, dtype=float)
    factors = [taper.ft_power(k, omega[..., i], A) for i, A in enumerate(window.side_lengths)]
    return np.prod(factors, axis=0)


def _norm(taper: Taper, window: Window) -> float:
    d = window.dim
    return (2 * np.pi) ** (-d / 2) * taper.moment(2, d) ** -0.5 * window.volume ** -0.5


def bias_factor(taper: Taper, window: Window, omega) -> np.ndarray:
    """Expected DFT of a unit-intensity process, ``c_{h,n}(omega)``.

    Real valued for the symmetric tapers provided here.
    """
    return _norm(taper, window) * H_n(taper, window, 1, omega)


def fejer(taper: Taper, window: Window, omega) -> np.ndarray:
    """Tapered Fejer kernel ``|c_{h,n}(omega)|^2``; integrates to one."""
    return np.abs(bias_factor(taper, window, omega)) ** 2
