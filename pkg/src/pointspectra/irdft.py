"""Intensity-reweighted DFTs for patterns with a known, spatially varying intensity.

The intensity is given in rescaled coordinates: a point ``x`` of the window
``D = prod [-A_i/2, A_i/2]`` has intensity ``lambda_bar(x / A)`` with
``lambda_bar`` defined on ``[-1/2, 1/2]^d``. Each point is weighted by
``h(x/A) / lambda_bar(x/A)``, so the reweighted DFT has mean ``c_{h,n}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .core import PointPattern, Window
from .dft import dft_norm, _as_freqs
from .fourier import radial_transform_quad
from .rng import as_generator
from .taper import Taper, bias_factor

__all__ = [
    "IntensityField",
    "ir_dft",
    "ir_periodogram",
    "ir_psd",
    "ir_moment",
    "simulate_inhomogeneous_poisson",
]


@dataclass(frozen=True)
class IntensityField:
    """Known intensity ``lambda_bar`` on the unit cube.

    Parameters
    ----------
    evaluator : callable
        Maps points of shape ``(n, d)`` in ``[-1/2, 1/2]^d`` to intensities.
    lower_bound : float
        A positive lower bound, checked wherever the field is evaluated.
    upper_bound : float, optional
        Needed only for simulation by thinning.
    """

    evaluator: Callable
    lower_bound: float
    upper_bound: Optional[float] = None
    constant_value: Optional[float] = None

    def __post_init__(self):
        if not self.lower_bound > 0:
            raise ValueError("intensity lower bound must be positive")

    @classmethod
    def constant(cls, lam: float) -> "IntensityField":
        lam = float(lam)
        if not lam > 0:
            raise ValueError("intensity must be positive")
        return cls(lambda u: np.full(np.shape(u)[0], lam), lam, lam, lam)

    def __call__(self, u) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        vals = np.asarray(self.evaluator(u), dtype=float).reshape(len(u))
        return vals


def _point_weights(pattern: PointPattern, taper: Taper, intensity: IntensityField):
    pts = pattern.canonical_points()
    u = pts / pattern.window.sides
    lam = intensity(u) if len(pts) else np.zeros(0)
    if np.any(~(lam > 0)):
        raise ValueError("intensity is not positive at an observed point")
    if np.any(lam < intensity.lower_bound * (1 - 1e-12)):
        raise ValueError("intensity falls below its declared lower bound at an observed point")
    return pts, taper(u) / lam


def ir_dft(pattern: PointPattern, taper: Taper, intensity: IntensityField, omega) -> np.ndarray:
    """``(2 pi)^{-d/2} H_{h,2}^{-1/2} |D|^{-1/2} sum_x h(x/A) / lambda_bar(x/A) exp(-i x.w)``."""
    omega = _as_freqs(omega, pattern.dim)
    pts, w = _point_weights(pattern, taper, intensity)
    flat = omega.reshape(-1, pattern.dim)
    sums = np.array([np.sum(w * np.exp(-1j * (pts @ om))) for om in flat], dtype=complex)
    return dft_norm(taper, pattern.window) * sums.reshape(omega.shape[:-1])


def ir_periodogram(pattern: PointPattern, taper: Taper, intensity: IntensityField, omega) -> np.ndarray:
    """``|J_IR(w) - c_{h,n}(w)|^2``; centred with the deterministic bias factor."""
    omega = _as_freqs(omega, pattern.dim)
    return np.abs(ir_dft(pattern, taper, intensity, omega) - bias_factor(taper, pattern.window, omega)) ** 2


def ir_moment(taper: Taper, intensity: IntensityField, dim: int, tol: float = 1e-10) -> float:
    """``int_{[-1/2,1/2]^d} h(u)^2 / lambda_bar(u) du`` by adaptive quadrature."""
    if intensity.constant_value is not None:
        return taper.moment(2, dim) / intensity.constant_value
    brk = [] if taper.is_uniform else [-0.5 + taper.a, 0.5 - taper.a]

    def integrand(*u):
        uu = np.array(u, dtype=float)
        return float(taper(uu[None, :])[0] ** 2 / intensity(uu[None, :])[0])

    opts = {"points": brk, "epsabs": tol, "epsrel": tol, "limit": 200}
    val, _ = integrate.nquad(integrand, [(-0.5, 0.5)] * dim, opts=[opts] * dim)
    return float(val)


def ir_psd(ell2, taper: Taper, intensity: IntensityField, omega, dim: int | None = None) -> np.ndarray:
    """Pseudo-spectral density ``(2 pi)^{-d} H_{h^2/lambda_bar,1} / H_{h,2} + F^{-1}(ell2)(w)``.

    ``ell2`` is an isotropic function of distance (or ``None`` for zero);
    its inverse Fourier transform is computed by radial quadrature.
    """
    omega = np.asarray(omega, dtype=float)
    if dim is None:
        dim = omega.shape[-1] if omega.ndim else 1
    omega = _as_freqs(omega, dim)
    base = (2 * np.pi) ** (-dim) * ir_moment(taper, intensity, dim) / taper.moment(2, dim)
    out = np.full(omega.shape[:-1], base)
    if ell2 is not None:
        norms = np.linalg.norm(omega, axis=-1)
        flat = norms.ravel()
        extra = np.array([radial_transform_quad(ell2, w, dim) for w in flat]) / (2 * np.pi) ** dim
        out = out + extra.reshape(norms.shape)
    return out


def simulate_inhomogeneous_poisson(intensity: IntensityField, window: Window, seed=0) -> PointPattern:
    """Poisson process with intensity ``lambda_bar(x/A)``, by thinning a homogeneous one."""
    if intensity.upper_bound is None:
        raise ValueError("simulation needs an upper bound on the intensity")
    rng = as_generator(seed)
    top = float(intensity.upper_bound)
    n = rng.poisson(top * window.volume)
    pts = (rng.random((n, window.dim)) - 0.5) * window.sides
    if n == 0:
        return PointPattern(window, pts)
    lam = intensity(pts / window.sides)
    if np.any(lam > top * (1 + 1e-12)):
        raise ValueError("intensity exceeds its declared upper bound")
    keep = rng.random(n) * top < lam
    return PointPattern(window, pts[keep])
