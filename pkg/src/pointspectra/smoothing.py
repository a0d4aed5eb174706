"""Kernel spectral density estimation from a periodogram field.

The estimate at ``w`` is a weighted mean of periodogram ordinates,

    f_hat(w) = sum_k W_b(w - w_k) I_hat(w_k) / sum_k W_b(w - w_k),

with the product triangular kernel ``W(x) = prod_i 2 max(1 - 2|x_i|, 0)``
(support ``[-1/2, 1/2]^d``) scaled by the bandwidth ``b``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PeriodogramField, Window

__all__ = ["SmoothingKernel", "default_bandwidth", "ksde", "smooth_field", "triangular"]


def triangular(x) -> np.ndarray:
    """1-D kernel ``2 max(1 - 2|x|, 0)``; integrates to one."""
    return 2 * np.maximum(1 - 2 * np.abs(x), 0.0)


def default_bandwidth(window: Window) -> float:
    """``|D|^{-1/6}``."""
    return window.volume ** (-1.0 / 6.0)


@dataclass(frozen=True)
class SmoothingKernel:
    bandwidth: float
    kind: str = "triangular"

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")
        if self.kind != "triangular":
            raise ValueError(f"unknown kernel {self.kind!r}")

    def __call__(self, x) -> np.ndarray:
        """``W_b(x)`` for ``x`` of shape ``(..., d)``."""
        x = np.asarray(x, dtype=float)
        b = self.bandwidth
        return np.prod(triangular(x / b), axis=-1) / b ** x.shape[-1]


def _resolve(field: PeriodogramField, bandwidth):
    if bandwidth is None or bandwidth == "auto":
        return default_bandwidth(field.window)
    if isinstance(bandwidth, SmoothingKernel):
        return bandwidth.bandwidth
    b = float(bandwidth)
    if not b > 0:
        raise ValueError("bandwidth must be positive")
    return b


def ksde(field: PeriodogramField, omega, bandwidth=None) -> np.ndarray:
    """Kernel spectral density estimate at frequencies ``omega`` of shape ``(..., d)``.

    The field is laid out on its rectangular index hull with a membership mask,
    so numerator and denominator are separable kernel contractions.

    Raises
    ------
    ValueError
        If some ``omega`` has no field ordinate inside its kernel window.
    """
    b = _resolve(field, bandwidth)
    g = field.grid
    d = g.dim
    omega = np.asarray(omega, dtype=float)
    if d == 1 and (omega.ndim == 0 or omega.shape[-1] != 1):
        omega = omega[..., None]
    lead = omega.shape[:-1]
    om = omega.reshape(-1, d)
    vals = np.zeros(g.hull_shape)
    mask = np.zeros(g.hull_shape)
    idx = g.hull_index()
    vals[idx] = field.values
    mask[idx] = 1.0
    step = 2 * np.pi / g.spacing
    weights = []
    for i, a in enumerate(g.half_widths):
        lattice = step * np.arange(-a, a + 1)
        weights.append(triangular((om[:, i, None] - lattice[None, :]) / b))
    num = np.einsum("mi,i...->m...", weights[0], vals)
    den = np.einsum("mi,i...->m...", weights[0], mask)
    for w in weights[1:]:
        num, den = _contract(num, w), _contract(den, w)
    if np.any(den <= 0):
        raise ValueError("bandwidth below grid resolution: empty kernel window")
    return (num / den).reshape(lead)


def _contract(arr, w):
    """Sum the first hull axis of ``arr`` (shape ``(m, n, ...)``) against ``w`` (``(m, n)``)."""
    return np.einsum("mn...,mn->m...", arr, w)


def smooth_field(field: PeriodogramField, bandwidth=None) -> PeriodogramField:
    """KSDE evaluated at every frequency of the field's own grid."""
    b = _resolve(field, bandwidth)
    out = ksde(field, field.frequencies, b)
    extra = dict(field.extra)
    extra["bandwidth"] = repr(b)
    return PeriodogramField(field.grid, out, field.window, field.taper, field.intensity, extra)
