"""Subsampling variance of integrated periodograms and sandwich intervals for
Whittle estimates.

Subsampling uses overlapping cubes ``B_k = k + [-a/2, a/2]^d`` with centres on
a lattice, each fully inside the window. Every block gets its own re-centred
taper ``h((x - k)/a)``, the block periodogram is centred with the full-data
intensity estimate, and

    zeta = a^d / |T| sum_k (A_k - mean)^2

estimates the limit of ``|D| var(A_hat(phi))`` (an outer product for vector
``phi``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .core import DomainSpec, FrequencyGrid, PeriodogramField, PointPattern, Window, build_grid
from .dft import grid_sums, intensity_hat, periodogram_grid
from .models.families import SpectralModel
from .smoothing import smooth_field
from .specmean import evaluate_phi
from .taper import Taper
from .whittle import FitResult, _model_factory

__all__ = [
    "SubsampleConfig",
    "block_centres",
    "block_spectral_means",
    "subsample_variance",
    "gamma_matrix",
    "ConfidenceIntervals",
    "whittle_ci",
]


@dataclass(frozen=True)
class SubsampleConfig:
    """Block side ``a`` (default ``ceil(sqrt(min A_i))``), centre stride and minimum block count."""

    block_side: float | None = None
    stride: float = 1.0
    min_blocks: int = 20

    def __post_init__(self):
        if self.block_side is not None and not self.block_side > 0:
            raise ValueError("block side must be positive")
        if not self.stride > 0:
            raise ValueError("stride must be positive")

    def side_for(self, window: Window) -> float:
        if self.block_side is not None:
            return float(self.block_side)
        return float(math.ceil(math.sqrt(min(window.side_lengths))))


def block_centres(window: Window, config: SubsampleConfig) -> np.ndarray:
    """Lattice centres whose blocks fit inside the window, lexicographic order."""
    a = config.side_for(window)
    if a >= min(window.side_lengths):
        raise ValueError("block side must be smaller than every window side")
    axes = []
    for A in window.side_lengths:
        m = math.floor((A - a) / 2 / config.stride + 1e-9)
        axes.append(config.stride * np.arange(-m, m + 1))
    centres = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, window.dim)
    if len(centres) < config.min_blocks:
        raise ValueError(
            f"window too small for subsampling: {len(centres)} blocks of side {a:g}, need {config.min_blocks}"
        )
    return centres


def _hull_axes(grid: FrequencyGrid):
    return [2 * np.pi * np.arange(-a, a + 1) / grid.spacing for a in grid.half_widths]


def block_spectral_means(pattern: PointPattern, phi, grid: FrequencyGrid, taper: Taper,
                         config: SubsampleConfig, intensity: float | None = None) -> np.ndarray:
    """Integrated block periodograms ``A_k(phi)``, one row per block centre.

    Block sums are written in coordinates relative to the block centre. The
    phase ``exp(-i k.w)`` then multiplies both the block DFT and its bias
    factor, so it cancels in the periodogram.
    """
    window = pattern.window
    d = window.dim
    a = config.side_for(window)
    centres = block_centres(window, config)
    lam = intensity_hat(pattern, taper) if intensity is None else float(intensity)
    phi_vals = evaluate_phi(phi, grid)
    axes = _hull_axes(grid)
    norm = (2 * np.pi) ** (-d / 2) * taper.moment(2, d) ** -0.5 * a ** (-d / 2)
    bias = taper.ft(axes[0], a)
    for f in axes[1:]:
        bias = np.multiply.outer(bias, taper.ft(f, a))
    bias = lam * norm * bias
    idx = grid.hull_index()
    pts = pattern.canonical_points()
    cell = grid.cell_volume
    out = []
    for k in centres:
        rel = pts - k
        inside = np.all(np.abs(rel) <= a / 2, axis=1)
        y = rel[inside]
        J = norm * grid_sums(y, taper(y / a), axes)
        I = np.abs(J - bias)[idx] ** 2
        out.append(cell * np.tensordot(I, phi_vals, axes=(0, 0)))
    return np.asarray(out)


def subsample_variance(pattern: PointPattern, phi, domain: DomainSpec, taper: Taper,
                       config: SubsampleConfig | None = None, spacing="A",
                       intensity: float | None = None):
    """Subsampling estimate of ``lim |D| var(A_hat(phi))``.

    Returns a float for scalar ``phi`` and a symmetric matrix for vector
    ``phi``. Block Riemann sums use the full-data frequency grid.
    """
    config = config or SubsampleConfig()
    grid = build_grid(pattern.window, domain, spacing)
    A = block_spectral_means(pattern, phi, grid, taper, config, intensity)
    a = config.side_for(pattern.window)
    dev = A - A.mean(axis=0)
    scale = a ** pattern.dim / len(A)
    if dev.ndim == 1:
        return float(scale * np.sum(dev**2))
    Z = scale * dev.T @ dev
    return 0.5 * (Z + Z.T)


def _inverse_spectrum_derivs(model: SpectralModel, freqs):
    f = model.spectral_density(freqs)
    g = model.gradient(freqs)
    H = model.hessian(freqs)
    grad_inv = -g / f[:, None] ** 2
    hess_inv = -H / f[:, None, None] ** 2 + 2 * g[:, :, None] * g[:, None, :] / f[:, None, None] ** 3
    return f, g, grad_inv, hess_inv


def gamma_matrix(model: SpectralModel, f_hat, grid: FrequencyGrid) -> np.ndarray:
    """Plug-in ``Gamma``: Riemann sum over the grid of

        [(f_hat - f_theta) grad^2 (1/f_theta) + grad log f_theta grad log f_theta^T] / (2 (2 pi)^d)

    ``f_hat`` is an array of spectrum estimates on the grid, a field or a model.
    """
    freqs = grid.frequencies
    if isinstance(f_hat, SpectralModel):
        fh = f_hat.spectral_density(freqs)
    elif isinstance(f_hat, PeriodogramField):
        fh = f_hat.values
    else:
        fh = np.asarray(f_hat, dtype=float)
    f, g, _, hess_inv = _inverse_spectrum_derivs(model, freqs)
    glog = g / f[:, None]
    terms = (fh - f)[:, None, None] * hess_inv + glog[:, :, None] * glog[:, None, :]
    G = grid.cell_volume * terms.sum(axis=0) / (2 * (2 * np.pi) ** grid.dim)
    return 0.5 * (G + G.T)


@dataclass
class ConfidenceIntervals:
    param_names: tuple
    estimate: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    se: np.ndarray
    covariance: np.ndarray
    level: float
    gamma: np.ndarray
    zeta: np.ndarray
    gamma_condition: float
    blocks: int
    block_side: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "params": list(self.param_names),
            "estimate": self.estimate.tolist(),
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
            "se": self.se.tolist(),
            "level": self.level,
            "gamma_condition": self.gamma_condition,
            "blocks": self.blocks,
            "block_side": self.block_side,
        }


def whittle_ci(fit: FitResult, pattern: PointPattern, taper: Taper, domain: DomainSpec,
               config: SubsampleConfig | None = None, level: float = 0.95, spacing="A",
               bandwidth=None) -> ConfidenceIntervals:
    """Sandwich confidence intervals for a Whittle fit.

    ``Gamma`` is evaluated at the estimate with the kernel spectral density
    estimate in place of the true spectrum. The middle matrix is the
    subsampling estimate ``zeta`` of ``lim |D| var(A_hat(grad 1/f_theta))``,
    which already includes the taper constant ``H_{h,4}/H_{h,2}^2``. With the
    objective's Hessian equal to ``2 (2 pi)^d Gamma``,

        var(theta_hat) = Gamma^{-1} zeta Gamma^{-1} / (4 (2 pi)^{2d} |D|).

    ``level`` is the confidence level, strictly between 0 and 1.
    """
    if not 0 < level < 1:
        raise ValueError("level must lie strictly between 0 and 1")
    if fit.family not in {"poisson", "thomas", "matern", "gdpp", "hawkes_exp"}:
        raise ValueError(f"intervals need analytic derivatives; unavailable for {fit.family}")
    config = config or SubsampleConfig()
    window = pattern.window
    d = window.dim
    model = _model_factory(fit.family, d)(np.asarray(fit.theta, dtype=float))
    grid = build_grid(window, domain, spacing)
    field_ = periodogram_grid(pattern, taper, grid)
    f_hat = smooth_field(field_, bandwidth)
    G = gamma_matrix(model, f_hat, grid)
    cond = float(np.linalg.cond(G))
    if not np.isfinite(cond) or cond > 1e12:
        raise ValueError(f"Gamma is singular (condition number {cond:.3g})")
    _, _, grad_inv, _ = _inverse_spectrum_derivs(model, grid.frequencies)
    Z = subsample_variance(pattern, grad_inv, domain, taper, config, spacing, field_.intensity)
    Z = np.atleast_2d(Z)
    Ginv = np.linalg.inv(G)
    cov = Ginv @ Z @ Ginv / (4 * (2 * np.pi) ** (2 * d) * window.volume)
    cov = 0.5 * (cov + cov.T)
    diag = np.diag(cov)
    if np.any(diag < 0) or not np.all(np.isfinite(diag)):
        raise ValueError("inconsistent variance estimate: negative or non-finite diagonal")
    se = np.sqrt(diag)
    z = stats.norm.ppf(0.5 + level / 2)
    est = np.asarray(fit.theta, dtype=float)
    return ConfidenceIntervals(
        tuple(fit.param_names), est, est - z * se, est + z * se, se, cov, level, G, Z, cond,
        len(block_centres(window, config)), config.side_for(window),
    )
