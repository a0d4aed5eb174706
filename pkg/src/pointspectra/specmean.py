"""Spectral means ``A(phi) = int_D phi f`` and integrated periodograms.

Both integrals are Riemann sums over the lattice frequencies of a
:class:`~pointspectra.core.FrequencyGrid`, each weighted by the cell volume
``(2 pi / Omega)^d``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .core import DomainSpec, FrequencyGrid, PeriodogramField
from .models.families import SpectralModel

__all__ = ["SpectralFunctional", "spectral_mean_true", "spectral_mean_estimate", "evaluate_phi"]

PhiLike = Union[Callable, np.ndarray, float, "SpectralFunctional"]


@dataclass(frozen=True)
class SpectralFunctional:
    """A weight function on frequencies, scalar or vector valued."""

    evaluator: Callable
    domain: DomainSpec | None = None

    def __call__(self, omega):
        return self.evaluator(omega)


def evaluate_phi(phi: PhiLike, grid: FrequencyGrid) -> np.ndarray:
    """Values of ``phi`` on the grid, shape ``(n,)`` or ``(n, p)``.

    ``phi`` may be a callable of frequencies ``(n, d)``, a precomputed array
    with one leading entry per grid frequency, or a constant.
    """
    if callable(phi):
        vals = np.asarray(phi(grid.frequencies), dtype=float)
    elif np.ndim(phi) == 0:
        vals = np.full(len(grid), float(phi))
    else:
        vals = np.asarray(phi, dtype=float)
    if vals.shape[0] != len(grid):
        raise ValueError("phi must give one value (or vector) per grid frequency")
    return vals


def _riemann(grid: FrequencyGrid, phi_vals, weights):
    return grid.cell_volume * np.tensordot(weights, phi_vals, axes=(0, 0))


def spectral_mean_true(model: SpectralModel, phi: PhiLike, grid: FrequencyGrid):
    """Riemann approximation of ``int_D phi(w) f(w) dw`` for a model spectrum."""
    f = model.spectral_density(grid.frequencies)
    return _riemann(grid, evaluate_phi(phi, grid), f)


def spectral_mean_estimate(field: PeriodogramField, phi: PhiLike):
    """Integrated periodogram ``(2 pi / Omega)^d sum_k phi(w_k) I_hat(w_k)``."""
    return _riemann(field.grid, evaluate_phi(phi, field.grid), field.values)
