"""Simulators for the model families.

Each simulator takes a model, a centred window and a seed (int, ``(seed, index)``
pair or ``numpy.random.Generator``) and returns a :class:`PointPattern`.
"""
from __future__ import annotations

import math

import numpy as np

from ..core import PointPattern, Window
from ..rng import as_generator
from .families import GDPP, HawkesExp, LGCPExp, Matern, Poisson, SpectralModel, Thomas

__all__ = [
    "simulate",
    "simulate_poisson",
    "simulate_thomas",
    "simulate_matern",
    "simulate_lgcp",
    "simulate_hawkes",
    "simulate_gdpp",
    "lgcp_log_field",
    "GDPP_EIGEN_CUTOFF",
]

#: spectral components of the periodic GDPP kernel below this eigenvalue are dropped
GDPP_EIGEN_CUTOFF = 1e-4


def _uniform(rng, window: Window, n: int) -> np.ndarray:
    return (rng.random((n, window.dim)) - 0.5) * window.sides


def _finish(window, pts) -> PointPattern:
    pts = pts[window.contains(pts)]
    return PointPattern(window, pts)


def simulate_poisson(model: Poisson, window: Window, rng) -> PointPattern:
    n = rng.poisson(model.intensity * window.volume)
    return PointPattern(window, _uniform(rng, window, n))


def _cluster(rng, window, kappa, alpha, margin, offsets):
    ext = window.dilate(margin)
    parents = _uniform(rng, ext, rng.poisson(kappa * ext.volume))
    counts = rng.poisson(alpha, size=len(parents))
    pts = np.repeat(parents, counts, axis=0) + offsets(int(counts.sum()))
    return _finish(window, pts)


def simulate_thomas(model: Thomas, window: Window, rng) -> PointPattern:
    """Parents on the window dilated by six offspring standard deviations."""
    kappa, alpha, s2 = model.theta
    sd = math.sqrt(s2)
    d = window.dim
    return _cluster(rng, window, kappa, alpha, 6 * sd, lambda n: sd * rng.standard_normal((n, d)))


def simulate_matern(model: Matern, window: Window, rng) -> PointPattern:
    kappa, alpha, r = model.theta
    d = window.dim

    def offsets(n):
        z = rng.standard_normal((n, d))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        return z * (r * rng.random((n, 1)) ** (1.0 / d))

    return _cluster(rng, window, kappa, alpha, r, offsets)


# ---------------------------------------------------------------------------
# LGCP


def _circulant_eigs(model: LGCPExp, shape, h):
    _, s2, phi = model.theta
    axes = []
    for m, hi in zip(shape, h):
        idx = np.arange(m)
        axes.append(np.minimum(idx, m - idx) * hi)
    grids = np.meshgrid(*axes, indexing="ij", sparse=True)
    dist = np.sqrt(sum(g**2 for g in grids))
    base = s2 * np.exp(-dist / phi)
    return np.fft.fftn(base).real


def lgcp_log_field(model: LGCPExp, window: Window, rng, grid_size: int | None = None, max_refine: int = 2):
    """Gaussian log-intensity on a regular grid over the window dilated by ``phi``.

    Returns ``(field, lower_corner, cell_sides)``; ``field`` excludes the mean.
    The covariance is embedded in a torus twice the grid size; slightly
    negative eigenvalues (above ``-1e-12 max``) are clipped to zero, and the
    torus is enlarged when clipping would be larger than that.
    """
    mu, s2, phi = model.theta
    d = window.dim
    n = grid_size or (2**9 if d <= 2 else 2**6)
    ext = window.dilate(phi)
    h = ext.sides / n
    pad = 2
    for _ in range(max_refine + 1):
        shape = (pad * n,) * d
        lam = _circulant_eigs(model, shape, h)
        lo = lam.min()
        if lo >= -1e-12 * lam.max():
            break
        pad *= 2
    else:
        raise ValueError("circulant embedding is not nonnegative definite; increase the grid")
    lam = np.clip(lam, 0.0, None)
    total = lam.size
    noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    field = np.fft.fftn(np.sqrt(lam / total) * noise).real
    field = field[tuple(slice(0, n) for _ in range(d))]
    return field, -ext.sides / 2, h


def simulate_lgcp(model: LGCPExp, window: Window, rng, grid_size: int | None = None) -> PointPattern:
    """Cox process with piecewise-constant intensity ``exp(mu + G)`` on the field grid.

    Counts are drawn per cell and placed uniformly in it, which is the same
    law as thinning a dominating Poisson process against the field.
    """
    mu = model.theta[0]
    field, lower, h = lgcp_log_field(model, window, rng, grid_size)
    d = window.dim
    # only cells that meet the window matter
    half = window.sides / 2
    sl = []
    for i in range(d):
        edges = lower[i] + h[i] * np.arange(field.shape[i] + 1)
        first = int(np.searchsorted(edges, -half[i], side="right")) - 1
        last = int(np.searchsorted(edges, half[i], side="left"))
        sl.append(slice(max(first, 0), min(last, field.shape[i])))
    sub = field[tuple(sl)]
    cell_vol = float(np.prod(h))
    counts = rng.poisson(np.exp(mu + sub) * cell_vol)
    idx = np.nonzero(counts)
    reps = counts[idx]
    corner = np.stack([lower[i] + h[i] * (idx[i] + sl[i].start) for i in range(d)], axis=-1)
    corner = np.repeat(corner, reps, axis=0)
    pts = corner + rng.random(corner.shape) * h
    return _finish(window, pts)


# ---------------------------------------------------------------------------
# Hawkes


def hawkes_burn_in(model: HawkesExp, tail: float = 1e-3) -> float:
    """Lead-in length beyond which a cluster reaches with probability below ``tail``.

    The total extent of a cluster exceeds ``t`` with probability at most
    ``a/(beta - a) exp(-(beta - a) t)``.
    """
    _, a, b = model.theta
    g = b - a
    return max(0.0, math.log(a / (g * tail)) / g)


def simulate_hawkes(model: HawkesExp, window: Window, rng) -> PointPattern:
    """Branching construction: immigrants at rate ``nu``, each event begets
    Poisson(a/beta) children at Exp(beta) delays."""
    if window.dim != 1:
        raise ValueError("hawkes_exp is defined on the line only")
    nu, a, b = model.theta
    lo, hi = -window.sides[0] / 2, window.sides[0] / 2
    start = lo - hawkes_burn_in(model)
    gen = start + (hi - start) * rng.random(rng.poisson(nu * (hi - start)))
    events = [gen]
    while gen.size:
        kids = rng.poisson(a / b, size=gen.size)
        gen = np.repeat(gen, kids) + rng.exponential(1 / b, size=int(kids.sum()))
        gen = gen[gen <= hi]
        events.append(gen)
    pts = np.concatenate(events)
    return _finish(window, pts.reshape(-1, 1))


# ---------------------------------------------------------------------------
# Gaussian DPP


def _gdpp_modes(model: GDPP, window: Window, cutoff: float):
    lam, s = model.theta
    L = window.sides
    d = window.dim
    # eigenvalue of mode k: lam (pi s)^{d/2} exp(-pi^2 s |k/L|^2)
    top = lam * (np.pi * s) ** (d / 2)
    if top > 1 + 1e-12:
        raise ValueError(f"GDPP spectral eigenvalue {top:.6g} exceeds one")
    if top < cutoff:
        return np.zeros((0, d), dtype=int), np.zeros(0)
    radius = math.sqrt(math.log(top / cutoff) / (np.pi**2 * s))
    kmax = np.floor(radius * L).astype(int)
    axes = [np.arange(-m, m + 1) for m in kmax]
    k = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    eig = top * np.exp(-(np.pi**2) * s * np.sum((k / L) ** 2, axis=1))
    keep = eig >= cutoff
    return k[keep], np.minimum(eig[keep], 1.0)


def _fourier_rows(k, L, x):
    """``exp(2 pi i k.x / L)`` as an ``(n_modes, n_points)`` array, built axis by axis."""
    out = None
    for i in range(k.shape[1]):
        ks, inv = np.unique(k[:, i], return_inverse=True)
        tab = np.exp(2j * np.pi * np.multiply.outer(ks, x[:, i]) / L[i])
        rows = tab[inv]
        out = rows if out is None else out * rows
    return out


def simulate_gdpp(model: GDPP, window: Window, rng, cutoff: float = GDPP_EIGEN_CUTOFF) -> PointPattern:
    """Periodic spectral sampler on the torus with the window's side lengths.

    Modes are selected independently with probability equal to their
    eigenvalue, then points are drawn one by one from the projection DPP of
    the selected modes by rejection from the uniform law. The acceptance
    probability of a candidate is the squared norm of its mode vector
    projected onto the orthogonal complement of the accepted vectors.
    That complement is tracked in coefficient space and re-orthonormalised
    whenever half of it has been used up.
    """
    k, eig = _gdpp_modes(model, window, cutoff)
    chosen = k[rng.random(len(eig)) < eig]
    n = len(chosen)
    d = window.dim
    L = window.sides
    if n == 0:
        return PointPattern(window, np.zeros((0, d)))
    basis = None  # orthonormal basis of the active coefficient space; None = identity
    cols = n
    deflate = np.empty((n, n), dtype=complex)  # accepted directions in the current basis
    nd = 0
    pts = np.empty((n, d))
    done = 0
    while done < n:
        remaining = n - done
        want = min(remaining, 32)
        batch = int(math.ceil(1.3 * want * n / remaining)) + 8
        x = (rng.random((batch, d)) - 0.5) * L
        u = _fourier_rows(chosen, L, x)
        w = u if basis is None else basis.conj().T @ u
        if nd:
            D = deflate[:cols, :nd]
            w -= D @ (D.conj().T @ w)
        coin = rng.random(batch)
        for j in range(batch):
            wj = w[:, j]
            p = np.vdot(wj, wj).real / n
            if coin[j] >= p:
                continue
            pts[done] = x[j]
            done += 1
            v = wj / math.sqrt(p * n)
            deflate[:cols, nd] = v
            nd += 1
            if j + 1 < batch:
                w[:, j + 1:] -= np.outer(v, v.conj() @ w[:, j + 1:])
            if done == n:
                break
            if nd * 2 >= cols and cols > 64:
                q, _ = np.linalg.qr(deflate[:cols, :nd], mode="complete")
                comp = q[:, nd:]
                basis = comp if basis is None else basis @ comp
                cols -= nd
                nd = 0
                break  # remaining candidates in this batch use stale coordinates
    return _finish(window, pts)


# ---------------------------------------------------------------------------


_SIMULATORS = {
    Poisson: simulate_poisson,
    Thomas: simulate_thomas,
    Matern: simulate_matern,
    LGCPExp: simulate_lgcp,
    HawkesExp: simulate_hawkes,
    GDPP: simulate_gdpp,
}


def simulate(model: SpectralModel, window: Window, seed=0, **kwargs) -> PointPattern:
    """Draw one pattern of ``model`` in ``window``; deterministic given ``seed``."""
    if model.dim != window.dim:
        raise ValueError(f"model dimension {model.dim} does not match window dimension {window.dim}")
    rng = as_generator(seed)
    return _SIMULATORS[type(model)](model, window, rng, **kwargs)
