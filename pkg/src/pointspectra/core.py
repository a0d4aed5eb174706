"""Windows, point patterns, frequency grids and periodogram fields.

Every window is an origin-centred rectangle ``[-A_1/2, A_1/2] x ... x [-A_d/2, A_d/2]``.
Patterns recorded on other rectangles must be translated by the caller.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

__all__ = [
    "Window",
    "PointPattern",
    "DomainSpec",
    "FrequencyGrid",
    "PeriodogramField",
    "PatternFormatError",
    "build_grid",
    "read_pattern",
    "write_pattern",
    "read_field",
    "write_field",
]

# relative slack used when testing lattice frequencies against the annulus edges
_EDGE_RTOL = 1e-12


class PatternFormatError(ValueError):
    """Raised when a pattern or field file cannot be parsed."""


@dataclass(frozen=True)
class Window:
    """Centred rectangular observation window."""

    side_lengths: tuple

    def __post_init__(self):
        sides = tuple(float(a) for a in np.atleast_1d(self.side_lengths))
        if not 1 <= len(sides) <= 3:
            raise ValueError(f"window dimension must be 1, 2 or 3, got {len(sides)}")
        if not all(math.isfinite(a) and a > 0 for a in sides):
            raise ValueError(f"side lengths must be positive, got {sides}")
        object.__setattr__(self, "side_lengths", sides)

    @classmethod
    def cube(cls, side: float, dim: int = 2) -> "Window":
        return cls((float(side),) * dim)

    @classmethod
    def from_bounds(cls, bounds: Sequence[float]) -> "Window":
        """Build from ``lo1 hi1 lo2 hi2 ...``; the rectangle must be centred."""
        b = np.asarray(bounds, dtype=float)
        if b.size % 2 or b.size == 0:
            raise ValueError("window bounds need an even number of values")
        lo, hi = b[0::2], b[1::2]
        if np.any(hi <= lo):
            raise ValueError("window upper bounds must exceed lower bounds")
        if not np.allclose(lo, -hi, rtol=1e-12, atol=1e-12):
            raise ValueError(
                "window must be centred at the origin; translate the pattern first"
            )
        return cls(tuple(hi - lo))

    @property
    def dim(self) -> int:
        return len(self.side_lengths)

    @property
    def sides(self) -> np.ndarray:
        return np.array(self.side_lengths)

    @property
    def volume(self) -> float:
        return float(np.prod(self.side_lengths))

    @property
    def is_cube(self) -> bool:
        return len(set(self.side_lengths)) == 1

    @property
    def bounds(self) -> list:
        out = []
        for a in self.side_lengths:
            out += [-a / 2, a / 2]
        return out

    def contains(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return np.all(np.abs(pts) <= self.sides / 2, axis=1)

    def dilate(self, margin: float) -> "Window":
        return Window(tuple(a + 2 * margin for a in self.side_lengths))


@dataclass(frozen=True, eq=False)
class PointPattern:
    """A simple point pattern observed in a centred window.

    ``points`` is an ``(n, d)`` array; it is stored read-only.
    """

    window: Window
    points: np.ndarray

    def __post_init__(self):
        d = self.window.dim
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.size == 0:
            pts = pts.reshape(0, d)
        if pts.ndim == 1 and d == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[1] != d:
            raise ValueError(f"points must have shape (n, {d}), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        inside = self.window.contains(pts)
        if not np.all(inside):
            row = int(np.flatnonzero(~inside)[0])
            raise ValueError(f"point outside window at index {row}: {pts[row].tolist()}")
        if len(pts) > 1 and len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("duplicate points: the pattern must be simple")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.window.dim

    def canonical_points(self) -> np.ndarray:
        """Points sorted lexicographically (first coordinate most significant)."""
        if len(self.points) == 0:
            return self.points
        order = np.lexsort(self.points.T[::-1])
        return self.points[order]


_BOUND = re.compile(r"^(?P<num>[0-9.eE+-]*?)\*?(?P<pi>pi)?(?:/(?P<div>[0-9.eE+-]+))?$")


def _parse_bound(token: str) -> float:
    m = _BOUND.match(token.lower())
    if not m or not (m["num"] or m["pi"]):
        raise ValueError(f"cannot parse frequency bound {token!r}")
    try:
        value = float(m["num"]) if m["num"] else 1.0
        if m["pi"]:
            value *= math.pi
        if m["div"]:
            value /= float(m["div"])
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"cannot parse frequency bound {token!r}") from None
    return value


@dataclass(frozen=True)
class DomainSpec:
    """Sup-norm annulus ``{w : d0 <= |w|_inf <= d1}`` of frequencies."""

    d0: float
    d1: float

    def __post_init__(self):
        if not (0 <= self.d0 < self.d1 < math.inf):
            raise ValueError(f"need 0 <= d0 < d1 < inf, got d0={self.d0}, d1={self.d1}")

    @classmethod
    def parse(cls, text: str) -> "DomainSpec":
        """Parse ``"d0,d1"``; each bound is a number, optionally times ``pi``
        and over a divisor, e.g. ``"pi/10,2pi"`` or ``"0.314,6.283"``."""
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if len(parts) != 2:
            raise ValueError(f"domain must be 'd0,d1', got {text!r}")
        return cls(_parse_bound(parts[0]), _parse_bound(parts[1]))

    def contains(self, freqs) -> np.ndarray:
        w = np.abs(np.asarray(freqs, dtype=float))
        sup = w.max(axis=-1) if w.ndim > 1 else w
        return (sup >= self.d0 * (1 - _EDGE_RTOL)) & (sup <= self.d1 * (1 + _EDGE_RTOL))


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Lattice frequencies ``2 pi k / spacing`` that fall inside a domain.

    ``k`` holds the integer indices in lexicographic order and ``half_widths``
    the extent of the enclosing rectangular index hull.
    """

    spacing: float
    k: np.ndarray
    domain: DomainSpec
    half_widths: tuple

    def __post_init__(self):
        self.k.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.k.shape[1]

    @property
    def frequencies(self) -> np.ndarray:
        return 2 * np.pi * self.k / self.spacing

    @property
    def cell_volume(self) -> float:
        return (2 * np.pi / self.spacing) ** self.dim

    @property
    def hull_shape(self) -> tuple:
        return tuple(2 * a + 1 for a in self.half_widths)

    def hull_index(self) -> tuple:
        """Index tuple placing grid entries into an array of ``hull_shape``."""
        return tuple((self.k[:, i] + a) for i, a in enumerate(self.half_widths))

    def __len__(self) -> int:
        return len(self.k)


def resolve_spacing(window: Window, rule: Union[str, float]) -> float:
    """Turn ``"A"``, ``"A/2"`` or an explicit number into the lattice spacing."""
    if isinstance(rule, str):
        text = rule.strip()
        if text in ("A", "A/2"):
            if not window.is_cube:
                raise ValueError(f"spacing rule {text!r} needs a cubic window; give an explicit value")
            A = window.side_lengths[0]
            return A if text == "A" else A / 2
        rule = float(text)
    omega = float(rule)
    if not omega > 0:
        raise ValueError("grid spacing must be positive")
    return omega


def build_grid(window: Window, domain: DomainSpec, spacing: Union[str, float] = "A") -> FrequencyGrid:
    """All lattice frequencies ``2 pi k / spacing`` inside ``domain``."""
    omega = resolve_spacing(window, spacing)
    d = window.dim
    a = int(math.floor(domain.d1 * omega / (2 * np.pi) * (1 + _EDGE_RTOL)))
    axes = [np.arange(-a, a + 1)] * d
    k = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    keep = domain.contains(2 * np.pi * k / omega)
    k = k[keep]
    if len(k) == 0:
        raise ValueError("empty frequency domain")
    return FrequencyGrid(omega, np.ascontiguousarray(k), domain, (a,) * d)


@dataclass(frozen=True, eq=False)
class PeriodogramField:
    """Periodogram values on a frequency grid plus the metadata used to compute them."""

    grid: FrequencyGrid
    values: np.ndarray
    window: Window
    taper: str = "uniform"
    intensity: float = float("nan")
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.shape != (len(self.grid),):
            raise ValueError("one value per grid frequency is required")
        if np.any(v < 0):
            raise ValueError("periodogram values must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.frequencies

    def with_values(self, values) -> "PeriodogramField":
        return PeriodogramField(self.grid, values, self.window, self.taper, self.intensity, dict(self.extra))


# ---------------------------------------------------------------------------
# CSV formats


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_pattern(pattern: PointPattern, path) -> None:
    lines = [f"# dim: {pattern.dim}", "# window: " + " ".join(_fmt(b) for b in pattern.window.bounds)]
    lines += [",".join(_fmt(c) for c in row) for row in pattern.points]
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_header(lines):
    meta = {}
    body = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            meta[key.strip().lower()] = value.strip()
        else:
            body.append((lineno, line))
    return meta, body


def read_pattern(path) -> PointPattern:
    """Read a pattern CSV written by :func:`write_pattern`.

    Raises :class:`PatternFormatError` naming the offending line for points
    outside the declared window or duplicated points.
    """
    meta, body = _parse_header(Path(path).read_text().splitlines())
    if "window" not in meta:
        raise PatternFormatError("missing '# window:' header")
    try:
        window = Window.from_bounds([float(t) for t in meta["window"].split()])
    except ValueError as exc:
        raise PatternFormatError(f"bad window header: {exc}") from None
    if "dim" in meta and int(meta["dim"]) != window.dim:
        raise PatternFormatError("'# dim:' disagrees with the window header")
    half = window.sides / 2
    rows, seen = [], {}
    for lineno, line in body:
        try:
            row = [float(t) for t in line.split(",")]
        except ValueError:
            raise PatternFormatError(f"line {lineno}: cannot parse {line!r}") from None
        if len(row) != window.dim:
            raise PatternFormatError(f"line {lineno}: expected {window.dim} coordinates")
        if np.any(np.abs(row) > half):
            raise PatternFormatError(f"line {lineno}: point outside window: {line}")
        key = tuple(row)
        if key in seen:
            raise PatternFormatError(f"line {lineno}: duplicate point (first seen on line {seen[key]})")
        seen[key] = lineno
        rows.append(row)
    return PointPattern(window, np.array(rows, dtype=float).reshape(-1, window.dim))


def write_field(fld: PeriodogramField, path) -> None:
    g = fld.grid
    d = g.dim
    head = [
        f"# dim: {d}",
        f"# spacing: {_fmt(g.spacing)}",
        f"# domain: {_fmt(g.domain.d0)} {_fmt(g.domain.d1)}",
        "# window: " + " ".join(_fmt(b) for b in fld.window.bounds),
        f"# taper: {fld.taper}",
        f"# intensity: {_fmt(fld.intensity)}",
    ]
    for key, value in fld.extra.items():
        head.append(f"# {key}: {value}")
    head.append(",".join([f"k{i + 1}" for i in range(d)] + [f"omega{i + 1}" for i in range(d)] + ["value"]))
    freqs = g.frequencies
    rows = [
        ",".join([str(int(x)) for x in g.k[j]] + [_fmt(x) for x in freqs[j]] + [_fmt(fld.values[j])])
        for j in range(len(g))
    ]
    Path(path).write_text("\n".join(head + rows) + "\n")


def read_field(path) -> PeriodogramField:
    meta, body = _parse_header(Path(path).read_text().splitlines())
    try:
        d = int(meta["dim"])
        spacing = float(meta["spacing"])
        d0, d1 = (float(t) for t in meta["domain"].split())
        window = Window.from_bounds([float(t) for t in meta["window"].split()])
    except (KeyError, ValueError) as exc:
        raise PatternFormatError(f"bad field header: {exc}") from None
    if body and body[0][1].startswith("k1"):
        body = body[1:]
    ks, vals = [], []
    for lineno, line in body:
        parts = line.split(",")
        if len(parts) != 2 * d + 1:
            raise PatternFormatError(f"line {lineno}: expected {2 * d + 1} columns")
        ks.append([int(p) for p in parts[:d]])
        vals.append(float(parts[-1]))
    k = np.array(ks, dtype=int).reshape(-1, d)
    domain = DomainSpec(d0, d1)
    a = int(np.abs(k).max()) if len(k) else 0
    a = max(a, int(math.floor(d1 * spacing / (2 * np.pi) * (1 + _EDGE_RTOL))))
    grid = FrequencyGrid(spacing, k, domain, (a,) * d)
    extra = {key: v for key, v in meta.items() if key not in {"dim", "spacing", "domain", "window", "taper", "intensity"}}
    return PeriodogramField(grid, vals, window, meta.get("taper", "uniform"), float(meta.get("intensity", "nan")), extra)
