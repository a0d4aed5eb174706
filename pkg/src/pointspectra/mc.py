"""Monte Carlo replication harness.

A scenario fixes a true model, a window, the fitting setup and a master seed.
Replicate ``i`` simulates with the stream ``(seed, i)``, so the per-replicate
table does not depend on how many worker processes share the work.
"""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .core import DomainSpec, Window, build_grid
from .dft import periodogram_grid
from .models.families import FAMILIES, SpectralModel, parse_model
from .models.simulate import simulate
from .taper import Taper
from .whittle import OptimizerConfig, best_fit_oracle, fit_field, fit_reduced_field

__all__ = [
    "ScenarioConfig",
    "parse_config",
    "parse_window",
    "run_mc",
    "McOutcome",
    "FAILURE_LIMIT",
]

ESTIMATORS = ("whittle", "whittle_reduced")
FAILURE_LIMIT = 0.10


def parse_window(text, dim: int) -> Window:
    """``"40"`` gives a cube of side 40 in ``dim`` dimensions; ``"40,20"`` gives explicit sides."""
    parts = [float(t) for t in str(text).replace(" ", "").split(",") if t]
    if len(parts) == 1:
        return Window.cube(parts[0], dim)
    if len(parts) != dim:
        raise ValueError(f"window needs 1 or {dim} side lengths, got {len(parts)}")
    return Window(tuple(parts))


@dataclass(frozen=True)
class ScenarioConfig:
    """One Monte Carlo design.

    ``family`` defaults to the family of the true model. ``reference`` picks
    the parameter the bias is measured against: ``truth`` (the true
    parameters, only when the fitted family matches), ``oracle`` (the
    best-fitting parameter on the same grid) or ``auto``.
    """

    model: str
    window: str = "40"
    taper: str = "smooth:0.025"
    domain: str = "pi/10,2pi"
    spacing: str = "A"
    estimators: tuple = ("whittle",)
    family: str = ""
    replicates: int = 100
    seed: int = 0
    output: str = "mc_out"
    threads: int = 1
    reference: str = "auto"
    n_starts: int = 4

    def __post_init__(self):
        if int(self.replicates) < 1:
            raise ValueError("replicate count must be at least 1")
        if int(self.threads) < 1:
            raise ValueError("threads must be at least 1")
        bad = [e for e in self.estimators if e not in ESTIMATORS]
        if bad or not self.estimators:
            raise ValueError(f"estimators must be a non-empty subset of {ESTIMATORS}")
        if self.reference not in ("auto", "truth", "oracle"):
            raise ValueError("reference must be auto, truth or oracle")
        # validates model, window, taper and domain eagerly
        model = self.true_model()
        self.window_obj(model.dim)
        Taper.parse(self.taper)
        DomainSpec.parse(self.domain)

    def true_model(self) -> SpectralModel:
        return parse_model(self.model)

    def window_obj(self, dim: int | None = None) -> Window:
        return parse_window(self.window, dim or self.true_model().dim)

    @property
    def fit_family(self) -> str:
        return self.family or self.true_model().family

    def echo(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


_INT_KEYS = {"replicates", "seed", "threads", "n_starts"}


def _coerce(key: str, value):
    if key in _INT_KEYS:
        return int(value)
    if key == "estimators":
        if isinstance(value, str):
            return tuple(s.strip() for s in value.split(",") if s.strip())
        return tuple(value)
    return str(value).strip()


def parse_config(text: str = "", overrides: dict | None = None) -> ScenarioConfig:
    """Build a scenario from flat ``key = value`` text plus overrides (which win)."""
    known = {f.name for f in fields(ScenarioConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip()
        if not eq or key not in known:
            raise ValueError(f"config line {lineno}: expected one of {sorted(known)} as key = value")
        values[key] = value.strip()
    for key, value in (overrides or {}).items():
        if value is not None:
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = value
    if "model" not in values:
        raise ValueError("config needs a model")
    return ScenarioConfig(**{k: _coerce(k, v) for k, v in values.items()})


# ---------------------------------------------------------------------------


def _param_names(cfg: ScenarioConfig, estimator: str) -> tuple:
    if estimator == "whittle_reduced":
        return ("kappa", "sigma2")
    return FAMILIES[cfg.fit_family].param_names


def _optimizer(cfg: ScenarioConfig) -> OptimizerConfig:
    return OptimizerConfig(n_starts=cfg.n_starts, seed=cfg.seed)


def _replicate(cfg: ScenarioConfig, index: int):
    """Simulate and fit replicate ``index``; returns rows and wall time."""
    model = cfg.true_model()
    window = cfg.window_obj(model.dim)
    taper = Taper.parse(cfg.taper)
    domain = DomainSpec.parse(cfg.domain)
    t0 = time.perf_counter()
    rows = []
    try:
        pattern = simulate(model, window, seed=(cfg.seed, index))
        n = len(pattern)
        if n == 0:
            raise ValueError("empty pattern")
        field = periodogram_grid(pattern, taper, build_grid(window, domain, cfg.spacing))
    except Exception as exc:  # recorded, not raised
        reason = f"{type(exc).__name__}: {exc}".replace("\n", " ")
        return [(index, e, "failed", 0, None, None, None, reason) for e in cfg.estimators], time.perf_counter() - t0
    for est in cfg.estimators:
        try:
            if est == "whittle":
                res = fit_field(field, cfg.fit_family, _optimizer(cfg))
            else:
                res = fit_reduced_field(field, None, _optimizer(cfg))
            status = "ok" if np.all(np.isfinite(res.theta)) and np.isfinite(res.objective) else "failed"
            rows.append((index, est, status, n, np.asarray(res.theta, dtype=float), res.objective,
                         bool(res.converged), "" if status == "ok" else "non-finite estimate"))
        except Exception as exc:
            rows.append((index, est, "failed", n, None, None, None, f"{type(exc).__name__}: {exc}".replace("\n", " ")))
    return rows, time.perf_counter() - t0


def _replicate_star(args):
    return _replicate(*args)


def _reference(cfg: ScenarioConfig, estimator: str):
    """Reference parameter vector for bias, or ``None`` when not defined."""
    model = cfg.true_model()
    mode = cfg.reference
    same = estimator == "whittle" and model.family == cfg.fit_family
    reduced_truth = estimator == "whittle_reduced" and model.family == "thomas"
    if mode == "auto":
        mode = "truth" if same or reduced_truth else "oracle"
    if mode == "truth":
        if same:
            return np.asarray(model.theta, dtype=float)
        if reduced_truth:
            return np.asarray(model.theta, dtype=float)[[0, 2]]
        raise ValueError("reference=truth needs the fitted family to match the true model")
    window = cfg.window_obj(model.dim)
    domain = DomainSpec.parse(cfg.domain)
    res = best_fit_oracle(model, cfg.fit_family, domain, window, _optimizer(cfg), cfg.spacing,
                          reduced=estimator == "whittle_reduced")
    return np.asarray(res.theta, dtype=float)


def _fmt(x) -> str:
    if x is None:
        return "NA"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return "NA" if not np.isfinite(x) else repr(float(x))
    return str(x)


@dataclass
class McOutcome:
    """Tables written by :func:`run_mc` plus the overall failure rate."""

    replicates_csv: str
    summary_csv: str
    timings_csv: str
    summary: list
    failure_rate: float

    @property
    def ok(self) -> bool:
        return self.failure_rate <= FAILURE_LIMIT


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def run_mc(cfg: ScenarioConfig, write: bool = True) -> McOutcome:
    """Run every replicate, then write ``config.echo``, ``replicates.csv`` and
    ``summary.csv`` (plus ``timings.csv``) to ``cfg.output``.

    ``replicates.csv`` holds estimates only and is bit-identical for any worker
    count; wall times, which are not reproducible, live in ``timings.csv``.
    """
    jobs = [(cfg, i) for i in range(cfg.replicates)]
    if cfg.threads > 1 and cfg.replicates > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_replicate_star, jobs, chunksize=1))
    else:
        results = [_replicate_star(j) for j in jobs]

    maxp = max(len(_param_names(cfg, e)) for e in cfg.estimators)
    rep_rows = [["replicate", "estimator", "status", "n_points"] + [f"theta{j + 1}" for j in range(maxp)]
                + ["objective", "converged", "reason"]]
    time_rows = [["replicate", "seconds"]]
    per_est = {e: [] for e in cfg.estimators}
    failures = {e: 0 for e in cfg.estimators}
    for rows, secs in results:
        time_rows.append([rows[0][0], repr(secs)])
        for index, est, status, n, theta, obj, conv, reason in rows:
            th = [None] * maxp
            if theta is not None:
                th[: len(theta)] = list(theta)
            rep_rows.append([index, est, status, n] + [_fmt(x) for x in th] + [_fmt(obj), _fmt(conv), reason])
            if status == "ok":
                per_est[est].append(theta)
            else:
                failures[est] += 1

    mean_time = float(np.mean([s for _, s in results]))
    summary = []
    sum_rows = [["estimator", "parameter", "reference", "mean", "bias", "se", "n_ok", "n_failed",
                 "failure_rate", "mean_seconds"]]
    for est in cfg.estimators:
        names = _param_names(cfg, est)
        est_arr = np.array(per_est[est], dtype=float).reshape(-1, len(names))
        try:
            ref = _reference(cfg, est)
        except Exception:
            ref = None
        rate = failures[est] / cfg.replicates
        for j, name in enumerate(names):
            vals = est_arr[:, j]
            mean = float(vals.mean()) if len(vals) else None
            se = float(vals.std(ddof=1)) if len(vals) >= 2 else None
            r = float(ref[j]) if ref is not None else None
            bias = mean - r if (mean is not None and r is not None) else None
            row = dict(estimator=est, parameter=name, reference=r, mean=mean, bias=bias, se=se,
                       n_ok=len(vals), n_failed=failures[est], failure_rate=rate, mean_seconds=mean_time)
            summary.append(row)
            sum_rows.append([_fmt(row[k]) for k in sum_rows[0]])
    overall = sum(failures.values()) / (cfg.replicates * len(cfg.estimators))
    out = McOutcome(_csv(rep_rows), _csv(sum_rows), _csv(time_rows), summary, overall)
    if write:
        d = Path(cfg.output)
        d.mkdir(parents=True, exist_ok=True)
        (d / "config.echo").write_text(cfg.echo())
        (d / "replicates.csv").write_text(out.replicates_csv)
        (d / "summary.csv").write_text(out.summary_csv)
        (d / "timings.csv").write_text(out.timings_csv)
    return out
