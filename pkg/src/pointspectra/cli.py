"""Command-line interface.

Exit codes: 0 on success, 1 when the operation rejects its input (the reason
is printed to stderr as a single ``error: <kind>: <message>`` line), 2 for
malformed command lines.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .core import DomainSpec, PatternFormatError, build_grid, read_field, read_pattern, write_field, write_pattern
from .dft import periodogram_grid
from .mc import parse_config, parse_window, run_mc
from .models.families import parse_model
from .models.simulate import simulate
from .smoothing import smooth_field
from .specmean import spectral_mean_true
from .taper import Taper
from .variance import SubsampleConfig, block_centres, subsample_variance
from .whittle import OptimizerConfig, best_fit_oracle, fit, fit_reduced_tcp

__all__ = ["main", "build_parser"]


class CliError(Exception):
    """Input rejected by a command; maps to exit code 1."""


def _emit_text(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _emit_file(writer, obj, out: str | None) -> None:
    """Run a path-based writer, sending the result to stdout when ``out`` is unset."""
    if out not in (None, "-"):
        writer(obj, out)
        return
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "out.csv")
        writer(obj, path)
        sys.stdout.write(Path(path).read_text())


def _json(obj) -> str:
    return json.dumps(obj, indent=2, default=float) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(args):
    model = parse_model(args.model, args.dim)
    window = parse_window(args.window, model.dim)
    pattern = simulate(model, window, seed=args.seed)
    _emit_file(write_pattern, pattern, args.output)


def _field(args):
    pattern = read_pattern(args.pattern)
    grid = build_grid(pattern.window, DomainSpec.parse(args.domain), args.omega)
    return pattern, periodogram_grid(pattern, Taper.parse(args.taper), grid)


def cmd_periodogram(args):
    _, fld = _field(args)
    _emit_file(write_field, fld, args.output)


def cmd_smooth(args):
    fld = read_field(args.field)
    _emit_file(write_field, smooth_field(fld, args.bandwidth), args.output)


def cmd_fit(args):
    pattern = read_pattern(args.pattern)
    opt = OptimizerConfig(n_starts=args.starts, seed=args.seed)
    domain = DomainSpec.parse(args.domain)
    taper = Taper.parse(args.taper)
    if args.reduced:
        if args.family != "thomas":
            raise CliError("--reduced applies to the thomas family only")
        res = fit_reduced_tcp(pattern, domain, taper, opt, args.omega)
    else:
        res = fit(pattern, args.family, domain, taper, opt, args.omega)
    _emit_text(res.to_json(indent=2) + "\n", args.output)


def cmd_subsample(args):
    pattern = read_pattern(args.pattern)
    domain = DomainSpec.parse(args.domain)
    grid = build_grid(pattern.window, domain, args.omega)
    if args.phi == "const":
        phi = 1.0
    else:
        if not args.model:
            raise CliError("--phi grad needs --model giving the spectrum to differentiate")
        model = parse_model(args.model, pattern.dim)
        if not model.has_gradient:
            raise CliError(f"no analytic gradient for {model.family}")
        freqs = grid.frequencies
        f = model.spectral_density(freqs)
        phi = -model.gradient(freqs) / f[:, None] ** 2
    config = SubsampleConfig(block_side=args.block, stride=args.stride)
    zeta = subsample_variance(pattern, phi, domain, Taper.parse(args.taper), config, args.omega)
    out = {
        "zeta": np.asarray(zeta).tolist(),
        "blocks": len(block_centres(pattern.window, config)),
        "a_n": config.side_for(pattern.window),
    }
    _emit_text(_json(out), args.output)


def cmd_oracle(args):
    model = parse_model(args.true, args.dim)
    window = parse_window(args.window, model.dim)
    domain = DomainSpec.parse(args.domain)
    if args.kind == "best-fit":
        opt = OptimizerConfig(n_starts=args.starts, seed=args.seed)
        res = best_fit_oracle(model, args.family, domain, window, opt, args.omega, reduced=args.reduced)
        _emit_text(res.to_json(indent=2) + "\n", args.output)
    else:
        grid = build_grid(window, domain, args.omega)
        if args.phi != "const":
            raise CliError("spectral-mean supports --phi const only")
        val = spectral_mean_true(model, 1.0, grid)
        _emit_text(_json({"spectral_mean": float(val), "n_frequencies": len(grid)}), args.output)


def cmd_mc(args):
    text = Path(args.config).read_text() if args.config else ""
    overrides = {
        "model": args.model, "window": args.window, "taper": args.taper, "domain": args.domain,
        "spacing": args.omega, "estimators": args.estimators, "family": args.family,
        "replicates": args.replicates, "seed": args.seed, "output": args.output_dir,
        "threads": args.threads, "reference": args.reference,
    }
    cfg = parse_config(text, overrides)
    outcome = run_mc(cfg)
    sys.stdout.write(outcome.summary_csv)
    if not outcome.ok:
        raise CliError(f"failure rate {outcome.failure_rate:.3f} exceeds 0.10")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    common.add_argument("--threads", type=int, default=None, help="worker processes for mc (default 1)")

    spectral = argparse.ArgumentParser(add_help=False)
    spectral.add_argument("--taper", default="smooth:0.025", help="uniform or smooth:<a>")
    spectral.add_argument("--domain", default="pi/10,2pi", help="d0,d1, e.g. pi/10,2pi")
    spectral.add_argument("--omega", default="A", help="grid spacing rule: A, A/2 or a number")

    p = argparse.ArgumentParser(prog="pointspectra", description="Spectral analysis of spatial point patterns.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="simulate a pattern")
    s.add_argument("--model", required=True, help="e.g. thomas:kappa=0.2,alpha=10,sigma2=0.25")
    s.add_argument("--window", required=True, help="side length, or comma-separated sides")
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("periodogram", parents=[common, spectral], help="periodogram field on a grid")
    s.add_argument("--pattern", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_periodogram)

    s = sub.add_parser("smooth", parents=[common], help="kernel-smooth a periodogram field")
    s.add_argument("--field", required=True)
    s.add_argument("--bandwidth", default="auto", help="auto or a positive number")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_smooth)

    s = sub.add_parser("fit", parents=[common, spectral], help="Whittle fit")
    s.add_argument("--pattern", required=True)
    s.add_argument("--family", required=True)
    s.add_argument("--reduced", action="store_true", help="Thomas with alpha tied to the estimated intensity")
    s.add_argument("--starts", type=int, default=4)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("subsample", parents=[common, spectral], help="subsampling variance")
    s.add_argument("--pattern", required=True)
    s.add_argument("--phi", choices=["const", "grad"], default="const")
    s.add_argument("--model", help="spectrum for --phi grad")
    s.add_argument("--block", type=float, default=None, help="block side (default ceil(sqrt(A)))")
    s.add_argument("--stride", type=float, default=1.0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_subsample)

    s = sub.add_parser("oracle", parents=[common, spectral], help="best-fit parameters or true spectral means")
    s.add_argument("kind", choices=["best-fit", "spectral-mean"])
    s.add_argument("--true", required=True, help="true model spec")
    s.add_argument("--family", default="thomas")
    s.add_argument("--window", required=True)
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--reduced", action="store_true")
    s.add_argument("--phi", default="const")
    s.add_argument("--starts", type=int, default=4)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("mc", parents=[common], help="Monte Carlo replication")
    s.add_argument("--config", help="flat key = value file; flags override it")
    s.add_argument("--model")
    s.add_argument("--window")
    s.add_argument("--taper")
    s.add_argument("--domain")
    s.add_argument("--omega")
    s.add_argument("--family")
    s.add_argument("--estimators", help="comma-separated subset of whittle,whittle_reduced")
    s.add_argument("--replicates", type=int)
    s.add_argument("--reference", choices=["auto", "truth", "oracle"])
    s.add_argument("--output-dir", dest="output_dir")
    s.set_defaults(func=cmd_mc)
    return p


_DEFAULTS = {"seed": 0}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on malformed flags
    if args.command != "mc":
        for key, value in _DEFAULTS.items():
            if getattr(args, key, None) is None:
                setattr(args, key, value)
        if args.threads is not None and args.threads < 1:
            parser.error("--threads must be at least 1")
    try:
        args.func(args)
    except (CliError, ValueError, PatternFormatError, OSError, KeyError) as exc:
        msg = str(exc).replace("\n", " ")
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
