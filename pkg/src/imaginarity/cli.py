"""Command-line interface: ``imaginarity {measure,decay,verify}``.

Arguments are parsed and validated into a run configuration before any
computation starts. Screen output uses 12 significant digits, files 17.
"""
import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import decay as dc
from . import verification as ver
from .channels import ChannelKind, apply, parse_channel_spec
from .divergences import Family, check_alpha
from .errors import ImaginarityError, NumericalError, ValidationError
from .measures import (MeasureKind, closed_form_after_bitflip, closed_form_canonical_x,
                       closed_form_pure, measure_definitional, measure_grid_oracle,
                       measure_pure_restricted)
from .optimizer import OptConfig
from .states import canonical_density, density_from_pure, imaginarity_parameter, load_state

METHODS = ("definitional", "pure-restricted", "closed-form", "grid-oracle")
SUITES = ("axioms", "theorem2", "fig1", "fig2", "prop3", "prop4")
EXIT_FAIL, EXIT_USAGE, EXIT_NUMERICAL = 1, 2, 3


@dataclass
class RunConfig:
    command: str
    families: list
    alpha: float
    opt: OptConfig
    fmt: str
    out: Optional[str]
    seed: int
    options: dict = field(default_factory=dict)


def _screen(v):
    return "nan" if v is None else f"{v + 0.0:.12g}"


def _families(value):
    return list(Family) if value == "all" else [Family(value)]


def build_parser():
    p = argparse.ArgumentParser(prog="imaginarity", description="Imaginarity measures of quantum states.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--alpha", type=float, default=None, help="order alpha in [1/2, 1) (default 0.75)")
        sp.add_argument("--family", choices=["T", "S", "O", "all"], default="all")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=None, help="optimizer simplex tolerance")
        sp.add_argument("--out", default=None, help="write output here instead of stdout")
        sp.add_argument("--format", choices=["csv", "json"], default=None)

    m = sub.add_parser("measure", help="evaluate a measure on one state")
    common(m)
    src = m.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", help="JSON state file")
    src.add_argument("--A", type=float, help="canonical pure qubit with imaginarity parameter A")
    src.add_argument("--x", type=float, help="canonical pure qubit with off-diagonal real part x")
    m.add_argument("--method", choices=METHODS + ("all",), default="all")
    m.add_argument("--channel", default=None, help="bf:m=..., pd:n=..., ad:p=... or file:<path>")

    d = sub.add_parser("decay", help="decay sweep over (A, channel parameter) grids")
    common(d)
    d.add_argument("--channel", required=True, help="bf, pd or ad")
    d.add_argument("--grid-a", type=int, default=11)
    d.add_argument("--grid-p", type=int, default=11)

    v = sub.add_parser("verify", help="run verification suites")
    common(v)
    v.add_argument("--suite", action="append", choices=SUITES + ("all",), required=True)
    v.add_argument("--samples", type=int, default=None)
    v.add_argument("--m", type=float, default=None, help="bit-flip parameter for prop4")
    v.add_argument("--grid-a", type=int, default=None)
    v.add_argument("--grid-p", type=int, default=None)
    return p


def _opt_config(args):
    kw = {"seed": args.seed}
    if args.tol is not None:
        kw["tol"] = args.tol
    env = os.environ.get("IMAG_RESTARTS")
    if env:
        try:
            kw["restarts"] = int(env)
        except ValueError:
            raise ValidationError(f"IMAG_RESTARTS must be an integer, got {env!r}") from None
    return OptConfig(**kw)


def validate_args(args):
    """Turn parsed flags into a RunConfig, rejecting anything out of range."""
    alpha = check_alpha(0.75 if args.alpha is None else args.alpha)
    cfg = RunConfig(command=args.command, families=_families(args.family), alpha=alpha,
                    opt=_opt_config(args), fmt=args.format, out=args.out, seed=args.seed)
    o = cfg.options
    if args.command == "measure":
        if args.A is not None and not (0.0 <= args.A <= 1.0):
            raise ValidationError(f"--A must lie in [0, 1], got {args.A}")
        if args.x is not None and not (0.0 <= args.x <= 0.5):
            raise ValidationError(f"--x must lie in [0, 1/2], got {args.x}")
        o["methods"] = list(METHODS[:3]) if args.method == "all" else [args.method]
        o["all"] = args.method == "all"
        o["channel"] = parse_channel_spec(args.channel) if args.channel else None
        o["A"], o["x"], o["state"] = args.A, args.x, args.state
        if o["state"] is not None:
            o["loaded"] = load_state(o["state"])
        cfg.fmt = cfg.fmt or "text"
    elif args.command == "decay":
        spec = args.channel.split(":", 1)[0].strip().lower()
        try:
            o["channel"] = ChannelKind(spec)
        except ValueError:
            raise ValidationError(f"--channel must be bf, pd or ad for a sweep, got {args.channel!r}") from None
        for name in ("grid_a", "grid_p"):
            if getattr(args, name) < 1:
                raise ValidationError(f"--{name.replace('_', '-')} must be positive")
        o["A_grid"], o["p_grid"] = dc.grid(args.grid_a), dc.grid(args.grid_p)
        cfg.fmt = cfg.fmt or "csv"
    else:
        suites = SUITES if "all" in args.suite else tuple(dict.fromkeys(args.suite))
        o["suites"] = suites
        if args.samples is not None and args.samples < (10 if "axioms" in suites else 2):
            raise ValidationError(f"--samples too small: {args.samples}")
        if args.m is not None and not (0.0 <= args.m <= 1.0):
            raise ValidationError(f"--m must lie in [0, 1], got {args.m}")
        for name in ("grid_a", "grid_p"):
            val = getattr(args, name)
            if val is not None and val < 2:
                raise ValidationError(f"--{name.replace('_', '-')} must be at least 2")
        o["samples"], o["m"], o["grid_a"], o["grid_p"] = args.samples, args.m, args.grid_a, args.grid_p
        o["alpha_given"] = args.alpha is not None
        if cfg.fmt == "csv":
            raise ValidationError("verify reports are JSON only")
        cfg.fmt = "json"
    return cfg


# ---- measure ----------------------------------------------------------------

def _resolve_state(o):
    """Density matrix plus (x, y) canonical coordinates when known in closed form."""
    if o["A"] is not None:
        A = o["A"]
        return canonical_density(A), A
    if o["x"] is not None:
        x = o["x"]
        y = math.sqrt(max(0.0, 0.25 - x * x))
        return np.array([[0.5, x - 1j * y], [x + 1j * y, 0.5]]), 2 * x
    kind, value = o["loaded"]
    if kind == "pure":
        A = imaginarity_parameter(value) if value.size == 2 else None
        return density_from_pure(value), A
    return value, None


def _closed_form(kind, A, channel):
    if A is None:
        return None
    if channel is None:
        return closed_form_pure(A, kind)
    if channel.label.startswith("bf:"):
        m = float(channel.label.split("=", 1)[1])
        return closed_form_after_bitflip(A / 2, math.sqrt(max(0.0, 1 - A * A)) / 2, m, kind)
    return None


def cmd_measure(cfg):
    o = cfg.options
    rho, A = _resolve_state(o)
    if o["channel"] is not None:
        rho = apply(o["channel"], rho)
    rows = []
    for fam in cfg.families:
        kind = MeasureKind(fam, cfg.alpha)
        vals = {}
        for method in o["methods"]:
            if method == "definitional":
                vals[method] = measure_definitional(rho, kind, cfg.opt).value
            elif method == "pure-restricted":
                vals[method] = measure_pure_restricted(rho, kind, cfg.opt).value
            elif method == "grid-oracle":
                vals[method] = measure_grid_oracle(rho, kind).value
            else:
                vals[method] = _closed_form(kind, A, o["channel"])
                if vals[method] is None and o["x"] is not None and o["channel"] is None:
                    vals[method] = closed_form_canonical_x(o["x"], kind)
        ref = vals.get("definitional")
        for method, value in vals.items():
            row = {"family": fam.value, "alpha": cfg.alpha, "method": method, "value": value}
            if o["all"]:
                row["minus_definitional"] = None if value is None or ref is None else value - ref
            rows.append(row)
    if cfg.fmt == "json":
        return json.dumps({"results": rows}, indent=2) + "\n"
    lines = []
    for r in rows:
        line = f"{r['family']}  alpha={_screen(r['alpha'])}  {r['method']:<16} {_screen(r['value'])}"
        if "minus_definitional" in r:
            line += f"  diff={_screen(r['minus_definitional'])}"
        lines.append(line)
    return "\n".join(lines) + "\n"


# ---- decay ------------------------------------------------------------------

def cmd_decay(cfg):
    o = cfg.options
    points = []
    for fam in cfg.families:
        points += dc.sweep(o["channel"], MeasureKind(fam, cfg.alpha), o["A_grid"], o["p_grid"], cfg.opt)
    if cfg.fmt == "json":
        rows = [dict(zip(dc.CSV_HEADER, pt.csv_row())) for pt in points]
        return json.dumps({"rows": rows}, indent=2) + "\n"
    return dc.to_csv(points)


# ---- verify -----------------------------------------------------------------

def _run_suite(name, cfg):
    o = cfg.options
    alphas = (cfg.alpha,) if o["alpha_given"] else None
    fams = tuple(f.value for f in cfg.families)
    if name == "axioms":
        return ver.run_axiom_suite(kinds=fams, alpha_set=alphas or (0.5, 0.75, 0.9),
                                   n_samples=o["samples"] or 200, seed=cfg.seed, cfg=cfg.opt)
    if name == "theorem2":
        A_grid = dc.grid(o["grid_a"]) if o["grid_a"] else None
        return ver.run_theorem2_suite(A_grid, alphas or ver.ALPHA_SET, cfg.opt, kinds=fams)
    if name == "fig1":
        A_grid = dc.grid(o["grid_a"]) if o["grid_a"] else None
        return ver.run_fig1_suite(A_grid)
    if name == "fig2":
        A_grid = dc.grid(o["grid_a"]) if o["grid_a"] else None
        p_grid = dc.grid(o["grid_p"]) if o["grid_p"] else None
        return ver.run_fig2_suite(A_grid, p_grid, cfg.opt)
    if name == "prop3":
        return ver.run_prop3_suite(alphas or ver.ALPHA_SET)
    m_grid = [o["m"]] if o["m"] is not None else None
    return ver.run_prop4_suite(alphas or ver.ALPHA_SET, m_grid, o["samples"] or 500, cfg.seed)


def cmd_verify(cfg):
    results = [_run_suite(name, cfg) for name in cfg.options["suites"]]
    report = {"seed": cfg.seed, "ok": all(r.ok for r in results), "suites": [r.to_dict() for r in results]}
    summary = "\n".join(
        f"{r.name}: {'PASS' if r.ok else 'FAIL'} ({r.checks_run} checks, {len(r.failures)} failures)"
        for r in results
    )
    return json.dumps(report, indent=2, sort_keys=True) + "\n", summary, report["ok"]


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = validate_args(args)
        if cfg.command == "measure":
            _emit(cmd_measure(cfg), cfg.out)
            return 0
        if cfg.command == "decay":
            _emit(cmd_decay(cfg), cfg.out)
            return 0
        text, summary, ok = cmd_verify(cfg)
        if cfg.out:
            _emit(text, cfg.out)
            print(summary)
        else:
            sys.stdout.write(text)
            print(summary, file=sys.stderr)
        return 0 if ok else EXIT_FAIL
    except NumericalError as exc:
        print(f"imaginarity: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ImaginarityError, ValueError) as exc:
        print(f"imaginarity: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"imaginarity: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
