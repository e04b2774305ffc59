"""Command-line front end.

Every subcommand prints a JSON summary on stdout, or with ``--out DIR`` writes
``<subcommand>-<name>.json`` (and a ``.csv`` table where one exists) into DIR.
Exit status: 0 success, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import reports
from .config import DEFAULTS
from .errors import LawError, NumericalError
from .laws import Fixed, GRAMMAR, parse_law
from .output import dumps_csv, dumps_json, write_text
from .rumor_range import expected_range_bounds
from .simulate import ENGINES, SimConfig, estimate
from .spreader import build
from .survival import (FAMILY_DEFAULT_RANGES, cayley_survival, critical_parameter,
                       extinction_probability, family_template)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3


class UsageError(Exception):
    pass


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return conv


def _law(text):
    try:
        return parse_law(text)
    except LawError as exc:
        raise UsageError(str(exc)) from exc


# --- commands: each returns (name, summary, optional (header, rows)) --------

def cmd_law(args):
    law = _law(args.dist)
    sl = build(law, args.eps)
    summary = {"dist": law.spec, "mean": law.mean(), "cutoff": sl.truncation.cutoff,
               "tailMass": sl.tail_mass, "spreaderMeanLower": sl.mean_interval[0],
               "spreaderMeanUpper": sl.mean_interval[1]}
    return law.slug, summary, (("i", "probability"), sl.rows())


def cmd_survival(args):
    law = _law(args.dist)
    if args.cayley:
        if not isinstance(law, Fixed):
            raise UsageError("--cayley needs a fixed:d law")
        theta = cayley_survival(law.d, args.tol)
        return law.slug, {"dist": law.spec, "convention": "cayley", "theta": theta}, None
    res = extinction_probability(build(law, args.eps), args.tol)
    return law.slug, {"dist": law.spec, "convention": "source", **res.record()}, None


def cmd_critical(args):
    try:
        make, name = family_template(args.family, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    lo, hi = args.range if args.range else FAMILY_DEFAULT_RANGES[args.family]
    br = critical_parameter(make, lo, hi, args.tol, args.eps, name)
    slug = args.family if args.n is None else f"{args.family}_{args.n}"
    return slug, {"family": args.family, "n": args.n, **br.record()}, None


def cmd_range(args):
    law = _law(args.dist)
    rb = expected_range_bounds(build(law, args.eps), args.max_m)
    rows = [(r.m, r.lower, r.exact, r.upper) for r in rb.per_m]
    return law.slug, {"dist": law.spec, **rb.record()}, (("m", "lower", "exact", "upper"), rows)


def cmd_simulate(args):
    law = _law(args.dist)
    try:
        cfg = SimConfig(law, args.engine, args.depth, args.replicas, args.seed,
                        args.max_events, args.survival_depth, args.eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    summ = estimate(cfg, args.workers)
    rows = list(enumerate(summ.range_tail().tolist()))
    return law.slug, summ.record(), (("m", "tail"), rows)


def cmd_report(args):
    kw = {}
    if args.which == "fig5":
        kw["m_max"] = args.max_m
    elif args.tol is not None:
        kw["tol"] = args.tol
    rep = reports.REPORTS[args.which](eps=args.eps, **kw)
    return args.which, rep.summary(), (rep.header, rep.rows)


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rumortree", description=__doc__.splitlines()[0],
                                 epilog=f"distribution grammar: {GRAMMAR}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, dist=True):
        p = sub.add_parser(name, help=help_text)
        if dist:
            p.add_argument("--dist", required=True, help=GRAMMAR)
        p.add_argument("--eps", type=_positive(float), default=DEFAULTS.eps,
                       help="truncation mass for the offspring tail")
        p.add_argument("--out", type=Path, help="directory for csv/json artifacts")
        p.set_defaults(func=func)
        return p

    add("law", cmd_law, "offspring law and spreader law table")

    p = add("survival", cmd_survival, "extinction and survival probability")
    p.add_argument("--tol", type=_positive(float), default=DEFAULTS.tol)
    p.add_argument("--cayley", action="store_true",
                   help="homogeneous tree rooted without a source (fixed:d only)")

    p = add("critical", cmd_critical, "bracket the critical family parameter", dist=False)
    p.add_argument("--family", required=True, choices=sorted(FAMILY_DEFAULT_RANGES))
    p.add_argument("--n", type=int, help="number of trials for the binomial family")
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--tol", type=_positive(float), default=DEFAULTS.tol)

    p = add("range", cmd_range, "bounds and exact law of the rumor range")
    p.add_argument("--max-m", type=int, default=DEFAULTS.m_max)

    p = add("simulate", cmd_simulate, "Monte Carlo estimates")
    p.add_argument("--engine", choices=ENGINES, default="generation")
    p.add_argument("--replicas", type=_positive(int), default=DEFAULTS.replicas)
    p.add_argument("--depth", type=_positive(int), default=DEFAULTS.depth)
    p.add_argument("--survival-depth", type=int)
    p.add_argument("--seed", type=int, default=DEFAULTS.seed)
    p.add_argument("--max-events", type=_positive(int), default=DEFAULTS.max_events)
    p.add_argument("--workers", type=_positive(int), default=1)

    p = add("report", cmd_report, "figure and table reproductions", dist=False)
    p.add_argument("which", choices=sorted(reports.REPORTS))
    p.add_argument("--tol", type=_positive(float))
    p.add_argument("--max-m", type=int, default=DEFAULTS.m_max)
    return ap


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        name, summary, table = args.func(args)
    except (UsageError, LawError) as exc:
        print(f"rumortree {args.command}: error: {exc}", file=stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"rumortree {args.command}: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL

    if args.out is None:
        stdout.write(dumps_json(summary))
        return EXIT_OK
    args.out.mkdir(parents=True, exist_ok=True)
    stem = f"{args.command}-{name}"
    write_text(args.out / f"{stem}.json", dumps_json(summary))
    if table is not None:
        write_text(args.out / f"{stem}.csv", dumps_csv(*table))
    return EXIT_OK


def main(argv=None) -> int:
    return run(argv)


def cli_entry() -> None:
    sys.exit(main())
