"""Command-line entry point.

Exit codes: 0 on success, 2 when a verification check fails, 1 on input
errors (unreadable model, unstable ``A``, bad ordering, unsupported case).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import LowRankError, ModelFileError
from . import report
from .modelio import dumps, load_model
from .simulate import SimConfig, write_csv


def _emit(rep: dict, out) -> None:
    text = dumps(rep)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _ordering(args, mf):
    if args.ordering is not None:
        return args.ordering
    return int(mf.extra.get("ordering", 0))


def _gamma(args, mf):
    if args.gamma is not None:
        return args.gamma
    return float(mf.extra.get("gamma", 10.0))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lowrankfb", description="Feedback analysis of rank-deficient processes.")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="F for one or all admissible orderings")
    a.add_argument("model")
    g = a.add_mutually_exclusive_group()
    g.add_argument("--all-orderings", action="store_true")
    g.add_argument("--ordering", type=int)
    a.add_argument("--tol-rank", type=float, default=1e-9)
    a.add_argument("--grid", type=int, default=64)
    a.add_argument("--out")

    s = sub.add_parser("synthesize", help="feedback H by sensitivity interpolation")
    s.add_argument("model")
    s.add_argument("--ordering", type=int)
    s.add_argument("--gamma", type=float)
    s.add_argument("--sigma", type=float, default=0.0)
    s.add_argument("--tol-rank", type=float, default=1e-9)
    s.add_argument("--grid", type=int, default=64)
    s.add_argument("--out")

    m = sub.add_parser("simulate", help="sample paths and optional spectral check")
    m.add_argument("model")
    m.add_argument("--T", type=int, required=True)
    m.add_argument("--seed", type=int, required=True)
    m.add_argument("--burn-in", type=int, default=1000)
    m.add_argument("--windows", type=int, default=64)
    m.add_argument("--check-spectrum", action="store_true")
    m.add_argument("--ordering", type=int, default=0)
    m.add_argument("--out", help="CSV file for the sample paths")
    m.add_argument("--report", help="JSON report file (default: stdout)")

    n = sub.add_parser("network", help="network model and edge list")
    n.add_argument("model")
    n.add_argument("--ordering", type=int)
    n.add_argument("--gamma", type=float)
    n.add_argument("--sigma", type=float, default=0.0)
    n.add_argument("--out")

    f = sub.add_parser("factor", help="factor model W = [I; F] Wu")
    f.add_argument("model")
    f.add_argument("--ordering", type=int)
    f.add_argument("--out")
    return ap


def run(args) -> int:
    if args.command == "simulate":
        mf = load_model(args.model)
        cfg = SimConfig(T=args.T, burn_in=args.burn_in, seed=args.seed, windows=args.windows)
        rep, paths = report.simulation_report(mf, cfg, args.check_spectrum, args.ordering)
        if args.out:
            write_csv(args.out, paths, mf.labels)
        _emit(rep, args.report)
        return 0 if rep["status"] == "PASS" else 2
    mf = load_model(args.model)
    if args.command == "analyze":
        rep = report.analysis_report(mf, None if args.all_orderings else args.ordering, args.tol_rank, args.grid)
    elif args.command == "synthesize":
        rep = report.synthesis_report(mf, _ordering(args, mf), _gamma(args, mf), args.sigma, args.tol_rank, args.grid)
    elif args.command == "network":
        rep = report.network_report(mf, _ordering(args, mf), _gamma(args, mf), args.sigma)
    else:
        rep = report.factor_report(mf, _ordering(args, mf))
    _emit(rep, args.out)
    return 0 if rep["status"] == "PASS" else 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (LowRankError, ModelFileError, ValueError, NotImplementedError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
