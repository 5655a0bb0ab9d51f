"""Command line front end: ``frechet-skew <command> ...``.

Commands: ``pmean``, ``curve``, ``classify``, ``dominance``, ``tailbone``,
``oracle-check``.  Each prints a one-line summary on stdout and writes its
artifact to ``--output`` (or to stdout after the summary line).

Exit codes: 0 success, 1 invalid input, 2 numerical failure (or a failed
oracle), 3 inconclusive classification under ``--strict``.  Errors are
reported on stderr as one JSON object.
"""

import argparse
import json
import logging
import os
import sys
import warnings
from dataclasses import asdict

import numpy as np

from . import __version__
from .distributions import make_distribution
from .dominance import dominance_report
from .errors import FrechetSkewError, InputError, NumericalError
from .fileio import (csv_text, default_grid, load_samples, parse_grid, parse_spec,
                     to_json_text)
from .pmean import pmean_curve, solve_pmean, with_slope
from .skewness import classify
from .tailbone import tailbone_trajectory

EXIT_INPUT = 1
EXIT_NUMERICAL = 2
EXIT_INCONCLUSIVE = 3

log = logging.getLogger("frechet_skew")


def build_parser():
    ap = argparse.ArgumentParser(prog="frechet-skew",
                                 description="Fréchet p-means and skewness diagnostics.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, grid=False, point=False):
        p.add_argument("--dist", required=True, help="distribution spec JSON ('-' for stdin)")
        if point:
            p.add_argument("--p", type=float, required=True, help="order p > 0")
        if grid:
            p.add_argument("--grid", help="geometric:a..b:n | linear:a..b:n | p1,p2,...")
            p.add_argument("--full-domain", action="store_true",
                           help="admit p in (0, 1) as well as the moment domain")
        p.add_argument("-o", "--output", help="artifact path (default: stdout)")

    p = sub.add_parser("pmean", help="solve for nu_p at one p")
    common(p, point=True)
    p.add_argument("--format", choices=("csv", "json"), default="json")

    p = sub.add_parser("curve", help="nu_p and its slope along a p grid")
    common(p, grid=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("classify", help="skewness classification report")
    common(p, grid=True)
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--strict", action="store_true",
                   help="exit 3 when the classification is indeterminate")
    p.add_argument("--no-ell", action="store_true", help="skip the magnitude estimate")

    p = sub.add_parser("dominance", help="tail dominance report at one p")
    common(p, point=True)
    p.add_argument("--format", choices=("json",), default="json")

    p = sub.add_parser("tailbone", help="sample p-means in R^d along a p grid")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--samples", help="CSV with one point per row")
    src.add_argument("--dist", action="append",
                     help="spec JSON for one coordinate; repeat for product samples")
    p.add_argument("--n", type=int, default=100_000, help="number of draws with --dist")
    p.add_argument("--seed", type=int, help="RNG seed (required with --dist)")
    p.add_argument("--grid", default="1,2,4,8")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("oracle-check", help="run the closed-form oracle suite")
    p.add_argument("-o", "--output", default="oracle_check.json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json",), default="json")
    return ap


def _emit(text, output, summary):
    print(summary)
    if output:
        d = os.path.dirname(os.path.abspath(output))
        if not os.path.isdir(d):
            raise InputError(f"output directory does not exist: {d}")
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _g(v):
    return format(float(v), ".17g")


def cmd_pmean(args):
    d = make_distribution(parse_spec(args.dist))
    pt = with_slope(d, solve_pmean(d, args.p))
    if args.format == "csv":
        text = csv_text(["p", "nu_p", "H_p", "dnu_dp", "method", "residual"],
                        [[_g(pt.p), _g(pt.nu_p), _g(pt.H_p), _g(pt.dnu_dp), pt.method,
                          _g(pt.residual)]])
    else:
        text = to_json_text({k: v for k, v in asdict(pt).items()})
    _emit(text, args.output, f"nu_p = {pt.nu_p:.15g} (p = {pt.p:g})")
    return 0


def _grid(args, d):
    return parse_grid(args.grid) if args.grid else default_grid(d, args.full_domain)


def cmd_curve(args):
    d = make_distribution(parse_spec(args.dist))
    grid = _grid(args, d)
    curve = pmean_curve(d, grid, args.full_domain)
    if args.format == "csv":
        text = curve.to_csv()
    else:
        text = to_json_text({"domain_used": curve.domain_used, "dropped": curve.dropped,
                             "points": [asdict(pt) for pt in curve.points]})
    _emit(text, args.output, f"{len(curve.points)} points, {len(curve.dropped)} dropped")
    return 0


def cmd_classify(args):
    d = make_distribution(parse_spec(args.dist))
    grid = _grid(args, d)
    rep = classify(d, grid, args.full_domain, with_ell=not args.no_ell)
    if args.output:
        root, _ = os.path.splitext(args.output)
        rep.curve_csv_path = root + ".curve.csv"
        with open(rep.curve_csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(rep.curve.to_csv())
    _emit(rep.to_json() + "\n", args.output, rep.human_label)
    if rep.classification == "indeterminate":
        log.warning("monotonicity fails at p=%s", rep.offending_p)
        if args.strict:
            _error("Inconclusive", f"classification indeterminate at p={rep.offending_p}",
                   EXIT_INCONCLUSIVE)
            return EXIT_INCONCLUSIVE
    return 0


def cmd_dominance(args):
    d = make_distribution(parse_spec(args.dist))
    rep = dominance_report(d, args.p)
    _emit(rep.to_json() + "\n", args.output, rep.verdict)
    return 0


def cmd_tailbone(args):
    if args.samples:
        X = load_samples(args.samples)
    else:
        if args.seed is None:
            raise InputError("--seed is required when sampling with --dist")
        if args.n < 1:
            raise InputError("--n must be positive")
        rng = np.random.default_rng(args.seed)
        cols = []
        for path in args.dist:
            d = make_distribution(parse_spec(path))
            cols.append(d.ppf(rng.random(args.n)))
        X = np.column_stack(cols)
    traj = tailbone_trajectory(X, parse_grid(args.grid))
    if args.format == "csv":
        text = traj.to_csv()
    else:
        text = to_json_text({
            "entries": [{"p": e.p, "nu": list(map(float, e.nu)), "objective": e.objective,
                         "iterations": e.iterations, "converged": e.converged}
                        for e in traj.entries],
            "zeta": None if traj.zeta is None else list(map(float, traj.zeta)),
            "zeta_note": traj.zeta_note,
        })
    z = "none" if traj.zeta is None else "(" + ", ".join(f"{v:.6g}" for v in traj.zeta) + ")"
    _emit(text, args.output, f"zeta = {z}")
    return 0


def cmd_oracle_check(args):
    from .oracles import run_oracles
    results = run_oracles(seed=args.seed)
    n_fail = sum(not r["passed"] for r in results)
    artifact = {"seed": args.seed, "n_checks": len(results), "n_failed": n_fail,
                "checks": results}
    _emit(to_json_text(artifact), args.output,
          f"oracle-check: {len(results) - n_fail}/{len(results)} passed")
    return 0 if n_fail == 0 else EXIT_NUMERICAL


COMMANDS = {
    "pmean": cmd_pmean,
    "curve": cmd_curve,
    "classify": cmd_classify,
    "dominance": cmd_dominance,
    "tailbone": cmd_tailbone,
    "oracle-check": cmd_oracle_check,
}


def _error(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage; keep the input-error code
        if exc.code not in (0, None):
            _error("UsageError", "invalid command line", EXIT_INPUT)
            return EXIT_INPUT
        return 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    warnings.simplefilter("default")
    logging.captureWarnings(True)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        _error(type(exc).__name__, str(exc), EXIT_INPUT)
        return EXIT_INPUT
    except (NumericalError, ArithmeticError) as exc:
        _error(type(exc).__name__, str(exc), EXIT_NUMERICAL)
        return EXIT_NUMERICAL
    except FrechetSkewError as exc:
        _error(type(exc).__name__, str(exc), EXIT_NUMERICAL)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
