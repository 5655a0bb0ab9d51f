"""Compare the compiled and numpy tailbone kernels.

Times one ``pmean_terms`` pass and one full ``frechet_pmean_nd`` solve per
backend over a few sample sizes, checks that both backends agree, and
prints a table (or JSON with ``--json``).

    python benchmarks/bench_kernels.py --sizes 10000 100000 1000000 --d 2
"""

import argparse
import json
import sys
import timeit
from contextlib import contextmanager

import numpy as np

from frechet_skew import _kernels_py, kernels, tailbone

try:
    from frechet_skew import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


@contextmanager
def backend(mod):
    saved = kernels.pmean_terms, kernels.log_objective
    kernels.pmean_terms, kernels.log_objective = mod.pmean_terms, mod.log_objective
    try:
        yield
    finally:
        kernels.pmean_terms, kernels.log_objective = saved


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def run(sizes, d, p, repeat, seed):
    mods = {"python": _kernels_py}
    if _kernels_c is not None:
        mods["cython"] = _kernels_c
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        X = np.column_stack([rng.exponential(size=n)] + [rng.standard_normal(n)
                                                          for _ in range(d - 1)])
        a = X.mean(axis=0)
        row = {"n": n, "d": d, "p": p}
        nus = {}
        for name, mod in mods.items():
            row[f"{name}_terms_s"] = best_of(lambda: mod.pmean_terms(X, a, p), repeat)
            with backend(mod):
                row[f"{name}_solve_s"] = best_of(lambda: tailbone.frechet_pmean_nd(X, p),
                                                 max(1, repeat // 2))
                nus[name] = tailbone.frechet_pmean_nd(X, p).nu
        if "cython" in mods:
            row["speedup_terms"] = row["python_terms_s"] / row["cython_terms_s"]
            row["speedup_solve"] = row["python_solve_s"] / row["cython_solve_s"]
            row["max_nu_diff"] = float(np.max(np.abs(nus["python"] - nus["cython"])))
        rows.append(row)
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10_000, 100_000, 1_000_000])
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--p", type=float, default=3.0)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    rows = run(args.sizes, args.d, args.p, args.repeat, args.seed)
    if args.json:
        json.dump(rows, sys.stdout, indent=2)
        print()
        return 0
    if _kernels_c is None:
        print("compiled kernels not built; timing the numpy path only")
    hdr = f"{'n':>9} {'py terms':>10} {'cy terms':>10} {'x':>6} {'py solve':>10} " \
          f"{'cy solve':>10} {'x':>6} {'|dnu|':>9}"
    print(f"d={args.d}, p={args.p:g}, best of {args.repeat}")
    print(hdr)
    for r in rows:
        cy = "cython_terms_s" in r
        print(f"{r['n']:>9} {r['python_terms_s']:>10.4f} "
              f"{r['cython_terms_s'] if cy else float('nan'):>10.4f} "
              f"{r.get('speedup_terms', float('nan')):>6.1f} {r['python_solve_s']:>10.4f} "
              f"{r['cython_solve_s'] if cy else float('nan'):>10.4f} "
              f"{r.get('speedup_solve', float('nan')):>6.1f} "
              f"{r.get('max_nu_diff', float('nan')):>9.1e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
