"""Closed-form oracle suite used by ``frechet-skew oracle-check``.

Each check compares a computed quantity with a value obtained
independently (closed form, polynomial root, or trivial identity).  The
output is a list of plain dicts with no timings, so repeated runs
serialize to identical bytes.
"""

import math

import numpy as np

from .distributions import closed_form_pmean, dist, mirrored, moment_domain
from .dominance import build_tail_pair, cdf_dominance
from .pmean import balance_residual, dnu_dp_general, dnu_dp_interior, limit_at_zero, solve_pmean
from .skewness import gamma_iff_nu4, magnitude_ell, van_zwet
from .tailbone import frechet_pmean_nd


def _check(name, value, expected, tol, relative=True):
    value, expected = float(value), float(expected)
    scale = max(abs(expected), 1.0) if relative else 1.0
    err = abs(value - expected)
    return {"name": name, "value": value, "expected": expected, "tolerance": tol,
            "relative": relative, "error": err / scale, "passed": bool(err <= tol * scale)}


def _flag(name, ok, detail=""):
    return {"name": name, "value": bool(ok), "expected": True, "tolerance": 0.0,
            "relative": False, "error": 0.0 if ok else 1.0, "passed": bool(ok),
            "detail": detail}


def _exp_nu4():
    roots = np.roots([1.0, -3.0, 6.0, -6.0])
    return float(roots[np.argmin(np.abs(roots.imag))].real)


def run_oracles(seed=0):
    out = []
    e1 = dist("exponential", lam=1.0)
    out.append(_check("exponential.nu1=ln2", solve_pmean(e1, 1.0).nu_p, math.log(2), 1e-10))
    out.append(_check("exponential.nu2=1", solve_pmean(e1, 2.0).nu_p, 1.0, 1e-10))
    out.append(_check("exponential.nu4=cubic_root", solve_pmean(e1, 4.0).nu_p, _exp_nu4(), 1e-10))
    out.append(_check("exponential.G(0.5)=2exp(-0.5)-1", balance_residual(e1, 1.0, 0.5),
                      2 * math.exp(-0.5) - 1, 1e-10, relative=False))

    for mu, s2 in ((0.0, 1.0), (0.5, 0.5), (2.0, 0.25)):
        ln = dist("lognormal", mu=mu, sigma2=s2)
        for p in (0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0):
            out.append(_check(f"lognormal({mu:g},{s2:g}).nu_{p:g}", solve_pmean(ln, p).nu_p,
                              closed_form_pmean(ln, p), 1e-6))

    fig = dist("lognormal", mu=0.5, sigma2=0.5)
    out.append(_check("lognormal(0.5,0.5).mode", fig.mode(), 1.0, 1e-12))
    ln1 = dist("lognormal", mu=0.0, sigma2=1.0)
    pt = solve_pmean(ln1, 2.0)
    out.append(_check("lognormal(0,1).dnu_dp(2)", dnu_dp_interior(ln1, pt),
                      0.5 * math.exp(0.5), 1e-6))
    lh = dist("lognormal", mu=0.0, sigma2=0.5)
    out.append(_check("lognormal(0,0.5).dnu_dp(0.5)", dnu_dp_general(lh, solve_pmean(lh, 0.5)),
                      0.25 * math.exp(-0.125), 1e-6))

    for name, d in (("exponential(1)", e1), ("gamma(2,1)", dist("gamma", alpha=2.0, lam=1.0)),
                    ("lognormal(0,0.5)", lh), ("beta(2,5)", dist("beta", alpha=2.0, beta=5.0))):
        rec = gamma_iff_nu4(d)
        out.append(_check(f"{name}.cubic_identity", rec.gamma_identity, rec.gamma_direct, 1e-6))
        out.append(_flag(f"{name}.sign(gamma)=sign(nu4-nu2)", rec.signs_agree))
    out.append(_check("exponential(1).gamma", gamma_iff_nu4(e1).gamma_direct, 2.0, 1e-8))

    p3 = dist("pareto", alpha=3.0)
    out.append(_check("pareto(3).domain_sup", moment_domain(p3).upper, 4.0, 0.0))
    out.append(_check("pareto(3).median", solve_pmean(p3, 1.0).nu_p, 2 ** (1 / 3), 1e-10))

    for s2 in (1.0, 0.25):
        est = magnitude_ell(dist("lognormal", mu=0.0, sigma2=s2))
        out.append(_check(f"lognormal(0,{s2:g}).ell", est.value if est.value is not None
                          else math.nan, s2 / 2, 1e-3, relative=False))
    lim, _ = limit_at_zero(ln1)
    out.append(_check("lognormal(0,1).nu_0+", lim, math.exp(-0.5), 1e-3, relative=False))

    nrm = dist("normal", mu=0.0, sigma2=1.0)
    for p in (0.5, 1.0, 2.0, 3.0):
        out.append(_check(f"normal(0,1).nu_{p:g}", solve_pmean(nrm, p).nu_p, 0.0, 1e-8,
                          relative=False))
    out.append(_flag("normal(0,1).tails_equal_p2",
                     cdf_dominance(build_tail_pair(nrm, p=2.0)).verdict == "equal"))
    out.append(_flag("gamma(2,1).van_zwet", van_zwet(dist("gamma", alpha=2.0, lam=1.0))))
    mg = mirrored(dist("gamma", alpha=2.0, lam=1.0))
    out.append(_flag("mirrored_gamma.van_zwet_fails", not van_zwet(mg)))
    out.append(_check("mirrored_gamma.nu2", solve_pmean(mg, 2.0).nu_p, -2.0, 1e-6))

    rng = np.random.default_rng(seed)
    X = rng.lognormal(0.0, 1.0, size=(10_000, 2))
    nu2 = frechet_pmean_nd(X, 2.0).nu
    out.append(_check("tailbone.p2=mean", float(np.max(np.abs(nu2 - X.mean(axis=0)))), 0.0,
                      1e-12, relative=False))
    sq = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]])
    nu1 = frechet_pmean_nd(sq, 1.0).nu
    out.append(_check("tailbone.square.p1", float(np.max(np.abs(nu1 - 1.0))), 0.0, 1e-9,
                      relative=False))
    return out
