"""Acceptance criteria 1-12.

Each test carries ``criterion(n)``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from frechet_skew import (build_tail_pair, cdf_dominance, classify,
                          decreasing_pdf, dist, dnu_dp_general, dnu_dp_interior,
                          dominance_report, frechet_pmean_nd, gamma_iff_nu4, magnitude_ell,
                          mirrored, pmean_curve, single_crossing, solve_pmean,
                          tailbone_trajectory)
from frechet_skew.dominance import LEFT, RIGHT, log_expectation_gap
from frechet_skew.pmean import dnu_dp_fd, limit_at_zero, with_slope

pytestmark = pytest.mark.acceptance


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ---------------------------------------------------------------- 1
@pytest.mark.criterion(1)
def test_lognormal_closed_form():
    t0 = time.perf_counter()
    worst = 0.0
    for mu, s2 in ((0.0, 1.0), (0.5, 0.5), (2.0, 0.25)):
        d = dist("lognormal", mu=mu, sigma2=s2)
        for p in (0.25, 0.5, 1, 2, 3, 4, 6):
            exact = math.exp(mu + (p - 1) / 2 * s2)
            worst = max(worst, rel_err(solve_pmean(d, p).nu_p, exact))
    elapsed = time.perf_counter() - t0
    print(f"max rel err {worst:.2e}, {elapsed:.2f} s")
    assert worst <= 1e-6
    assert elapsed < 10.0


# ---------------------------------------------------------------- 2
@pytest.mark.criterion(2)
def test_lognormal_half_half_anchors():
    d = dist("lognormal", mu=0.5, sigma2=0.5)
    assert rel_err(d.mode(), 1.0) <= 1e-6
    for p, exact in ((1, math.exp(0.5)), (2, math.exp(0.75)), (4, math.exp(1.25))):
        assert rel_err(solve_pmean(d, p).nu_p, exact) <= 1e-6


# ---------------------------------------------------------------- 3
def _gamma_closed_form(name, d):
    # standardized third moments from the families' moment formulas
    if name == "exponential":
        return 2.0
    if name == "gamma":
        return 2.0 / math.sqrt(d.spec.params["alpha"])
    if name == "lognormal":
        s2 = d.spec.params["sigma2"]
        return (math.exp(s2) + 2) * math.sqrt(math.expm1(s2))
    a, b = d.spec.params["alpha"], d.spec.params["beta"]
    return 2 * (b - a) * math.sqrt(a + b + 1) / ((a + b + 2) * math.sqrt(a * b))


@pytest.mark.criterion(3)
@pytest.mark.parametrize("name,params", [
    ("exponential", {"lam": 1.0}),
    ("gamma", {"alpha": 2.0, "lam": 1.0}),
    ("lognormal", {"mu": 0.0, "sigma2": 0.5}),
    ("beta", {"alpha": 2.0, "beta": 5.0}),
])
def test_cubic_identity(name, params):
    d = dist(name, **params)
    rec = gamma_iff_nu4(d)
    exact = _gamma_closed_form(name, d)
    assert rel_err(rec.gamma_direct, exact) <= 1e-6
    assert rel_err(rec.gamma_identity, exact) <= 1e-6


@pytest.mark.criterion(3)
def test_exponential_nu4_cubic_root():
    roots = np.roots([1.0, -3.0, 6.0, -6.0])
    a = float(roots[np.argmin(np.abs(roots.imag))].real)
    assert abs(a - 1.59607) < 1e-5
    e = dist("exponential", lam=1.0)
    assert rel_err(solve_pmean(e, 4.0).nu_p, a) <= 1e-6
    assert rel_err(gamma_iff_nu4(e).gamma_identity, 2.0) <= 1e-6


# ---------------------------------------------------------------- 4
def _custom_exponential():
    from frechet_skew import custom
    x = np.linspace(0.0, 40.0, 8001)
    return custom(x, np.exp(-x))


SIGN_CASES = {
    "exponential(1)": lambda: dist("exponential", lam=1.0),
    "gamma(2,1)": lambda: dist("gamma", alpha=2.0, lam=1.0),
    "gamma(0.5,1)": lambda: dist("gamma", alpha=0.5, lam=1.0),
    "beta(2,5)": lambda: dist("beta", alpha=2.0, beta=5.0),
    "beta(5,2)": lambda: dist("beta", alpha=5.0, beta=2.0),
    "lognormal(0,0.5)": lambda: dist("lognormal", mu=0.0, sigma2=0.5),
    "pareto(5)": lambda: dist("pareto", alpha=5.0),
    "normal(0,1)": lambda: dist("normal", mu=0.0, sigma2=1.0),
    "custom exponential": _custom_exponential,
    "mirrored gamma(2,1)": lambda: mirrored(dist("gamma", alpha=2.0, lam=1.0)),
    "mirrored custom exponential": lambda: mirrored(_custom_exponential()),
}
EXPECTED_SIGN = {"beta(5,2)": -1, "normal(0,1)": 0, "mirrored gamma(2,1)": -1,
                 "mirrored custom exponential": -1}


@pytest.mark.criterion(4)
@pytest.mark.parametrize("name", list(SIGN_CASES))
def test_sign_equivalence(name):
    rec = gamma_iff_nu4(SIGN_CASES[name]())
    assert rec.signs_agree
    expected = EXPECTED_SIGN.get(name, 1)
    if expected:
        assert np.sign(rec.gamma_direct) == expected
        assert np.sign(rec.nu4 - rec.nu2) == expected


# ---------------------------------------------------------------- 5
MONO_CASES = [
    ("exponential", {"lam": 1.0}, np.geomspace(0.01, 8, 16), True),
    ("gamma", {"alpha": 2.0, "lam": 1.0}, np.geomspace(0.01, 8, 16), True),
    ("gamma", {"alpha": 0.5, "lam": 1.0}, np.geomspace(0.01, 8, 16), True),
    ("beta", {"alpha": 2.0, "beta": 5.0}, np.geomspace(0.01, 8, 16), True),
    ("pareto", {"alpha": 3.0}, np.geomspace(1, 4 - 1e-3, 16), False),
    ("pareto", {"alpha": 0.5}, np.geomspace(1, 1.5 - 1e-3, 16), False),
]


@pytest.mark.criterion(5)
def test_monotonicity_certificates():
    t0 = time.perf_counter()
    failures = []
    for name, params, grid, full in MONO_CASES:
        d = dist(name, **params)
        rep = classify(d, grid, full_domain=full, with_ell=False)
        slopes = rep.curve.slopes
        if rep.curve.dropped or slopes.size != 16 or not np.all(slopes > 1e-9):
            failures.append((name, params, slopes.min()))
        if not rep.classification.startswith("truly_") or "positive" not in rep.classification:
            failures.append((name, params, rep.classification))
    elapsed = time.perf_counter() - t0
    print(f"{elapsed:.1f} s")
    assert not failures
    assert elapsed < 60.0


# ---------------------------------------------------------------- 6
DERIV_DISTS = [
    ("gamma", {"alpha": 2.0, "lam": 1.0}),
    ("beta", {"alpha": 2.0, "beta": 5.0}),
    ("lognormal", {"mu": 0.0, "sigma2": 1.0}),
]


@pytest.mark.criterion(6)
@pytest.mark.parametrize("name,params", DERIV_DISTS)
@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_derivative_formulas_match_fd(name, params, p):
    d = dist(name, **params)
    pt = solve_pmean(d, p)
    fd = dnu_dp_fd(d, p, 1e-4)
    assert rel_err(dnu_dp_interior(d, pt), fd) <= 1e-4
    assert rel_err(dnu_dp_general(d, pt), fd) <= 1e-4


POSITIVE_BUILTINS = [
    ("exponential", {"lam": 1.0}),
    ("gamma", {"alpha": 2.0, "lam": 1.0}),
    ("gamma", {"alpha": 0.5, "lam": 1.0}),
    ("beta", {"alpha": 2.0, "beta": 5.0}),
    ("lognormal", {"mu": 0.0, "sigma2": 1.0}),
    ("pareto", {"alpha": 3.0}),
    ("pareto", {"alpha": 0.5}),
]


@pytest.mark.criterion(6)
@pytest.mark.parametrize("name,params", POSITIVE_BUILTINS)
def test_slope_at_median_positive(name, params):
    d = dist(name, **params)
    pt = with_slope(d, solve_pmean(d, 1.0))
    assert pt.method == "general_formula"
    assert pt.dnu_dp > 0


# ---------------------------------------------------------------- 7
COHERENCE_DISTS = POSITIVE_BUILTINS + [("beta", {"alpha": 5.0, "beta": 2.0})]
COHERENCE_P = (0.5, 1.0, 1.5, 2.0, 3.0, 4.0)


def _coherence_points():
    for name, params in COHERENCE_DISTS:
        d = dist(name, **params)
        for p in COHERENCE_P:
            if d.moment_exists(p - 1) or p < 1:
                yield d, p


@pytest.mark.criterion(7)
def test_dominance_coherence():
    checked = 0
    for d, p in _coherence_points():
        pt = solve_pmean(d, p)
        verdict = cdf_dominance(build_tail_pair(d, pt)).verdict
        cross = single_crossing(d, pt)
        if cross.status == "satisfied":
            assert verdict == RIGHT, (d, p)
        if cross.status == "satisfied_reversed":
            assert verdict == LEFT, (d, p)
        if verdict in (RIGHT, LEFT):
            gap = log_expectation_gap(d, pt)
            assert (gap if verdict == RIGHT else -gap) > 1e-9, (d, p, gap)
        checked += 1
    assert checked >= 30


@pytest.mark.criterion(7)
@pytest.mark.parametrize("d", [dist("exponential", lam=1.0), dist("gamma", alpha=0.5, lam=1.0),
                               dist("gamma", alpha=0.8, lam=2.0)], ids=repr)
def test_decreasing_pdf_gives_dominance(d):
    assert decreasing_pdf(d)
    for p in COHERENCE_P:
        assert cdf_dominance(build_tail_pair(d, p=p)).verdict == RIGHT


# ---------------------------------------------------------------- 8
@pytest.mark.criterion(8)
@pytest.mark.parametrize("s2", [0.25, 1.0])
def test_ell_lognormal(s2):
    est = magnitude_ell(dist("lognormal", mu=0.0, sigma2=s2))
    assert est.converged
    assert abs(est.value - s2 / 2) <= 1e-3
    for mu in (-1.0, 2.0):
        shifted = magnitude_ell(dist("lognormal", mu=mu, sigma2=s2))
        assert abs(shifted.value - est.value) <= 1e-6


# ---------------------------------------------------------------- 9
@pytest.mark.criterion(9)
def test_limit_at_zero_lognormal():
    d = dist("lognormal", mu=0.0, sigma2=1.0)
    est, nus = limit_at_zero(d, (0.2, 0.1, 0.05, 0.025))
    assert abs(est - math.exp(-0.5)) <= 1e-3
    assert est > math.exp(-1.0)
    assert rel_err(d.mode(), math.exp(-1.0)) <= 1e-12


# ---------------------------------------------------------------- 10
@pytest.mark.criterion(10)
def test_normal_symmetric_control():
    d = dist("normal", mu=0.0, sigma2=1.0)
    grid = np.geomspace(0.01, 8, 16)
    curve = pmean_curve(d, grid, full_domain=True)
    assert np.max(np.abs(curve.nu)) < 1e-8
    assert classify(d, grid, full_domain=True, with_ell=False).classification == "symmetric"
    for p in (0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 8.0):
        assert dominance_report(d, p).verdict == "equal"


# ---------------------------------------------------------------- 11
@pytest.mark.criterion(11)
def test_tailbone_p2_is_mean():
    X = np.random.default_rng(11).lognormal(size=(50_000, 3))
    nu = frechet_pmean_nd(X, 2.0).nu
    assert np.max(np.abs(nu - X.mean(axis=0))) <= 1e-12


@pytest.mark.criterion(11)
def test_tailbone_gamma_sample_pmeans():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    x = rng.gamma(2.0, 1.0, size=100_000)
    d = dist("gamma", alpha=2.0, lam=1.0)
    B = 200
    for p in (1.0, 2.0, 3.0):
        est = frechet_pmean_nd(x, p).nu[0]
        boot = np.array([frechet_pmean_nd(x[rng.integers(0, x.size, x.size)], p).nu[0]
                         for _ in range(B)])
        se = boot.std(ddof=1)
        exact = solve_pmean(d, p).nu_p
        print(f"p={p:g}: sample {est:.6f}, population {exact:.6f}, SE {se:.2e}")
        assert abs(est - exact) <= 3 * se
    assert time.perf_counter() - t0 < 120.0


@pytest.mark.criterion(11)
def test_tailbone_direction_first_axis():
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    n = 4_000_000
    X = np.column_stack([rng.exponential(1.0, n), rng.standard_normal(n)])
    traj = tailbone_trajectory(X, [2.0, 4.0, 8.0])
    assert all(e.converged for e in traj.entries)
    assert traj.zeta is not None, traj.zeta_note
    angle = math.atan2(abs(traj.zeta[1]), traj.zeta[0])
    print(f"zeta = {traj.zeta}, angle {angle:.4f} rad")
    assert angle <= 0.05
    assert time.perf_counter() - t0 < 120.0


# ---------------------------------------------------------------- 12
@pytest.mark.criterion(12)
def test_oracle_check_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"oracle_{k}.json"
        r = subprocess.run([sys.executable, "-m", "frechet_skew", "oracle-check", "-o", str(path)],
                           capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert b'"n_failed": 0' in outs[0]
