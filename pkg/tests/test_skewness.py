import json
import math

import numpy as np
import pytest
from scipy.interpolate import PchipInterpolator

from frechet_skew import (classify, custom, dist, gamma_iff_nu4, magnitude_ell, mirrored,
                          pearson_coefficients, van_zwet)
from frechet_skew.errors import EmptyDomainIntersection, MomentDiverges
from frechet_skew.skewness import central_moment


def non_monotone_custom():
    # right-skewed bulk on [0.55, 1] over a thin floor reaching 0:
    # nu_p rises at first, then falls toward the midrange 1/2
    x = np.linspace(0.0, 1.0, 4001)
    bump = np.where(x > 0.55, (x - 0.55) * np.exp(-(x - 0.55) / 0.05), 0.0)
    f = 0.02 + bump / np.trapezoid(bump, x)
    return custom(x, f / PchipInterpolator(x, f).integrate(0.0, 1.0))


def test_pearson_exponential():
    pc = pearson_coefficients(dist("exponential", lam=1.0))
    assert pc.mode_skewness == pytest.approx(1.0, rel=1e-10)
    assert pc.median_skewness == pytest.approx(3 * (1 - math.log(2)), rel=1e-10)
    assert pc.moment_skewness == pytest.approx(2.0, rel=1e-8)
    assert pc.sigma == pytest.approx(1.0, rel=1e-10)


def test_pearson_beta_closed_form():
    a, b = 2.0, 5.0
    pc = pearson_coefficients(dist("beta", alpha=a, beta=b))
    mean = a / (a + b)
    sd = math.sqrt(a * b / ((a + b) ** 2 * (a + b + 1)))
    assert pc.nu2 == pytest.approx(mean, rel=1e-12)
    assert pc.sigma == pytest.approx(sd, rel=1e-10)
    assert pc.mode_skewness == pytest.approx((mean - 0.2) / sd, rel=1e-10)


def test_pearson_infinite_moments():
    pc = pearson_coefficients(dist("pareto", alpha=0.5))
    assert (pc.mode_skewness, pc.median_skewness, pc.moment_skewness, pc.sigma) == (None,) * 4
    assert pc.nu1 == pytest.approx(4.0)
    pc = pearson_coefficients(dist("pareto", alpha=2.5))
    assert pc.moment_skewness is None and pc.sigma is not None


def test_gamma_iff_nu4_requires_third_moment():
    with pytest.raises(MomentDiverges):
        gamma_iff_nu4(dist("pareto", alpha=2.5))


def test_central_moment_normal():
    n = dist("normal", mu=1.0, sigma2=4.0)
    assert central_moment(n, 1.0, 2) == pytest.approx(4.0, rel=1e-12)
    assert central_moment(n, 1.0, 4) == pytest.approx(48.0, rel=1e-12)
    assert abs(central_moment(n, 1.0, 3)) < 1e-12


@pytest.mark.parametrize("d,expected", [
    (dist("gamma", alpha=2.0, lam=1.0), True),
    (dist("exponential", lam=1.0), True),
    (dist("lognormal", mu=0.0, sigma2=1.0), True),
    (mirrored(dist("gamma", alpha=2.0, lam=1.0)), False),
    (dist("beta", alpha=5.0, beta=2.0), False),
], ids=repr)
def test_van_zwet(d, expected):
    assert van_zwet(d) is expected


@pytest.mark.parametrize("d,grid,full,label", [
    (dist("exponential", lam=1.0), np.geomspace(0.01, 8, 8), True,
     "truly_mode_positive_full_domain"),
    (dist("exponential", lam=1.0), np.geomspace(1, 8, 6), False, "truly_mode_positive"),
    (dist("gamma", alpha=0.5, lam=1.0), np.geomspace(1, 8, 6), False, "truly_positive"),
    (dist("beta", alpha=5.0, beta=2.0), np.geomspace(1, 8, 6), False, "truly_mode_negative"),
    (dist("normal", mu=0.0, sigma2=1.0), np.geomspace(0.1, 8, 6), True, "symmetric"),
    (dist("pareto", alpha=0.5), np.geomspace(1, 1.49, 6), False, "truly_mode_positive"),
], ids=lambda v: repr(v) if hasattr(v, "spec") else None)
def test_classify_labels(d, grid, full, label):
    rep = classify(d, grid, full_domain=full, with_ell=False)
    assert rep.classification == label
    assert rep.offending_p is None


def test_classify_indeterminate_reports_offending_p():
    rep = classify(non_monotone_custom(), np.geomspace(1, 64, 10), with_ell=False)
    assert rep.classification == "indeterminate"
    assert rep.offending_p is not None


def test_full_domain_suffix_needs_small_p():
    rep = classify(dist("exponential", lam=1.0), [1.0, 2.0, 4.0], full_domain=True,
                   with_ell=False)
    assert rep.classification == "truly_mode_positive"


def test_human_label_and_json():
    rep = classify(dist("exponential", lam=1.0), [0.5, 1.0, 2.0], full_domain=True,
                   with_ell=False)
    assert rep.human_label == "truly_mode_positive (full domain)"
    obj = json.loads(rep.to_json())
    assert set(obj) == {"pearson", "classification", "ell", "van_zwet", "curve_csv_path"}
    assert obj["pearson"]["moment_skewness"] == pytest.approx(2.0, rel=1e-8)


def test_classify_empty_domain():
    with pytest.warns(UserWarning), pytest.raises(EmptyDomainIntersection):
        classify(dist("pareto", alpha=0.5), [2.0, 3.0], with_ell=False)


def test_ell_exponential_is_zero():
    est = magnitude_ell(dist("exponential", lam=1.0))
    assert est.converged
    assert abs(est.value) < 1e-3


def test_ell_bounded_support_absent():
    est = magnitude_ell(dist("beta", alpha=2.0, beta=5.0))
    assert est.value is None and not est.converged


def test_ell_scale_invariant():
    a = magnitude_ell(dist("gamma", alpha=2.0, lam=1.0))
    b = magnitude_ell(dist("gamma", alpha=2.0, lam=7.0))
    assert a.converged and b.converged
    assert b.value == pytest.approx(a.value, abs=1e-9)
