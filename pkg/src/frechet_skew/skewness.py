"""Skewness diagnostics built on the p-mean curve.

* Pearson's mode, median and moment coefficients.
* The moment identity ``gamma = t**3 + 3 t`` with ``t = (nu_4 - nu_2) / sigma``.
* Classification of "true" (mode) positive or negative skewness: ``nu_p``
  strictly monotone in ``p`` on a grid, optionally anchored at the mode and
  optionally extended to ``p`` in ``(0, 1)``.
* The magnitude ``ell = lim (d nu_p / dp) / (nu_p - nu_1)`` as ``p``
  approaches the top of the moment domain.
* The van Zwet condition, in the orientation that matches right-tail
  dominance at ``p = 1``: ``F(nu_1 - x) + F(nu_1 + x) <= 1``.
"""

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .distributions import moment_domain
from .errors import EmptyDomainIntersection, MomentDiverges, NumericalError
from .pmean import pmean_curve, scaled_tail_moment, solve_pmean, with_slope

MONO_TOL = 1e-9
VAN_ZWET_TOL = 1e-9
ELL_CAUCHY = 1e-3
ELL_P0 = 4.0
ELL_RATIO = math.sqrt(2.0)
ELL_P_MAX = 256.0


@dataclass(frozen=True)
class PearsonCoefficients:
    """Pearson coefficients; a field is ``None`` when its moment is infinite."""

    mode_skewness: Optional[float]
    median_skewness: Optional[float]
    moment_skewness: Optional[float]
    sigma: Optional[float]
    nu0: Optional[float] = None
    nu1: Optional[float] = None
    nu2: Optional[float] = None


def central_moment(dist, c, k):
    """``E[(X - c)^k]`` for integer ``k >= 1`` via the two tail integrals."""
    right = _plain(scaled_tail_moment(dist, c, "right", k + 1))
    left = _plain(scaled_tail_moment(dist, c, "left", k + 1))
    return right + (-1) ** k * left


def _plain(t):
    m, s = t
    return m * math.exp(s) if m else 0.0


def _mean(dist, nu1):
    return nu1 + central_moment(dist, nu1, 1)


def pearson_coefficients(dist):
    """Mode, median and moment skewness.

    ``nu1`` comes from the p-mean solver at ``p = 1``; the mean, ``sigma``
    and the third central moment are computed by quadrature about the
    median.  Coefficients whose moments diverge are ``None``.
    """
    nu1 = solve_pmean(dist, 1.0).nu_p
    nu0 = dist.mode()
    if not dist.moment_exists(2):
        nu2 = _mean(dist, nu1) if dist.moment_exists(1) else None
        return PearsonCoefficients(None, None, None, None, nu0, nu1, nu2)
    nu2 = _mean(dist, nu1)
    sigma = math.sqrt(central_moment(dist, nu2, 2))
    mode_sk = (nu2 - nu0) / sigma if nu0 is not None else None
    median_sk = 3.0 * (nu2 - nu1) / sigma
    gamma = None
    if dist.moment_exists(3):
        gamma = central_moment(dist, nu2, 3) / sigma ** 3
    return PearsonCoefficients(mode_sk, median_sk, gamma, sigma, nu0, nu1, nu2)


@dataclass(frozen=True)
class GammaNu4Record:
    gamma_direct: float
    gamma_identity: float
    difference: float
    nu2: float
    nu4: float
    sigma: float
    signs_agree: bool


def gamma_iff_nu4(dist):
    """Moment skewness two ways: direct quadrature and from ``nu_4``.

    Raises
    ------
    MomentDiverges
        If the third moment is infinite.
    """
    if not dist.moment_exists(3):
        raise MomentDiverges("third moment is infinite", missing=("moment_skewness",))
    pc = pearson_coefficients(dist)
    nu4 = solve_pmean(dist, 4.0).nu_p
    t = (nu4 - pc.nu2) / pc.sigma
    ident = t ** 3 + 3 * t
    g = pc.moment_skewness
    gap = nu4 - pc.nu2
    # exact zeros count as agreeing; small values are compared at noise level
    agree = np.sign(_snap(g)) == np.sign(_snap(gap / pc.sigma))
    return GammaNu4Record(g, ident, g - ident, pc.nu2, nu4, pc.sigma, bool(agree))


def _snap(v, tol=1e-12):
    return 0.0 if abs(v) <= tol else v


@dataclass
class EllEstimate:
    """Estimate of the magnitude ``ell``.

    ``value`` is ``None`` when the support is bounded or the sequence of
    ``h`` values did not settle; ``method`` names the estimate chosen.
    """

    value: Optional[float]
    converged: bool
    p_values: list = field(default_factory=list)
    h_values: list = field(default_factory=list)
    method: str = ""
    note: str = ""


def _ell_sequence(sup):
    if math.isinf(sup):
        ps, p = [], ELL_P0
        while p <= ELL_P_MAX * (1 + 1e-12):
            ps.append(p)
            p *= ELL_RATIO
        return ps
    # geometric approach to a finite supremum
    gap0 = 0.5 * (sup - 1.0)
    return [sup - gap0 * 2.0 ** -k for k in range(0, 14)]


def h_value(dist, p, nu1):
    pt = with_slope(dist, solve_pmean(dist, p))
    return pt.dnu_dp / (pt.nu_p - nu1)


def magnitude_ell(dist):
    """Estimate ``ell`` along an increasing ``p`` sequence.

    Toward an infinite supremum the sequence is ``4 * sqrt(2)**k`` up to 256
    (stopping early when ``nu_p`` leaves double range).  Two candidates are
    kept: the raw ``h`` and a Richardson value assuming ``h = ell + c/p``;
    the one whose last two entries agree better is used, and it must pass
    the Cauchy test ``|delta| <= 1e-3 (1 + |estimate|)``.
    """
    s = dist.support
    if math.isfinite(s.left) and math.isfinite(s.right):
        return EllEstimate(None, False, method="none", note="bounded support")
    nu1 = solve_pmean(dist, 1.0).nu_p
    sup = moment_domain(dist).upper
    ps, hs = [], []
    for p in _ell_sequence(sup):
        try:
            h = h_value(dist, p, nu1)
        except (NumericalError, OverflowError, ZeroDivisionError):
            break
        if not math.isfinite(h):
            break
        ps.append(p)
        hs.append(h)
    if len(hs) < 3:
        return EllEstimate(None, False, ps, hs, "none", "fewer than three usable p values")
    raw = hs
    rich = []
    for i in range(1, len(hs)):
        r = ps[i] / ps[i - 1] if math.isinf(sup) else (sup - ps[i - 1]) / (sup - ps[i])
        rich.append((r * hs[i] - hs[i - 1]) / (r - 1))
    best = None
    for name, seq in (("raw", raw), ("richardson", rich)):
        if len(seq) < 2:
            continue
        delta = abs(seq[-1] - seq[-2])
        if best is None or delta < best[1]:
            best = (name, delta, seq[-1])
    name, delta, est = best
    ok = delta <= ELL_CAUCHY * (1 + abs(est))
    if not ok:
        return EllEstimate(None, False, ps, hs, name, "Cauchy test failed")
    return EllEstimate(float(est), True, ps, hs, name)


def van_zwet(dist, n=2048):
    """``F(nu_1 - x) + F(nu_1 + x) <= 1 + 1e-9`` on a grid of ``x``.

    This is the form equivalent to ``int_0^x f(nu_1 + y) dy <=
    int_0^x f(nu_1 - y) dy``, i.e. the right half at the median dominating
    the left half, which is what yields mode <= median <= mean.  For the
    unit exponential the sum is ``2 - cosh(x) <= 1`` on ``(0, ln 2)``.
    """
    nu1 = solve_pmean(dist, 1.0).nu_p
    s = dist.support
    lo = s.left if math.isfinite(s.left) else float(dist.ppf(1e-15))
    hi = s.right if math.isfinite(s.right) else float(dist.ppf(1 - 1e-15))
    top = max(nu1 - lo, hi - nu1)
    x = np.concatenate([np.geomspace(top * 1e-9, top, n // 2),
                        np.linspace(0, top, n - n // 2 + 1)[1:]])
    total = dist.cdf(nu1 - x) + dist.cdf(nu1 + x)
    return bool(np.all(total <= 1.0 + VAN_ZWET_TOL))


LABELS = ("truly_positive", "truly_negative", "truly_mode_positive", "truly_mode_negative",
          "symmetric", "indeterminate")


@dataclass
class SkewnessReport:
    pearson: PearsonCoefficients
    curve: object
    classification: str
    magnitude_ell: Optional[float]
    van_zwet_holds: bool
    offending_p: Optional[float] = None
    ell_detail: Optional[EllEstimate] = None
    curve_csv_path: Optional[str] = None

    @property
    def human_label(self):
        if self.classification.endswith("_full_domain"):
            return self.classification[: -len("_full_domain")] + " (full domain)"
        return self.classification

    def to_json(self):
        return json.dumps({
            "pearson": asdict(self.pearson),
            "classification": self.classification,
            "ell": self.magnitude_ell,
            "van_zwet": self.van_zwet_holds,
            "curve_csv_path": self.curve_csv_path,
        }, indent=2)


def _mode_anchor_ok(dist):
    nu0 = dist.mode()
    return nu0 is not None and not dist.mode_is_singular(), nu0


def label_curve(dist, curve, full_domain):
    """Classification label and the first offending ``p`` (if any)."""
    slopes = curve.slopes
    ps = curve.p
    if np.all(np.abs(slopes) <= MONO_TOL):
        return "symmetric", None
    if np.all(slopes > MONO_TOL):
        sign = 1
    elif np.all(slopes < -MONO_TOL):
        sign = -1
    else:
        lead = 1 if slopes[np.argmax(np.abs(slopes))] > 0 else -1
        bad = np.flatnonzero(~(lead * slopes > MONO_TOL))
        return "indeterminate", float(ps[bad[0]])
    base = "positive" if sign > 0 else "negative"
    usable, nu0 = _mode_anchor_ok(dist)
    label = f"truly_{base}"
    if usable and sign * (curve.nu[0] - nu0) > 0:
        label = f"truly_mode_{base}"
    if full_domain and ps[0] < 1:
        label += "_full_domain"
    return label, None


def classify(dist, p_grid, full_domain=False, with_ell=True):
    """Classify skewness from the p-mean curve on ``p_grid``.

    Strict monotonicity is certified on the grid with slope threshold
    ``1e-9``.  Mode variants need a unimodal density whose mode is not a
    point where the density diverges, and ``nu_0 < nu_p`` at the smallest
    grid ``p`` (mirror condition for negative skew).

    Raises
    ------
    EmptyDomainIntersection
        No grid point is admissible.
    """
    curve = pmean_curve(dist, p_grid, full_domain)
    if not curve.points:
        raise EmptyDomainIntersection("no admissible p")
    label, bad = label_curve(dist, curve, full_domain)
    ell = magnitude_ell(dist) if with_ell else None
    return SkewnessReport(
        pearson=pearson_coefficients(dist),
        curve=curve,
        classification=label,
        magnitude_ell=ell.value if ell else None,
        van_zwet_holds=van_zwet(dist),
        offending_p=bad,
        ell_detail=ell,
    )
