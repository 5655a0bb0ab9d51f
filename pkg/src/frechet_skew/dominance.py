"""Tail densities at ``nu_p`` and first-order stochastic dominance checks.

At the p-mean the left and right scaled tails

    y^(p-1) f(nu_p - y) / H_p  on (0, nu_p - L)
    y^(p-1) f(nu_p + y) / H_p  on (0, R - nu_p)

are probability densities.  If the right one dominates the left one, the
log-expectation gap that drives ``d nu_p / dp`` is positive.  This module
checks dominance directly on a grid of CDF values and through two
sufficient conditions on ``f`` (a single crossing of the mirrored density
and a decreasing density), and also tests log-concavity.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import NonDifferentiablePdf, NormalizationMismatch, QuadratureFailure
from .pmean import _combine, _neg, scaled_tail_moment, solve_pmean
from .quadrature import adaptive_gk

NORM_TOL = 1e-6
GAP_FLOOR = -1e-9
STRICT_GAP = 1e-6
TRUNCATION_MASS = 1e-12
SCAN_POINTS = 1024

RIGHT = "right_dominates_strictly"
LEFT = "left_dominates_strictly"
EQUAL = "equal"
CROSSING = "crossing_detected"
INCONCLUSIVE = "inconclusive"


@dataclass
class TailPair:
    """Normalized left and right tails of ``f`` around ``nu_p``.

    Densities and CDFs are vectorized in ``y``.  ``W_left`` and ``W_right``
    are the distances from ``nu_p`` to the support ends.
    """

    dist: object
    p: float
    nu_p: float
    H_p: float
    log_H_p: float
    W_left: float
    W_right: float

    def _density(self, y, sign, W):
        y = np.asarray(y, dtype=float)
        inside = (y > 0) & (y < W)
        yy = np.where(inside, y, 1.0)
        with np.errstate(all="ignore"):
            v = np.exp((self.p - 1) * np.log(yy) + self.dist.logpdf(self.nu_p + sign * yy)
                       - self.log_H_p)
        return np.where(inside, v, 0.0)

    def left_density(self, y):
        return self._density(y, -1.0, self.W_left)

    def right_density(self, y):
        return self._density(y, 1.0, self.W_right)

    def left_cdf(self, y):
        return _tail_cdf(self, "left", y)

    def right_cdf(self, y):
        return _tail_cdf(self, "right", y)


def build_tail_pair(dist, pt=None, p=None):
    """Tail pair at a solved point (or solve at ``p`` first).

    Raises
    ------
    NormalizationMismatch
        If the two tail integrals differ by more than ``1e-6`` relative,
        meaning ``pt.nu_p`` is not a p-mean of ``dist``.
    """
    if pt is None:
        pt = solve_pmean(dist, p)
    nu = pt.nu_p
    left = scaled_tail_moment(dist, nu, "left", pt.p)
    right = scaled_tail_moment(dist, nu, "right", pt.p)
    m_sum, top = _combine(left, right)
    m_diff, _ = _combine(right, _neg(left))
    if not abs(m_diff) <= NORM_TOL * 0.5 * m_sum:
        raise NormalizationMismatch(
            f"tail masses differ by {m_diff / (0.5 * m_sum):.3g} (relative) at p={pt.p:g}")
    log_H = math.log(0.5 * m_sum) + top
    s = dist.support
    return TailPair(dist, pt.p, nu, pt.H_p, log_H, nu - s.left, s.right - nu)


def _side(tp, side):
    sign = -1.0 if side == "left" else 1.0
    W = tp.W_left if side == "left" else tp.W_right
    return sign, W


def _tail_cdf(tp, side, y):
    """CDF of one tail at sorted-or-not points ``y`` by cumulative panels."""
    sign, W = _side(tp, side)
    y = np.asarray(y, dtype=float)
    flat = y.ravel()
    out = np.where(flat >= W, 1.0, 0.0)
    sel = (flat > 0) & (flat < W)
    if not sel.any():
        return out.reshape(y.shape)
    order = np.argsort(flat[sel])
    ys = flat[sel][order]
    uniq, inv = np.unique(ys, return_inverse=True)

    def g(t):
        with np.errstate(all="ignore"):
            v = np.exp((tp.p - 1) * np.log(t) + tp.dist.logpdf(tp.nu_p + sign * t) - tp.log_H_p)
        return np.where(np.isfinite(v), v, 0.0)

    first = _scaled_to_unit(scaled_tail_moment(tp.dist, tp.nu_p, side, tp.p, hi=uniq[0]), tp)
    if uniq.size > 1:
        _, _, panels = adaptive_gk(g, uniq, rtol=1e-12, per_panel=True)
        cum = first + np.concatenate([[0.0], np.cumsum(panels)])
    else:
        cum = np.array([first])
    vals = np.empty(ys.size)
    vals[order] = np.minimum(cum[inv], 1.0)
    out[np.flatnonzero(sel)] = vals
    return out.reshape(y.shape)


def _scaled_to_unit(t, tp):
    m, s = t
    return m * math.exp(s - tp.log_H_p) if m else 0.0


def _tail_beyond(tp, side, y):
    return _scaled_to_unit(scaled_tail_moment(tp.dist, tp.nu_p, side, tp.p, lo=y), tp)


def _truncation(tp, side):
    # distance beyond which the tail keeps less than TRUNCATION_MASS
    _, W = _side(tp, side)
    if math.isfinite(W):
        return W
    y = max(tp.dist.scale, abs(tp.nu_p) * 1e-3, 1e-300)
    for _ in range(2000):
        if _tail_beyond(tp, side, y) < TRUNCATION_MASS:
            return y
        y *= 1.5
    raise QuadratureFailure(f"{side} tail mass does not fall below {TRUNCATION_MASS:g}")


def clustered_grid(top, n, breaks=()):
    """Points on ``(0, top]``, geometric near 0 and near each break point."""
    anchors = sorted({0.0, float(top), *[b for b in breaks if 0 < b < top]})
    per = max(n // (2 * (len(anchors) - 1)), 8)
    pts = []
    for a, b in zip(anchors[:-1], anchors[1:]):
        half = 0.5 * (b - a)
        offs = np.geomspace(half * 1e-10, half, per)
        pts.append(a + offs)
        pts.append(b - offs[:-1])
    g = np.unique(np.concatenate(pts))
    return g[(g > 0) & (g <= top)]


@dataclass(frozen=True)
class CdfOutcome:
    verdict: str
    min_gap: float
    max_gap: float
    grid_size: int


def cdf_dominance(tp, grid_size=2048):
    """Compare the tail CDFs on a grid.

    ``gap(y) = left_cdf(y) - right_cdf(y)``; the right tail dominates
    strictly iff ``gap >= -1e-9`` everywhere and ``max gap > 1e-6``
    (mirror conditions for the left tail; ``|gap| <= 1e-9`` is equality).
    """
    if grid_size < 64:
        raise ValueError("grid_size must be at least 64")
    tl, tr = _truncation(tp, "left"), _truncation(tp, "right")
    top = max(tl, tr)
    breaks = [w for w in (tp.W_left, tp.W_right) if w < top]
    y = clustered_grid(top, grid_size, breaks)
    gap = tp.left_cdf(y) - tp.right_cdf(y)
    lo, hi = float(gap.min()), float(gap.max())
    if max(abs(lo), abs(hi)) <= -GAP_FLOOR:
        verdict = EQUAL
    elif lo >= GAP_FLOOR and hi > STRICT_GAP:
        verdict = RIGHT
    elif hi <= -GAP_FLOOR and lo < -STRICT_GAP:
        verdict = LEFT
    elif lo < -STRICT_GAP and hi > STRICT_GAP:
        verdict = CROSSING
    else:
        verdict = INCONCLUSIVE
    return CdfOutcome(verdict, lo, hi, int(y.size))


@dataclass(frozen=True)
class CrossingOutcome:
    """Result of the single-crossing scan of ``r(x) = f(nu-x) - f(nu+x)``.

    ``status`` is one of ``satisfied`` (one crossing from + to - and
    ``nu-L <= R-nu``: right tail dominates), ``satisfied_reversed`` (the
    mirror image: left tail dominates), ``side_condition_fails``,
    ``multiple_crossings``, ``no_crossing`` or ``identical`` (``r == 0``).
    """

    status: str
    c: Optional[float] = None
    sign_changes: int = 0


def single_crossing(dist, pt):
    nu = pt.nu_p
    WL, WR = nu - dist.support.left, dist.support.right - nu
    top = min(WL, WR)
    if not math.isfinite(top):
        top = max(nu - float(dist.ppf(1e-15)), float(dist.ppf(1 - 1e-15)) - nu)
    x = clustered_grid(top, 2 * SCAN_POINTS)
    x = x[x < top]

    def r(t):
        return dist.pdf(nu - t) - dist.pdf(nu + t)

    fl, fr = dist.pdf(nu - x), dist.pdf(nu + x)
    rv = fl - fr
    noise = 1e-12 * (fl + fr)
    sgn = np.where(rv > noise, 1, np.where(rv < -noise, -1, 0))
    nz = np.flatnonzero(sgn)
    if nz.size == 0:
        return CrossingOutcome("identical")
    seq = sgn[nz]
    flips = np.flatnonzero(seq[1:] != seq[:-1])
    if flips.size == 0:
        return CrossingOutcome("no_crossing")
    if flips.size > 1:
        return CrossingOutcome("multiple_crossings", sign_changes=int(flips.size))
    i0, i1 = nz[flips[0]], nz[flips[0] + 1]
    c = brentq(r, x[i0], x[i1], xtol=1e-14 * max(1.0, x[i1]))
    if seq[0] > 0:
        status = "satisfied" if WL <= WR else "side_condition_fails"
    else:
        status = "satisfied_reversed" if WR <= WL else "side_condition_fails"
    return CrossingOutcome(status, float(c), 1)


def _quantile_grid(dist, n):
    s = dist.support
    if math.isfinite(s.left) and math.isfinite(s.right):
        w = s.right - s.left
        return s.left + w * (np.arange(1, n + 1) - 0.5) / n
    u = (np.arange(1, n + 1) - 0.5) / n
    return np.asarray(dist.ppf(u), dtype=float)


def decreasing_pdf(dist, n=SCAN_POINTS):
    """True iff the density is nonincreasing on the scan grid with some strict drop."""
    f = dist.pdf(_quantile_grid(dist, n))
    d = np.diff(f)
    tol = 1e-12 * np.maximum(f[:-1], f[1:])
    return bool(np.all(d <= tol) and np.any(d < -tol))


def log_concavity(dist, n=SCAN_POINTS):
    """True iff ``d/dx log f`` is nonincreasing on the interior scan grid."""
    if not dist.differentiable:
        raise NonDifferentiablePdf(f"{dist!r} has no continuous derivative")
    s = dist.log_pdf_slope(_quantile_grid(dist, n))
    d = np.diff(s)
    return bool(np.all(d <= 1e-9 * (1 + np.abs(s[:-1]))))


def log_expectation_gap(dist, pt):
    """``E_right[log Y] - E_left[log Y]`` under the two tail densities."""
    m, sc = _combine(scaled_tail_moment(dist, pt.nu_p, "right", pt.p, "log"),
                     _neg(scaled_tail_moment(dist, pt.nu_p, "left", pt.p, "log")))
    log_H = pt.log_H_p if pt.log_H_p is not None else math.log(pt.H_p)
    return m * math.exp(sc - log_H) if m else 0.0


@dataclass
class DominanceReport:
    p: float
    verdict: str
    criteria: dict
    min_cdf_gap: float
    crossing_point_c: Optional[float] = None
    log_gap: Optional[float] = None
    details: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps({
            "p": self.p,
            "verdict": self.verdict,
            "criteria": self.criteria,
            "c": self.crossing_point_c,
            "min_cdf_gap": self.min_cdf_gap,
        }, indent=2, sort_keys=False)


def dominance_report(dist, p, grid_size=2048):
    """All dominance criteria at one ``p``."""
    pt = solve_pmean(dist, p)
    tp = build_tail_pair(dist, pt)
    cdf = cdf_dominance(tp, grid_size)
    cross = single_crossing(dist, pt)
    try:
        lc = log_concavity(dist)
    except NonDifferentiablePdf:
        lc = None
    criteria = {
        "cdf_gap": cdf.verdict,
        "single_crossing": cross.status,
        "decreasing_pdf": decreasing_pdf(dist),
        "log_concave": lc,
    }
    return DominanceReport(p=float(p), verdict=cdf.verdict, criteria=criteria,
                           min_cdf_gap=cdf.min_gap, crossing_point_c=cross.c,
                           log_gap=log_expectation_gap(dist, pt),
                           details={"max_cdf_gap": cdf.max_gap, "nu_p": pt.nu_p})
