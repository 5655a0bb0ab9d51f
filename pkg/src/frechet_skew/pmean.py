"""Fréchet p-means of continuous distributions.

The p-mean ``nu_p`` is the root of the balance residual

    G(a) = int_0^{R-a} y^{p-1} f(a+y) dy - int_0^{a-L} y^{p-1} f(a-y) dy,

and ``H_p`` is the common value of the two tail integrals at the root.  The
slope ``d nu_p / dp`` comes from differentiating that balance in ``p``:
:func:`dnu_dp_interior` for ``p > 1`` and :func:`dnu_dp_general` for any
``p > 0``.
"""

import csv
import io
import logging
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .distributions import moment_domain
from .errors import (DivergentIntegral, EmptyDomainIntersection, InvalidP,
                     NearSingularP, NoBracket, NonDifferentiablePdf,
                     QuadratureFailure)
from .quadrature import log_coordinate_integral

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
NEAR_ONE = 1e-3
FD_STEP = 1e-4
BRACKET_TAIL = 1e-6
MAX_EXPANSIONS = 80


@dataclass(frozen=True)
class PMeanPoint:
    p: float
    nu_p: float
    H_p: float
    residual: float
    dnu_dp: Optional[float] = None
    method: Optional[str] = None
    log_H_p: Optional[float] = None


@dataclass
class PMeanCurve:
    points: list
    domain_used: str
    dropped: list = field(default_factory=list)

    @property
    def p(self):
        return np.array([pt.p for pt in self.points])

    @property
    def nu(self):
        return np.array([pt.nu_p for pt in self.points])

    @property
    def slopes(self):
        return np.array([np.nan if pt.dnu_dp is None else pt.dnu_dp for pt in self.points])

    def to_csv(self):
        """CSV text ``p,nu_p,H_p,dnu_dp,method,residual`` (17 significant digits)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for pt in self.points:
            w.writerow([_g17(pt.p), _g17(pt.nu_p), _g17(pt.H_p),
                        "" if pt.dnu_dp is None else _g17(pt.dnu_dp),
                        pt.method or "", _g17(pt.residual)])
        return buf.getvalue()


CSV_HEADER = ("p", "nu_p", "H_p", "dnu_dp", "method", "residual")


def _g17(v):
    return format(float(v), ".17g")


def _tail_width(dist, a, side):
    s = dist.support
    return a - s.left if side == "left" else s.right - a


def tail_moment(dist, a, side, q, weight="one", lo=0.0, hi=None, rtol=1e-12):
    """``int_lo^hi y^(q-1) w(y) f(a -+ y) dy`` over one side of ``a``.

    ``side`` is ``"left"`` (``f(a - y)``) or ``"right"`` (``f(a + y)``);
    ``weight`` is ``"one"``, ``"log"`` (``log y``) or ``"slope"``
    (``d/dx log f`` at ``a -+ y``, giving an integral of ``f'``).  ``hi``
    defaults to the distance from ``a`` to the support end on that side.
    """
    m, sc = scaled_tail_moment(dist, a, side, q, weight, lo, hi, rtol)
    return _unscale(m, sc)


def _unscale(m, sc):
    if m == 0.0:
        return 0.0
    try:
        return m * math.exp(sc)
    except OverflowError:
        raise QuadratureFailure("integral overflows double precision") from None


def _combine(*terms):
    # sum of (mantissa, log-scale) pairs, rescaled to the largest scale
    top = max((sc for m, sc in terms if m != 0.0), default=-math.inf)
    if top == -math.inf:
        return 0.0, -math.inf
    return sum(m * math.exp(sc - top) for m, sc in terms if m != 0.0), top


def scaled_tail_moment(dist, a, side, q, weight="one", lo=0.0, hi=None, rtol=1e-12):
    """Same integral as :func:`tail_moment` returned as ``(m, s)``, i.e. ``m * exp(s)``."""
    W = _tail_width(dist, a, side)
    hi = W if hi is None else min(hi, W)
    if not hi > lo:
        return 0.0, -math.inf
    sgn = -1.0 if side == "left" else 1.0
    parts = []

    # piece 1: y = e^t on [lo, min(hi, W/2)]
    near_hi = min(hi, 0.5 * W)
    if near_hi > lo:
        def log_e(t):
            return q * t + dist.logpdf(a + sgn * np.exp(t))

        mult = None
        if weight == "log":
            mult = _identity
        elif weight == "slope":
            def mult(t):
                return dist.log_pdf_slope(a + sgn * np.exp(t))
        t_lo = math.log(lo) if lo > 0 else -math.inf
        t_hi = math.log(near_hi) if math.isfinite(near_hi) else math.inf
        parts.append(log_coordinate_integral(log_e, t_lo, t_hi, mult=mult, rtol=rtol, scaled=True))

    # piece 2: distance to the support end d = W - y = e^u on [max(lo, W/2), hi]
    far_lo = max(lo, 0.5 * W)
    if math.isfinite(W) and hi > far_lo:
        end_density = dist.logpdf_from_left if side == "left" else dist.logpdf_from_right
        end = dist.support.left if side == "left" else dist.support.right

        def log_e(u):
            d = np.exp(u)
            return (q - 1) * np.log(W - d) + u + end_density(d)

        mult = None
        if weight == "log":
            def mult(u):
                return np.log(W - np.exp(u))
        elif weight == "slope":
            def mult(u):
                return dist.log_pdf_slope(end - sgn * np.exp(u))
        u_lo = math.log(W - hi) if W - hi > 0 else -math.inf
        parts.append(log_coordinate_integral(log_e, u_lo, math.log(W - far_lo), mult=mult,
                                             rtol=rtol, scaled=True))
    return _combine(*parts)


def _identity(t):
    return t


def in_domain(dist, p, full_domain=True):
    if not p > 0:
        return False
    if p < 1:
        return full_domain
    return moment_domain(dist).contains(p)


def _check_args(dist, p, a=None):
    if not (isinstance(p, (int, float, np.floating)) and math.isfinite(p) and p > 0):
        raise InvalidP(f"p must be a positive finite number, got {p!r}")
    if p >= 1 and not moment_domain(dist).contains(p):
        raise DivergentIntegral(
            f"p={p:g} is outside the moment domain {moment_domain(dist)}: a tail integral diverges")
    if a is not None and not dist.support.contains(a):
        raise InvalidP(f"a={a!r} is outside the support {dist.support}")


def balance_residual(dist, p, a):
    """Right tail minus left tail of the p-mean balance at ``a``.

    Decreasing in ``a``; zero at ``nu_p``.
    """
    _check_args(dist, p, a)
    return _unscale(*_combine(scaled_tail_moment(dist, a, "right", p),
                              _neg(scaled_tail_moment(dist, a, "left", p))))


def _bracket(dist, G):
    L, R = dist.support.left, dist.support.right
    lo = float(dist.ppf(BRACKET_TAIL))
    hi = float(dist.ppf(1 - BRACKET_TAIL))
    if not lo > L:
        lo = L + 0.5 * (float(dist.ppf(0.5)) - L)
    if not hi < R:
        hi = R - 0.5 * (R - float(dist.ppf(0.5)))
    glo, ghi = G(lo), G(hi)
    for k in range(MAX_EXPANSIONS):
        if glo > 0 > ghi:
            return lo, hi, glo, ghi
        # the growth factor itself grows so that far-off roots are reached
        factor = 2.0 ** (1 + k // 10)
        width = (hi - lo) * factor
        if not glo > 0:
            lo = L + (lo - L) / (4 * factor) if math.isfinite(L) else lo - width
            glo = G(lo)
        if not ghi < 0:
            hi = R - (R - hi) / (4 * factor) if math.isfinite(R) else hi + width
            ghi = G(hi)
    if glo > 0 > ghi:
        return lo, hi, glo, ghi
    raise NoBracket(
        f"balance residual keeps one sign on [{lo:.6g}, {hi:.6g}] "
        f"(G={glo:.3g}, {ghi:.3g}); the p-mean may be non-unique or the integrals unreliable")


def _relative_gap(dist, p, a):
    # (right - left) / max(right, left): same sign as G, immune to overflow
    mr, sr = scaled_tail_moment(dist, a, "right", p)
    ml, sl = scaled_tail_moment(dist, a, "left", p)
    top = max(sr, sl)
    r = mr * math.exp(sr - top) if mr else 0.0
    l = ml * math.exp(sl - top) if ml else 0.0
    big = max(r, l)
    return (r - l) / big if big > 0 else 0.0


def solve_pmean(dist, p):
    """Solve the balance equation for ``nu_p``.

    Parameters
    ----------
    dist : Distribution
    p : float
        Any ``p`` in ``(0, 1)`` or in the moment domain.

    Returns
    -------
    PMeanPoint
        With ``residual`` = G(nu_p) / H_p and no slope filled in.  ``H_p`` is
        ``inf`` when it exceeds double range; ``log_H_p`` is always finite.
    """
    _check_args(dist, p)

    def G(a):
        return _relative_gap(dist, p, a)

    lo, hi, _, _ = _bracket(dist, G)
    # purely relative tolerance: brackets can span many decades
    nu = brentq(G, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    ml, sl = scaled_tail_moment(dist, nu, "left", p)
    mr, sr = scaled_tail_moment(dist, nu, "right", p)
    m_sum, top = _combine((ml, sl), (mr, sr))
    m_diff, _ = _combine((mr, sr), (-ml, sl))
    residual = 2.0 * m_diff / m_sum
    log_H = math.log(0.5 * m_sum) + top
    H = math.exp(log_H) if log_H < 709.0 else math.inf
    if not abs(residual) <= RESIDUAL_TOL:
        raise QuadratureFailure(
            f"root residual {residual:.3g} (relative to H_p) exceeds {RESIDUAL_TOL:g} at p={p:g}")
    return PMeanPoint(p=float(p), nu_p=float(nu), H_p=float(H), residual=float(residual),
                      log_H_p=float(log_H))


def _ratio(num, den):
    (mn, sn), (md, sd) = num, den
    if md == 0.0:
        raise QuadratureFailure("derivative denominator vanished")
    return mn / md * math.exp(sn - sd) if mn else 0.0


def _log_numerator(dist, nu, p):
    return _combine(scaled_tail_moment(dist, nu, "right", p, "log"),
                    _neg(scaled_tail_moment(dist, nu, "left", p, "log")))


def _neg(t):
    return -t[0], t[1]


def dnu_dp_interior(dist, pt):
    """Slope of ``nu_p`` for ``p > 1`` from the interior-domain formula.

    numerator:   int y^(p-1) log y [f(nu+y)] - int y^(p-1) log y [f(nu-y)]
    denominator: (p-1) [int y^(p-2) f(nu-y) + int y^(p-2) f(nu+y)]
    """
    p, nu = pt.p, pt.nu_p
    if abs(p - 1) < NEAR_ONE:
        raise NearSingularP(f"p={p:g} is within {NEAR_ONE:g} of 1; use dnu_dp_general")
    if p < 1:
        raise DivergentIntegral("y^(p-2) is not integrable at 0 for p < 1")
    dom = moment_domain(dist)
    if not dom.interior_contains(p):
        raise DivergentIntegral(f"p={p:g} is not interior to {dom}")
    num = _log_numerator(dist, nu, p)
    m, sc = _combine(scaled_tail_moment(dist, nu, "left", p - 1),
                     scaled_tail_moment(dist, nu, "right", p - 1))
    return _ratio(num, ((p - 1) * m, sc))


def _split_point(dist, nu, side):
    W = _tail_width(dist, nu, side)
    return 0.5 * W if math.isfinite(W) else min(dist.scale, 1e300)


def dnu_dp_general(dist, pt):
    """Slope of ``nu_p`` valid for every ``p > 0``.

    The denominator holds the boundary limits ``(nu-L)^(p-1) f(L)`` and
    ``(R-nu)^(p-1) f(R)`` plus ``int y^(p-1) f'(nu-y) - int y^(p-1) f'(nu+y)``.
    Integrating the outer part ``[m, W]`` of each ``f'`` integral by parts
    cancels the boundary limits exactly, so each side contributes

        +-int_0^m y^(p-1) f'(nu -+ y) dy + m^(p-1) f(nu -+ m)
            + (p-1) int_m^W y^(p-2) f(nu -+ y) dy.

    At ``p == 1`` the denominator is ``2 f(nu_1)``.
    """
    if not dist.differentiable:
        raise NonDifferentiablePdf(f"{dist!r} has no continuous derivative")
    p, nu = pt.p, pt.nu_p
    num = _log_numerator(dist, nu, p)
    if p == 1:
        return _ratio(num, (2.0 * float(dist.pdf(nu)), 0.0))
    terms = []
    for side, sgn in (("left", 1.0), ("right", -1.0)):
        m = _split_point(dist, nu, side)
        x_m = nu - m if side == "left" else nu + m
        ms, ss = scaled_tail_moment(dist, nu, side, p, "slope", hi=m)
        terms.append((sgn * ms, ss))
        terms.append((1.0, (p - 1) * math.log(m) + float(dist.logpdf(x_m))))
        mo, so = scaled_tail_moment(dist, nu, side, p - 1, lo=m)
        terms.append(((p - 1) * mo, so))
    return _ratio(num, _combine(*terms))


def dnu_dp_fd(dist, p, h=FD_STEP):
    """Central finite difference of :func:`solve_pmean` in ``p``."""
    return (solve_pmean(dist, p + h).nu_p - solve_pmean(dist, p - h).nu_p) / (2 * h)


def with_slope(dist, pt):
    """Fill ``dnu_dp``: interior formula if valid, else general, else FD."""
    p = pt.p
    dom = moment_domain(dist)
    if p > 1 + NEAR_ONE and dom.interior_contains(p):
        try:
            return replace(pt, dnu_dp=float(dnu_dp_interior(dist, pt)), method="interior_formula")
        except (DivergentIntegral, QuadratureFailure) as exc:
            log.debug("interior formula failed at p=%g: %s", p, exc)
    try:
        return replace(pt, dnu_dp=float(dnu_dp_general(dist, pt)), method="general_formula")
    except (NonDifferentiablePdf, DivergentIntegral, QuadratureFailure) as exc:
        log.debug("general formula failed at p=%g: %s", p, exc)
    h = min(FD_STEP, 0.5 * p)
    return replace(pt, dnu_dp=float(dnu_dp_fd(dist, p, h)), method="finite_difference")


def _threads():
    try:
        return max(1, int(os.environ.get("FRECHET_SKEW_THREADS", "1")))
    except ValueError:
        return 1


def pmean_curve(dist, p_grid, full_domain=False):
    """p-means and slopes along a strictly increasing grid.

    Grid points outside the requested domain (``D``, or ``(0,1) u D`` with
    ``full_domain``) are dropped with a warning and listed in
    ``curve.dropped``.
    """
    grid = [float(p) for p in p_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidP("p grid must be strictly increasing")
    keep = [p for p in grid if in_domain(dist, p, full_domain)]
    dropped = [p for p in grid if p not in keep]
    if dropped:
        warnings.warn(f"dropped p values outside the domain: {dropped}", stacklevel=2)
    if not keep:
        raise EmptyDomainIntersection("no grid point lies in the admissible domain")

    def one(p):
        return with_slope(dist, solve_pmean(dist, p))

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(one, keep))
    else:
        points = [one(p) for p in keep]
    return PMeanCurve(points, "full_domain" if full_domain else "standard", dropped)


def limit_at_zero(dist, ps=(0.2, 0.1, 0.05, 0.025)):
    """Estimate ``lim_{p -> 0+} nu_p`` from a halving sequence of ``p``.

    Richardson extrapolation assuming ``nu_p = c0 + c1 p + O(p^2)``.
    Returns ``(estimate, nu_values)``.
    """
    ps = [float(p) for p in ps]
    nus = [solve_pmean(dist, p).nu_p for p in ps]
    r = ps[-2] / ps[-1]
    est = (r * nus[-1] - nus[-2]) / (r - 1)
    return est, nus
