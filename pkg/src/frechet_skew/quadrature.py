"""Vectorized adaptive Gauss-Kronrod quadrature.

Two layers live here:

* :func:`adaptive_gk` integrates a vectorized callable over a partition of a
  finite interval, bisecting every panel whose error share is too large and
  evaluating all new panels in one call.
* :func:`log_coordinate_integral` integrates ``exp(log_e(t)) * mult(t)`` over a
  possibly infinite range of a log coordinate.  It scans ``log_e`` to find where
  the mass lives, truncates far below the peak and closes infinite ends with an
  exponential-tail correction.  A tail that does not decay is reported as
  :class:`~frechet_skew.errors.DivergentIntegral`.
"""

import math

import numpy as np

from .errors import DivergentIntegral, QuadratureFailure

# 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208143198316,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
WEIGHTS_K = np.concatenate([_WGK[:-1], _WGK[::-1]])
_wg_half = np.zeros(11)
_wg_half[1:10:2] = _WG
WEIGHTS_G = np.concatenate([_wg_half[:-1], _wg_half[::-1]])

_EPS = np.finfo(float).eps

# Scan limits for infinite ends of a log coordinate; exp(700) is still finite.
LOG_LO = -700.0
LOG_HI = 700.0
SCAN_STEP = 0.25
# Truncation depth below the peak of the log integrand (e**-75 ~ 3e-33).
DROP = 75.0


def gk21(f, a, b):
    """Apply the 21-point Kronrod rule on every panel ``[a[i], b[i]]``.

    Returns ``(result, error, resabs)`` arrays.  The error estimate follows
    QUADPACK: ``resasc * min(1, (200 |K - G| / resasc) ** 1.5)`` with a
    round-off floor.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = centre[:, None] + half[:, None] * NODES[None, :]
    fv = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fv)):
        raise QuadratureFailure("integrand returned a non-finite value")
    resk = fv @ WEIGHTS_K
    resg = fv @ WEIGHTS_G
    resabs = np.abs(fv) @ WEIGHTS_K
    mean = 0.5 * resk
    resasc = np.abs(fv - mean[:, None]) @ WEIGHTS_K
    ah = np.abs(half)
    resk = resk * half
    resabs = resabs * ah
    resasc = resasc * ah
    err = np.abs(resk - resg * half)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(
            (resasc != 0) & (err != 0),
            resasc * np.minimum(1.0, (200.0 * err / np.where(resasc == 0, 1, resasc)) ** 1.5),
            err,
        )
    err = np.maximum(scaled, 50 * _EPS * resabs)
    return resk, err, resabs


def adaptive_gk(f, edges, rtol=1e-12, atol=0.0, *, per_panel=False,
                max_rounds=200, max_panels=200_000):
    """Integrate a vectorized ``f`` over the partition ``edges``.

    Parameters
    ----------
    f : callable
        Maps an array of abscissae to an array of values.
    edges : array_like
        Increasing breakpoints; the initial panels.
    rtol, atol : float
        Stop once the summed error estimate is below
        ``max(atol, rtol * max(|I|, 1e-3 * int|f|))``.
    per_panel : bool
        Also return the integral over each initial panel.

    Returns
    -------
    total, error[, per_panel_values]
    """
    edges = np.asarray(edges, dtype=float)
    npan0 = edges.size - 1
    if npan0 < 1:
        zero = (0.0, 0.0)
        return zero + (np.zeros(0),) if per_panel else zero
    a, b = edges[:-1], edges[1:]
    owner = np.arange(npan0)
    res, err, rabs = gk21(f, a, b)
    for _ in range(max_rounds):
        total = res.sum()
        errsum = err.sum()
        tabs = rabs.sum()
        tol = max(atol, rtol * max(abs(total), 1e-3 * tabs))
        if errsum <= tol or errsum <= 100 * _EPS * tabs:
            break
        pick = err > tol / err.size
        pick[np.argmax(err)] = True
        if err.size + pick.sum() > max_panels:
            raise QuadratureFailure(
                f"panel budget exhausted (error {errsum:.3g} > tolerance {tol:.3g})")
        mid = 0.5 * (a[pick] + b[pick])
        if np.any((mid <= a[pick]) | (mid >= b[pick])):
            # panels cannot be split further in floating point
            break
        ca = np.concatenate([a[pick], mid])
        cb = np.concatenate([mid, b[pick]])
        cown = np.concatenate([owner[pick], owner[pick]])
        cres, cerr, cabs = gk21(f, ca, cb)
        keep = ~pick
        a = np.concatenate([a[keep], ca])
        b = np.concatenate([b[keep], cb])
        owner = np.concatenate([owner[keep], cown])
        res = np.concatenate([res[keep], cres])
        err = np.concatenate([err[keep], cerr])
        rabs = np.concatenate([rabs[keep], cabs])
    else:
        raise QuadratureFailure(f"no convergence after {max_rounds} refinement rounds")
    total = float(res.sum())
    if per_panel:
        return total, float(err.sum()), np.bincount(owner, weights=res, minlength=npan0)
    return total, float(err.sum())


def _initial_edges(grid, phi):
    # Panel breaks wherever the log integrand has varied by ~2 or the
    # coordinate has advanced by 4.
    dphi = np.abs(np.diff(np.where(np.isfinite(phi), phi, -1e300)))
    dphi = np.minimum(dphi, 10.0) + 0.5 * np.diff(grid)
    label = np.floor(np.concatenate([[0.0], np.cumsum(dphi)]) / 2.0)
    cut = np.flatnonzero(np.diff(label) > 0) + 1
    idx = np.unique(np.concatenate([[0], cut, [grid.size - 1]]))
    return grid[idx]


def log_coordinate_integral(log_e, t_lo, t_hi, mult=None, rtol=1e-12, scaled=False):
    """Integrate ``exp(log_e(t)) * mult(t)`` for ``t`` in ``[t_lo, t_hi]``.

    Either bound may be infinite.  ``log_e`` must be vectorized and may
    return ``-inf``; ``mult`` (default 1) should vary slowly compared with
    ``exp(log_e)``.  Infinite ends are closed by assuming ``log_e`` is
    linear beyond the scan limit, which is exact for power-law and
    exponential tails in these coordinates.

    With ``scaled=True`` the result is returned as ``(m, s)`` meaning
    ``m * exp(s)``, so integrals beyond double range stay usable.
    """
    lo_inf = t_lo == -math.inf
    hi_inf = t_hi == math.inf
    a = min(LOG_LO, t_hi - 8.0) if lo_inf else float(t_lo)
    b = max(LOG_HI, a + 8.0) if hi_inf else float(t_hi)
    if not b > a:
        return (0.0, -math.inf) if scaled else 0.0
    n = max(int(math.ceil((b - a) / SCAN_STEP)) + 1, 9)
    grid = np.linspace(a, b, n)
    with np.errstate(all="ignore"):
        phi = np.asarray(log_e(grid), dtype=float)
    if np.any(np.isnan(phi)) or np.any(phi == math.inf):
        raise QuadratureFailure("log integrand is NaN or overflows on the scan grid")
    phimax = float(phi.max())
    if phimax == -math.inf:
        return (0.0, -math.inf) if scaled else 0.0
    keep = np.flatnonzero(phi >= phimax - DROP)
    i0 = max(keep[0] - 1, 0)
    i1 = min(keep[-1] + 1, n - 1)

    def g(t):
        with np.errstate(all="ignore"):
            v = np.exp(log_e(t) - phimax)
        if mult is not None:
            v = v * mult(t)
        return v

    val = 0.0
    if i1 > i0:
        edges = _initial_edges(grid[i0:i1 + 1], phi[i0:i1 + 1])
        val, _ = adaptive_gk(g, edges, rtol=rtol)

    k = min(4, n - 1)
    if lo_inf and keep[0] == 0:
        kappa = (phi[k] - phi[0]) / (grid[k] - grid[0])
        if not kappa > 1e-12:
            raise DivergentIntegral("integrand does not decay at the lower end")
        val += _tail(grid[0], grid[k], kappa, phi[0] - phimax, mult)
    if hi_inf and keep[-1] == n - 1:
        kappa = (phi[n - 1 - k] - phi[n - 1]) / (grid[n - 1] - grid[n - 1 - k])
        if not kappa > 1e-12:
            raise DivergentIntegral("integrand does not decay at the upper end")
        val += _tail(grid[n - 1], grid[n - 1 - k], kappa, phi[n - 1] - phimax, mult)
    if scaled:
        return float(val), phimax
    with np.errstate(over="ignore"):
        out = val * math.exp(phimax) if phimax < 709.0 else val * math.inf
    if not math.isfinite(out):
        raise QuadratureFailure("integral overflows double precision")
    return float(out)


def _tail(t_end, t_in, kappa, log_e_end, mult):
    # Integral beyond t_end of exp(log_e_end - kappa |t - t_end|) times a
    # multiplier linearized between t_in and t_end.
    e_end = math.exp(log_e_end)
    if mult is None:
        return e_end / kappa
    m_end, m_in = (float(v) for v in mult(np.array([t_end, t_in])))
    slope_out = (m_end - m_in) / abs(t_end - t_in)
    return e_end * (m_end / kappa + slope_out / kappa ** 2)
