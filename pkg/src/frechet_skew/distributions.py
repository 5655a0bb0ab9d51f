"""Continuous univariate distributions with the pieces the p-mean machinery needs.

Every distribution exposes ``pdf``, ``logpdf``, ``cdf``, ``ppf`` (vectorized),
the log-density slope ``d/dx log f``, accurate log-density evaluation at a
small offset from a finite support end, and moment finiteness.
"""

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy import special
from scipy.interpolate import PchipInterpolator, make_interp_spline
from scipy.optimize import minimize_scalar

from .errors import InvalidP, InvalidParams, NonDifferentiablePdf, UnnormalizedCustomPdf

FAMILIES = ("exponential", "gamma", "beta", "lognormal", "pareto", "normal", "custom")

_PARAMS = {
    "exponential": ("lambda",),
    "gamma": ("alpha", "lambda"),
    "beta": ("alpha", "beta"),
    "lognormal": ("mu", "sigma2"),
    "pareto": ("alpha",),
    "normal": ("mu", "sigma2"),
    "custom": (),
}

# Custom tables within this distance of unit mass are renormalized.
CUSTOM_NORM_TOL = 1e-3
UNIMODAL_SCAN = 1024
PPF_BISECTIONS = 60


@dataclass(frozen=True)
class Support:
    left: float
    right: float

    def __post_init__(self):
        if not self.left < self.right:
            raise InvalidParams(f"empty support ({self.left}, {self.right})")

    def contains(self, x):
        return self.left < x < self.right


@dataclass(frozen=True)
class DistributionSpec:
    """Declarative description of a distribution.

    ``params`` holds the family parameters by name.  For ``family="custom"``
    the density is tabulated by ``grid_x``/``grid_f`` and interpolated with
    ``interpolation`` (``"pchip"`` or ``"linear"``).
    """

    family: str
    params: Mapping[str, float] = field(default_factory=dict)
    grid_x: Optional[tuple] = None
    grid_f: Optional[tuple] = None
    interpolation: str = "pchip"

    def to_json(self):
        if self.family == "custom":
            out = {"family": "custom",
                   "grid": {"x": list(self.grid_x), "f": list(self.grid_f)}}
            if self.interpolation != "pchip":
                out["interpolation"] = self.interpolation
            return out
        return {"family": self.family, "params": dict(self.params)}


@dataclass(frozen=True)
class PDomain:
    """Interval ``[lower, upper)`` (or ``[lower, inf)``) of admissible p."""

    lower: float
    upper: float

    def contains(self, p):
        return self.lower <= p < self.upper

    def interior_contains(self, p):
        return self.lower < p < self.upper

    def __str__(self):
        up = "inf" if math.isinf(self.upper) else f"{self.upper:g}"
        return f"[{self.lower:g}, {up})"


class Distribution:
    """Base class; subclasses fill in the family formulas."""

    family = ""

    def __init__(self, spec, support):
        self.spec = spec
        self.support = support

    def __repr__(self):
        return f"{type(self).__name__}({dict(self.spec.params)})"

    # -- density ---------------------------------------------------------
    def pdf(self, x):
        with np.errstate(over="ignore"):
            return np.exp(self.logpdf(x))

    def logpdf(self, x):
        raise NotImplementedError

    def log_pdf_slope(self, x):
        raise NotImplementedError

    def logpdf_from_left(self, d):
        """``log f(L + d)`` for ``d > 0``."""
        return self.logpdf(self.support.left + np.asarray(d, dtype=float))

    def logpdf_from_right(self, d):
        """``log f(R - d)`` for ``d > 0``."""
        return self.logpdf(self.support.right - np.asarray(d, dtype=float))

    # -- distribution ----------------------------------------------------
    def cdf(self, x):
        raise NotImplementedError

    def ppf(self, u):
        raise NotImplementedError

    def moment_exists(self, q):
        """Whether ``E|X|^q`` is finite."""
        return True

    @property
    def scale(self):
        """Interquartile range; a length scale for numerical work."""
        return float(self.ppf(0.75) - self.ppf(0.25))

    def mode(self):
        raise NotImplementedError

    def mode_is_singular(self):
        """True when the mode is a support end where the density diverges."""
        return False

    @property
    def differentiable(self):
        return True


class Exponential(Distribution):
    family = "exponential"

    def __init__(self, spec):
        self.lam = float(spec.params["lambda"])
        if not self.lam > 0:
            raise InvalidParams("exponential requires lambda > 0")
        super().__init__(spec, Support(0.0, math.inf))

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, math.log(self.lam) - self.lam * x, -np.inf)

    def log_pdf_slope(self, x):
        return np.full_like(np.asarray(x, dtype=float), -self.lam)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, -np.expm1(-self.lam * np.maximum(x, 0)), 0.0)

    def ppf(self, u):
        return -np.log1p(-np.asarray(u, dtype=float)) / self.lam

    def mode(self):
        return 0.0


class Gamma(Distribution):
    family = "gamma"

    def __init__(self, spec):
        self.alpha = float(spec.params["alpha"])
        self.lam = float(spec.params["lambda"])
        if not (self.alpha > 0 and self.lam > 0):
            raise InvalidParams("gamma requires alpha > 0 and lambda > 0")
        self._lognorm = self.alpha * math.log(self.lam) - math.lgamma(self.alpha)
        super().__init__(spec, Support(0.0, math.inf))

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = self._lognorm + special.xlogy(self.alpha - 1, x) - self.lam * x
        if self.alpha < 1:
            v = np.where(x == 0, np.inf, v)
        return np.where(x >= 0, v, -np.inf)

    def log_pdf_slope(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return (self.alpha - 1) / x - self.lam

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return special.gammainc(self.alpha, self.lam * np.maximum(x, 0))

    def ppf(self, u):
        return special.gammaincinv(self.alpha, np.asarray(u, dtype=float)) / self.lam

    def mode(self):
        return (self.alpha - 1) / self.lam if self.alpha > 1 else 0.0

    def mode_is_singular(self):
        return self.alpha < 1


class Beta(Distribution):
    family = "beta"

    def __init__(self, spec):
        self.a = float(spec.params["alpha"])
        self.b = float(spec.params["beta"])
        if not (self.a > 0 and self.b > 0):
            raise InvalidParams("beta requires alpha > 0 and beta > 0")
        self._lognorm = -special.betaln(self.a, self.b)
        super().__init__(spec, Support(0.0, 1.0))

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = (self._lognorm + special.xlogy(self.a - 1, x)
                 + special.xlog1py(self.b - 1, -x))
        return np.where((x >= 0) & (x <= 1), v, -np.inf)

    def logpdf_from_left(self, d):
        d = np.asarray(d, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._lognorm + special.xlogy(self.a - 1, d) + special.xlog1py(self.b - 1, -d)

    def logpdf_from_right(self, d):
        d = np.asarray(d, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._lognorm + special.xlog1py(self.a - 1, -d) + special.xlogy(self.b - 1, d)

    def log_pdf_slope(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return (self.a - 1) / x - (self.b - 1) / (1 - x)

    def cdf(self, x):
        return special.betainc(self.a, self.b, np.clip(np.asarray(x, dtype=float), 0, 1))

    def ppf(self, u):
        return special.betaincinv(self.a, self.b, np.asarray(u, dtype=float))

    def mode(self):
        a, b = self.a, self.b
        if a > 1 and b > 1:
            return (a - 1) / (a + b - 2)
        if a < 1 and b < 1:
            return None
        if a <= 1 < b or (a == 1 and b == 1):
            return 0.0
        return 1.0

    def mode_is_singular(self):
        return self.a < 1 or self.b < 1


class LogNormal(Distribution):
    family = "lognormal"

    def __init__(self, spec):
        self.mu = float(spec.params["mu"])
        self.s2 = float(spec.params["sigma2"])
        if not self.s2 > 0:
            raise InvalidParams("lognormal requires sigma2 > 0")
        self.sigma = math.sqrt(self.s2)
        super().__init__(spec, Support(0.0, math.inf))

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(x)
            v = -lx - 0.5 * math.log(2 * math.pi * self.s2) - (lx - self.mu) ** 2 / (2 * self.s2)
        return np.where(x > 0, v, -np.inf)

    def log_pdf_slope(self, x):
        x = np.asarray(x, dtype=float)
        return (-1.0 - (np.log(x) - self.mu) / self.s2) / x

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(x > 0, special.ndtr((np.log(np.maximum(x, 1e-320)) - self.mu) / self.sigma), 0.0)

    def ppf(self, u):
        return np.exp(self.mu + self.sigma * special.ndtri(np.asarray(u, dtype=float)))

    def mode(self):
        return math.exp(self.mu - self.s2)


class Pareto(Distribution):
    """Pareto law with density ``alpha / x**(alpha + 1)`` on ``(1, inf)``."""

    family = "pareto"

    def __init__(self, spec):
        self.alpha = float(spec.params["alpha"])
        if not self.alpha > 0:
            raise InvalidParams("pareto requires alpha > 0")
        super().__init__(spec, Support(1.0, math.inf))

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = math.log(self.alpha) - (self.alpha + 1) * np.log(x)
        return np.where(x >= 1, v, -np.inf)

    def logpdf_from_left(self, d):
        return math.log(self.alpha) - (self.alpha + 1) * np.log1p(np.asarray(d, dtype=float))

    def log_pdf_slope(self, x):
        return -(self.alpha + 1) / np.asarray(x, dtype=float)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 1, -np.expm1(-self.alpha * np.log(np.maximum(x, 1))), 0.0)

    def ppf(self, u):
        return np.exp(-np.log1p(-np.asarray(u, dtype=float)) / self.alpha)

    def moment_exists(self, q):
        return q < self.alpha

    def mode(self):
        return 1.0


class Normal(Distribution):
    family = "normal"

    def __init__(self, spec):
        self.mu = float(spec.params["mu"])
        self.s2 = float(spec.params["sigma2"])
        if not self.s2 > 0:
            raise InvalidParams("normal requires sigma2 > 0")
        self.sigma = math.sqrt(self.s2)
        super().__init__(spec, Support(-math.inf, math.inf))

    def logpdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return -0.5 * z * z - 0.5 * math.log(2 * math.pi * self.s2)

    def log_pdf_slope(self, x):
        return -(np.asarray(x, dtype=float) - self.mu) / self.s2

    def cdf(self, x):
        return special.ndtr((np.asarray(x, dtype=float) - self.mu) / self.sigma)

    def ppf(self, u):
        return self.mu + self.sigma * special.ndtri(np.asarray(u, dtype=float))

    def mode(self):
        return self.mu


class Custom(Distribution):
    """Tabulated density on ``(x[0], x[-1])``, renormalized to unit mass."""

    family = "custom"

    def __init__(self, spec):
        if spec.grid_x is None or spec.grid_f is None:
            raise InvalidParams("custom density needs grid x and f")
        x = np.asarray(spec.grid_x, dtype=float)
        f = np.asarray(spec.grid_f, dtype=float)
        if x.ndim != 1 or x.shape != f.shape or x.size < 2:
            raise InvalidParams("custom grid x and f must be equal-length 1-d arrays (>= 2 points)")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(f)):
            raise InvalidParams("custom grid contains non-finite values")
        if np.any(np.diff(x) <= 0):
            raise InvalidParams("custom grid x must be strictly increasing")
        if np.any(f < 0):
            raise InvalidParams("custom density values must be nonnegative")
        if spec.interpolation == "pchip":
            interp = PchipInterpolator(x, f, extrapolate=False)
        elif spec.interpolation == "linear":
            interp = make_interp_spline(x, f, k=1)
        else:
            raise InvalidParams(f"unknown interpolation rule {spec.interpolation!r}")
        mass = float(interp.integrate(x[0], x[-1]))
        if not abs(mass - 1.0) <= CUSTOM_NORM_TOL:
            raise UnnormalizedCustomPdf(f"tabulated density integrates to {mass:.6g}, not 1")
        self.mass = mass
        self._x = x
        self._f = interp
        self._df = interp.derivative()
        self._F = interp.antiderivative()
        self._F0 = float(self._F(x[0]))
        super().__init__(spec, Support(float(x[0]), float(x[-1])))

    @property
    def differentiable(self):
        return self.spec.interpolation == "pchip"

    def _eval(self, fn, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self._x[0]) & (x <= self._x[-1])
        v = fn(np.clip(x, self._x[0], self._x[-1]))
        return np.where(inside, v, 0.0)

    def pdf(self, x):
        return np.maximum(self._eval(self._f, x), 0.0) / self.mass

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def log_pdf_slope(self, x):
        if not self.differentiable:
            raise NonDifferentiablePdf("linear interpolation has no continuous derivative")
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._eval(self._df, x) / self._eval(self._f, x)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        v = (self._F(np.clip(x, self._x[0], self._x[-1])) - self._F0) / self.mass
        return np.clip(v, 0.0, 1.0)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        flat = np.clip(u.ravel(), 0.0, 1.0)
        # bracket between grid nodes, then vectorized bisection
        Fx = self.cdf(self._x)
        k = np.clip(np.searchsorted(Fx, flat, side="left"), 1, self._x.size - 1)
        lo, hi = self._x[k - 1].copy(), self._x[k].copy()
        for _ in range(PPF_BISECTIONS):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < flat
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        out = np.where(flat <= 0, self._x[0], np.where(flat >= 1, self._x[-1], out))
        out = out.reshape(u.shape)
        return out if out.ndim else float(out)

    def mode(self):
        return _scan_mode(self)

    def tail_exponent(self):
        """Estimated power-law exponent of the heavier tabulated tail.

        Fits ``log f`` against ``log |x|`` over the last decade at each end
        where the grid spans one.  A tail counts as power-law only if the
        slopes fitted on the two halves of the decade agree within 10%.
        Returns ``alpha`` with ``f ~ |x|**-(alpha + 1)``, or ``inf``.
        """
        best = math.inf
        x, f = self._x, np.asarray(self.spec.grid_f, dtype=float)
        for sign in (1, -1):
            ax = sign * x
            top = ax.max()
            if top <= 0:
                continue
            sel = (ax >= top / 10) & (f > 0)
            if sel.sum() < 8 or ax[sel].min() > top / 9:
                continue
            lx, lf = np.log(ax[sel]), np.log(f[sel])
            mid = 0.5 * (lx.min() + lx.max())
            lo, hi = lx <= mid, lx >= mid
            if lo.sum() < 3 or hi.sum() < 3:
                continue
            s_lo = np.polyfit(lx[lo], lf[lo], 1)[0]
            s_hi = np.polyfit(lx[hi], lf[hi], 1)[0]
            if s_lo < 0 and s_hi < 0 and abs(s_lo - s_hi) <= 0.1 * abs(s_hi):
                alpha = -np.polyfit(lx, lf, 1)[0] - 1
                if alpha > 0:
                    best = min(best, float(alpha))
        return best

    def moment_exists(self, q):
        return q < self.tail_exponent()


def _scan_mode(dist):
    # Leftmost maximizer on a fixed grid; None for several strict local maxima.
    lo, hi = dist.support.left, dist.support.right
    if math.isinf(lo) or math.isinf(hi):
        u = (np.arange(UNIMODAL_SCAN) + 0.5) / UNIMODAL_SCAN
        xs = dist.ppf(u)
    else:
        xs = np.linspace(lo, hi, UNIMODAL_SCAN)
    fx = dist.pdf(xs)
    if count_strict_local_maxima(fx) > 1:
        return None
    i = int(np.argmax(fx))
    if i == 0 or i == xs.size - 1:
        return float(xs[i])
    # polish the interior maximizer between its grid neighbours
    a, b = float(xs[i - 1]), float(xs[i + 1])
    res = minimize_scalar(lambda t: -float(dist.pdf(t)), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12 * max(1.0, abs(xs[i]))})
    return float(res.x) if -res.fun >= fx[i] else float(xs[i])


def count_strict_local_maxima(values):
    """Count strict local maxima, treating plateaus as single candidates."""
    v = np.asarray(values, dtype=float)
    # collapse plateaus
    keep = np.concatenate([[True], v[1:] != v[:-1]])
    w = v[keep]
    if w.size == 1:
        return 1
    left = np.concatenate([[-np.inf], w[:-1]])
    right = np.concatenate([w[1:], [-np.inf]])
    return int(np.sum((w > left) & (w > right)))


_CLASSES = {
    "exponential": Exponential,
    "gamma": Gamma,
    "beta": Beta,
    "lognormal": LogNormal,
    "pareto": Pareto,
    "normal": Normal,
    "custom": Custom,
}


def make_distribution(spec):
    """Build a :class:`Distribution` from a :class:`DistributionSpec`."""
    if spec.family not in _CLASSES:
        raise InvalidParams(f"unknown family {spec.family!r}")
    if spec.family != "custom":
        expected = set(_PARAMS[spec.family])
        got = set(spec.params)
        if got != expected:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            raise InvalidParams(
                f"{spec.family} parameters: missing {missing}, unexpected {extra}")
        for k, v in spec.params.items():
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise InvalidParams(f"parameter {k!r} must be a finite number")
    return _CLASSES[spec.family](spec)


def dist(family, **params):
    """Shorthand: ``dist("gamma", alpha=2, lam=1)``.

    ``lam`` stands in for the reserved word ``lambda``.
    """
    if "lam" in params:
        params["lambda"] = params.pop("lam")
    return make_distribution(DistributionSpec(family, params))


def custom(x, f, interpolation="pchip"):
    return make_distribution(DistributionSpec(
        "custom", {}, tuple(map(float, x)), tuple(map(float, f)), interpolation))


def mirrored(d, n=20001, tail_mass=1e-14):
    """Tabulate the density of ``-X`` as a custom distribution."""
    lo = float(d.ppf(tail_mass)) if math.isinf(d.support.left) else d.support.left
    hi = float(d.ppf(1 - tail_mass)) if math.isinf(d.support.right) else d.support.right
    x = np.linspace(lo, hi, n)
    f = d.pdf(x)
    f = np.where(np.isfinite(f), f, 0.0)
    return custom(-x[::-1], f[::-1])


def closed_form_pmean(d, p):
    """Known p-mean: log-normal ``exp(mu + (p-1) sigma2 / 2)``, normal centre."""
    if not p > 0:
        raise InvalidP("p must be positive")
    if isinstance(d, LogNormal):
        return math.exp(d.mu + 0.5 * (p - 1) * d.s2)
    if isinstance(d, Normal):
        return d.mu
    return None


def mode(d):
    """Mode of a unimodal distribution, or ``None`` if it is not unimodal."""
    return d.mode()


def moment_domain(d):
    """Admissible ``p >= 1`` with ``E|X|^(p-1)`` finite."""
    if isinstance(d, Pareto):
        return PDomain(1.0, d.alpha + 1)
    if isinstance(d, Custom):
        return PDomain(1.0, d.tail_exponent() + 1)
    return PDomain(1.0, math.inf)

