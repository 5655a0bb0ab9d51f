"""Sample Fréchet p-means in R^d, their trajectory in p, and its direction.

For samples ``x_1..x_n`` the p-mean minimizes
``F(a) = (1/n) sum_i |x_i - a|^p`` (Euclidean norm).  The curve
``p -> nu_p`` is the "tailbone" and the limit of its normalized velocity is
read as the direction of skewness.

Solvers by ``p``:

* ``p == 2``: the sample mean.
* ``p == 1``: the sample median in one dimension; otherwise Newton steps
  backed by Weiszfeld iterations, with the Vardi-Zhang modification when
  the iterate lands on sample points.
* ``1 < p < 2``: Newton steps, falling back to the reweighted (IRLS)
  fixed-point step whenever Newton fails to decrease ``F``.
* ``p > 2``: damped Newton (the Hessian is positive definite).

All objective values are handled as ``log F`` so large ``p`` cannot
overflow.
"""

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import InputError, InvalidP

# both dimensionless: relative to the sample spread max_i |x_i - a|
STEP_TOL = 1e-12
GRAD_TOL = 1e-12
ZETA_ANGLE_TOL = 1e-2
MAX_ITER = 500
MAX_HALVINGS = 60


class NonConvergence(Warning):
    """A p-mean iteration stopped at the iteration cap."""


@dataclass(frozen=True)
class SampleSet:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise InputError("samples must be a non-empty (n, d) array")
        if not np.all(np.isfinite(pts)):
            raise InputError("samples contain NaN or infinite components")
        object.__setattr__(self, "points", np.ascontiguousarray(pts))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]


@dataclass(frozen=True)
class PMeanND:
    nu: np.ndarray
    log_objective: float
    iterations: int
    converged: bool

    @property
    def objective(self):
        """``F(nu)``; ``inf`` when it exceeds double range."""
        return math.exp(self.log_objective) if self.log_objective < 709.0 else math.inf


def _as_samples(s):
    return s if isinstance(s, SampleSet) else SampleSet(s)


def _log_F(X, a, p):
    return kernels.log_objective(X, a, p) - math.log(X.shape[0])


def frechet_pmean_nd(samples, p, start=None, max_iter=MAX_ITER):
    """Minimize ``(1/n) sum |x_i - a|^p`` over ``a``.

    Parameters
    ----------
    samples : SampleSet or array_like, shape (n, d)
    p : float
        ``p >= 1``.
    start : array_like, optional
        Warm start; the sample mean is used instead if it has a lower
        objective.

    Returns
    -------
    PMeanND
        ``converged`` is False when ``max_iter`` was reached; the best
        iterate is returned in that case.
    """
    s = _as_samples(samples)
    if not (math.isfinite(p) and p >= 1):
        raise InvalidP(f"p must be >= 1 for sample p-means, got {p!r}")
    X = s.points
    mean = X.mean(axis=0)
    if p == 2:
        return PMeanND(mean, _log_F(X, mean, 2.0), 0, True)
    if p == 1 and s.d == 1:
        # minimizers form the median interval; its midpoint is exact
        med = np.median(X, axis=0)
        return PMeanND(med, _log_F(X, med, 1.0), 0, True)
    a = mean
    lf = _log_F(X, a, p)
    if start is not None:
        a0 = np.asarray(start, dtype=np.float64).reshape(-1)
        l0 = _log_F(X, a0, p)
        if l0 < lf:
            a, lf = a0, l0
    for it in range(1, max_iter + 1):
        scale, s0, G, Hs, wsum, wx, n_zero = kernels.pmean_terms(X, a, p)
        if scale == 0.0:
            return PMeanND(a, lf, it, True)
        # |grad F| * spread / F = p |G| / s0 is invariant under similarity maps
        if p * np.linalg.norm(G) / s0 < GRAD_TOL and n_zero == 0:
            return PMeanND(a, lf, it, True)
        steps = _candidate_steps(a, p, scale, G, Hs, wsum, wx, n_zero)
        if steps is None:  # Vardi-Zhang optimality at a sample point
            return PMeanND(a, lf, it, True)
        moved = False
        for delta in steps:
            ok, a_new, lf_new = _line_search(X, a, lf, p, delta)
            if ok:
                moved = True
                break
        if not moved:
            return PMeanND(a, lf, it, True)
        step = np.linalg.norm(a_new - a)
        a, lf = a_new, lf_new
        if step < STEP_TOL * (scale + np.linalg.norm(a)):
            if p == 1:
                a, lf = _snap_to_sample(X, a, lf)
            return PMeanND(a, lf, it, True)
    warnings.warn(f"p={p:g}: no convergence in {max_iter} iterations", NonConvergence,
                  stacklevel=2)
    return PMeanND(a, lf, max_iter, False)


def _snap_to_sample(X, a, lf, rtol=1e-6):
    # Weiszfeld creeps toward an optimum sitting on a sample point; accept
    # the point itself when it satisfies the Vardi-Zhang condition
    k = int(np.argmin(np.einsum("ij,ij->i", X - a, X - a)))
    xk = X[k]
    if np.linalg.norm(xk - a) > rtol * (1 + np.linalg.norm(a)):
        return a, lf
    _, _, G, _, _, _, n_zero = kernels.pmean_terms(X, xk, 1.0)
    if np.linalg.norm(G) <= n_zero:
        return xk.copy(), _log_F(X, xk, 1.0)
    return a, lf


def _candidate_steps(a, p, scale, G, Hs, wsum, wx, n_zero):
    steps = []
    if p == 1:
        T = wx / wsum
        if n_zero:
            R = np.linalg.norm(G)  # |sum of unit vectors| = |R~|
            if R <= n_zero:
                return None
            g = n_zero / R
            steps.append((1 - g) * T + g * a - a)
        else:
            # Newton converges quadratically off the sample points; Weiszfeld backs it up
            try:
                steps.append(-scale * np.linalg.solve(Hs, G))
            except np.linalg.LinAlgError:
                pass
            steps.append(T - a)
        return steps
    if n_zero == 0 or p >= 2:
        try:
            steps.append(-scale * np.linalg.solve(Hs, G))
        except np.linalg.LinAlgError:
            pass
    if p < 2 and wsum > 0:
        steps.append(wx / wsum - a)
    # steepest descent as last resort, sized by the trace of the Hessian
    tr = np.trace(Hs)
    if tr > 0:
        steps.append(-scale * G * (Hs.shape[0] / tr))
    return steps


def _line_search(X, a, lf, p, delta):
    t = 1.0
    slack = 1e-15 * max(1.0, abs(lf))
    for _ in range(MAX_HALVINGS):
        cand = a + t * delta
        lc = _log_F(X, cand, p)
        if lc <= lf + slack:
            return True, cand, lc
        t *= 0.5
    return False, a, lf


@dataclass(frozen=True)
class TrajectoryEntry:
    p: float
    nu: np.ndarray
    objective: float
    log_objective: float
    iterations: int
    converged: bool


@dataclass
class TailboneTrajectory:
    entries: list
    zeta: Optional[np.ndarray] = None
    zeta_note: str = ""
    backend: str = field(default_factory=lambda: kernels.BACKEND)

    def to_csv(self):
        """``p,nu_1..nu_d,objective,iterations,converged`` plus ``# zeta:``."""
        d = self.entries[0].nu.size if self.entries else 0
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p"] + [f"nu_{j + 1}" for j in range(d)]
                   + ["objective", "iterations", "converged"])
        for e in self.entries:
            w.writerow([_g17(e.p)] + [_g17(v) for v in e.nu]
                       + [_g17(e.objective), e.iterations, str(e.converged).lower()])
        if self.zeta is None:
            buf.write(f"# zeta: none ({self.zeta_note or 'unstable'})\n")
        else:
            buf.write("# zeta: " + " ".join(_g17(v) for v in self.zeta) + "\n")
        return buf.getvalue()


def _g17(v):
    return format(float(v), ".17g")


def tailbone_trajectory(samples, p_grid):
    """Sample p-means along an increasing grid, warm-started in order.

    Non-converged entries are kept (``converged=False``); ``zeta`` is
    estimated from the trailing converged entries.
    """
    s = _as_samples(samples)
    grid = [float(p) for p in p_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidP("p grid must be non-empty and strictly increasing")
    if grid[0] < 1:
        raise InvalidP("sample p-means need p >= 1")
    entries, prev = [], None
    for p in grid:
        r = frechet_pmean_nd(s, p, start=prev)
        entries.append(TrajectoryEntry(p, r.nu, r.objective, r.log_objective,
                                       r.iterations, r.converged))
        if r.converged:
            prev = r.nu
    traj = TailboneTrajectory(entries)
    traj.zeta, traj.zeta_note = _zeta_with_note(traj)
    return traj


def _zeta_with_note(traj):
    good = [e for e in traj.entries if e.converged]
    if len(good) < 3:
        return None, "fewer than three converged entries"
    e0, e1, e2 = good[-3:]
    s1 = (e1.nu - e0.nu) / (e1.p - e0.p)
    s2 = (e2.nu - e1.nu) / (e2.p - e1.p)
    n1, n2 = np.linalg.norm(s1), np.linalg.norm(s2)
    if n1 == 0 or n2 == 0:
        return None, "trajectory does not move"
    u1, u2 = s1 / n1, s2 / n2
    angle = math.atan2(np.linalg.norm(u1 - u2 * np.dot(u1, u2)), np.dot(u1, u2))
    if angle > ZETA_ANGLE_TOL:
        return None, f"trailing secants disagree by {angle:.3g} rad"
    return u2, ""


def direction_zeta(traj):
    """Unit direction of the last secant, or ``None`` if the last two secants
    differ by more than ``1e-2`` rad."""
    return _zeta_with_note(traj)[0]
