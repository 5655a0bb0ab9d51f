"""Pure-numpy versions of the tailbone kernels (fallback for ``_kernels``)."""

import numpy as np


def pmean_terms(X, a, p):
    """Objective, gradient and Hessian sums of ``sum_i |x_i - a|^p`` at ``a``.

    Distances are divided by ``scale = max_i |x_i - a|`` so that every
    power stays in ``[0, 1]``; callers rescale.  With ``rho_i = r_i/scale``
    and unit vectors ``u_i = (a - x_i)/r_i``:

    ``s0 = sum rho^p``, ``grad = sum rho^(p-1) u``,
    ``hess = sum rho^(p-2) (I + (p-2) u u^T)``,
    ``wsum = sum rho^(p-2)``, ``wx = sum rho^(p-2) x`` (IRLS weights),
    all over points with ``r_i > 0``; ``n_zero`` counts points at ``a``.

    Returns ``(scale, s0, grad, hess, wsum, wx, n_zero)``.
    """
    X = np.asarray(X, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    diff = a[None, :] - X
    r = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    scale = float(r.max())
    d = X.shape[1]
    if scale == 0.0:
        return 0.0, 0.0, np.zeros(d), np.zeros((d, d)), 0.0, np.zeros(d), X.shape[0]
    pos = r > 0
    n_zero = int(X.shape[0] - pos.sum())
    rho = r[pos] / scale
    u = diff[pos] / r[pos, None]
    w2 = rho ** (p - 2)
    s0 = float(np.sum(rho ** p))
    grad = (w2 * rho) @ u
    hess = w2.sum() * np.eye(d) + (p - 2) * (u.T * w2) @ u
    wx = w2 @ X[pos]
    return scale, s0, grad, hess, float(w2.sum()), wx, n_zero


def log_objective(X, a, p):
    """``log sum_i |x_i - a|^p`` (``-inf`` when every point equals ``a``)."""
    diff = np.asarray(a, dtype=np.float64)[None, :] - np.asarray(X, dtype=np.float64)
    r = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    scale = r.max()
    if scale == 0.0:
        return -np.inf
    return float(p * np.log(scale) + np.log(np.sum((r / scale) ** p)))
