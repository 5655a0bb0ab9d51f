# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tailbone kernels; same contract as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, pow, log, INFINITY

cnp.import_array()


def pmean_terms(X, a, double p):
    cdef const double[:, ::1] xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], d = xv.shape[1], i, j, k
    cdef double[::1] r = np.empty(n)
    cdef double scale = 0.0, acc, t
    for i in range(n):
        acc = 0.0
        for j in range(d):
            t = av[j] - xv[i, j]
            acc += t * t
        r[i] = sqrt(acc)
        if r[i] > scale:
            scale = r[i]
    grad_a = np.zeros(d)
    hess_a = np.zeros((d, d))
    wx_a = np.zeros(d)
    if scale == 0.0:
        return 0.0, 0.0, grad_a, hess_a, 0.0, wx_a, n
    cdef double[::1] grad = grad_a
    cdef double[:, ::1] hess = hess_a
    cdef double[::1] wx = wx_a
    cdef double[::1] u = np.empty(d)
    cdef double s0 = 0.0, wsum = 0.0, rho, w2, c
    cdef Py_ssize_t n_zero = 0
    for i in range(n):
        if r[i] == 0.0:
            n_zero += 1
            continue
        rho = r[i] / scale
        w2 = pow(rho, p - 2.0)
        s0 += w2 * rho * rho
        wsum += w2
        c = (p - 2.0) * w2
        for j in range(d):
            u[j] = (av[j] - xv[i, j]) / r[i]
            grad[j] += w2 * rho * u[j]
            wx[j] += w2 * xv[i, j]
        for j in range(d):
            for k in range(d):
                hess[j, k] += c * u[j] * u[k]
    for j in range(d):
        hess[j, j] += wsum
    return scale, s0, grad_a, hess_a, wsum, wx_a, n_zero


def log_objective(X, a, double p):
    cdef const double[:, ::1] xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], d = xv.shape[1], i, j
    cdef double[::1] r = np.empty(n)
    cdef double scale = 0.0, acc, t, s = 0.0
    for i in range(n):
        acc = 0.0
        for j in range(d):
            t = av[j] - xv[i, j]
            acc += t * t
        r[i] = sqrt(acc)
        if r[i] > scale:
            scale = r[i]
    if scale == 0.0:
        return -INFINITY
    for i in range(n):
        s += pow(r[i] / scale, p)
    return p * log(scale) + log(s)
