# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled row kernels for the Monte Carlo hot loops.

Each function maps an ``(n, k)`` C-contiguous float64 array to ``n`` values,
one per row. The arithmetic mirrors :mod:`momentineq._pure` operation for
operation so both backends agree to rounding.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, exp, log, pow, sqrt

cnp.import_array()


cdef inline double _sp_row(const double[::1] z, double theta, double p) noexcept nogil:
    cdef Py_ssize_t j, k = z.shape[0]
    cdef double v, m = 0.0, acc = 0.0
    for j in range(k):
        v = theta - z[j]
        if v > m:
            m = v
    if m == 0.0:
        return 0.0
    if p == INFINITY:
        return m
    if p == 1.0:
        for j in range(k):
            v = theta - z[j]
            if v > 0.0:
                acc += v
        return acc
    if p == 2.0:
        for j in range(k):
            v = theta - z[j]
            if v > 0.0:
                v = v / m
                acc += v * v
        return m * sqrt(acc)
    for j in range(k):
        v = theta - z[j]
        if v > 0.0:
            acc += pow(v / m, p)
    return m * pow(acc, 1.0 / p)


def sp_rows(const double[:, ::1] z, const double[::1] theta, double p):
    """One-sided L^p statistic of every row at its own ``theta``."""
    cdef Py_ssize_t i, n = z.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _sp_row(z[i], theta[i], p)
    return out


def invert_rows(const double[:, ::1] z, double c, double p, double tol):
    """Largest theta with S_p(z_i, theta) <= c, per row, by bisection.

    Rows without a finite coordinate return +inf.
    """
    cdef Py_ssize_t i, j, n = z.shape[0], k = z.shape[1]
    cdef double lo, hi, mid, zmin
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            zmin = INFINITY
            for j in range(k):
                if z[i, j] < zmin:
                    zmin = z[i, j]
            if zmin == INFINITY:
                o[i] = INFINITY
                continue
            lo = zmin
            hi = zmin + c
            if _sp_row(z[i], hi, p) <= c:
                o[i] = hi
                continue
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                if _sp_row(z[i], mid, p) <= c:
                    lo = mid
                else:
                    hi = mid
            o[i] = lo
    return out


def neg_logsumexp_rows(const double[:, ::1] z, double b):
    """``log(sum_j exp(-b * z_ij))`` per row, max-shifted."""
    cdef Py_ssize_t i, j, n = z.shape[0], k = z.shape[1]
    cdef double m, acc, v
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            m = -INFINITY
            for j in range(k):
                v = -b * z[i, j]
                if v > m:
                    m = v
            acc = 0.0
            for j in range(k):
                acc += exp(-b * z[i, j] - m)
            o[i] = m + log(acc)
    return out
