"""NumPy implementations of the row kernels.

Used when the compiled extension is unavailable. Signatures and arithmetic
match ``_kernels.pyx``.
"""
import numpy as np


def _sp_matrix(z, theta, p):
    v = theta[:, None] - z
    np.maximum(v, 0.0, out=v)
    m = v.max(axis=1) if v.shape[1] else np.zeros(v.shape[0])
    if p == np.inf:
        return m
    if p == 1.0:
        return v.sum(axis=1)
    out = np.zeros(z.shape[0])
    pos = m > 0.0
    if not pos.any():
        return out
    scaled = v[pos] / m[pos, None]
    if p == 2.0:
        out[pos] = m[pos] * np.sqrt((scaled * scaled).sum(axis=1))
    else:
        out[pos] = m[pos] * np.power(np.power(scaled, p).sum(axis=1), 1.0 / p)
    return out


def sp_rows(z, theta, p):
    """One-sided L^p statistic of every row at its own ``theta``."""
    z = np.ascontiguousarray(z, dtype=np.float64)
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    return _sp_matrix(z, theta, float(p))


def invert_rows(z, c, p, tol):
    """Largest theta with S_p(z_i, theta) <= c, per row, by vectorised bisection."""
    z = np.ascontiguousarray(z, dtype=np.float64)
    p = float(p)
    zmin = z.min(axis=1)
    out = np.full(z.shape[0], np.inf)
    finite = np.isfinite(zmin)
    idx = np.flatnonzero(finite)
    lo = zmin[idx]
    hi = lo + c
    done = _sp_matrix(z[idx], hi, p) <= c
    out[idx[done]] = hi[done]
    idx, lo, hi = idx[~done], lo[~done], hi[~done]
    while idx.size:
        mid = 0.5 * (lo + hi)
        stuck = (mid <= lo) | (mid >= hi)
        active = (hi - lo > tol) & ~stuck
        if not active.all():
            fin = ~active
            out[idx[fin]] = lo[fin]
            idx, lo, hi, mid = idx[active], lo[active], hi[active], mid[active]
            if not idx.size:
                break
        below = _sp_matrix(z[idx], mid, p) <= c
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return out


def neg_logsumexp_rows(z, b):
    """``log(sum_j exp(-b * z_ij))`` per row, max-shifted."""
    z = np.ascontiguousarray(z, dtype=np.float64)
    v = -b * z
    m = v.max(axis=1)
    return m + np.log(np.exp(-b * z - m[:, None]).sum(axis=1))
