"""One-sided L^p statistics and norms."""
from __future__ import annotations

import math

import numpy as np

from . import kernels
from .normal import DomainError

INF = math.inf


def norm_order(p) -> float:
    """Parse a norm order: a real ``>= 1`` or ``inf`` (also the string ``"inf"``)."""
    if isinstance(p, str):
        token = p.strip().lower()
        p = INF if token in ("inf", "infinity", "max") else float(token)
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise DomainError(f"norm order must be >= 1 or inf, got {p}")
    return p


def format_norm_order(p: float) -> str:
    return "inf" if p == INF else f"{p:g}"


def _as_vector(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    if z.size == 0:
        raise DomainError("statistic needs a nonempty vector")
    if np.isnan(z).any():
        raise DomainError("NaN component")
    if np.isneginf(z).any():
        raise DomainError("-inf component makes the statistic infinite")
    return z


def s_p(z, theta0: float, p) -> float:
    """``(sum_j (theta0 - z_j)_+^p)^(1/p)``, or the maximum positive part when ``p`` is inf.

    ``+inf`` components contribute nothing. Large ``p`` is evaluated with the
    largest positive part factored out, so it cannot overflow.
    """
    z = _as_vector(z)
    p = norm_order(p)
    return float(kernels.sp_rows(z[None, :], np.array([float(theta0)]), p)[0])


def s_p_rows(z: np.ndarray, theta0, p) -> np.ndarray:
    """Row-wise :func:`s_p` over an ``(n, k)`` array (no validation)."""
    z = np.ascontiguousarray(z, dtype=np.float64)
    theta = np.broadcast_to(np.asarray(theta0, dtype=np.float64), (z.shape[0],))
    return kernels.sp_rows(z, np.ascontiguousarray(theta), float(p))


def one_sided_norm_neg(x, p) -> float:
    """Norm of the negative parts, ``||x||_{-,p}``."""
    return s_p(x, 0.0, p)


def one_sided_norm_pos(x, p) -> float:
    """Norm of the positive parts, ``||x||_{+,p}``."""
    x = np.asarray(x, dtype=np.float64)
    if np.isposinf(x).any():
        raise DomainError("+inf component makes the positive norm infinite")
    return s_p(-x, 0.0, p)
