"""Neyman-Pearson upper bound on minimax power and its large-k behaviour.

No level-alpha test can beat the most powerful test of ``mu = 0`` against the
uniform mixture of the ``k`` single-violation points ``-b e_j``. That test
rejects for large ``sum_j exp(-b Z_j)``; everything here works with its
logarithm so large ``b * |Z|`` cannot overflow.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .critical import critical_value_max
from .montecarlo import (
    STREAM_BOUND_ALT,
    STREAM_BOUND_NULL,
    SimConfig,
    map_blocks,
    proportion,
    upper_order_statistic,
)
from .normal import DomainError, std_normal_cdf

DEFAULT_MAX_K = 100_000


def log_np_statistic(z, b: float) -> float:
    z = np.asarray(z, dtype=np.float64).reshape(1, -1)
    if z.size == 0 or not np.isfinite(z).all():
        raise DomainError("Neyman-Pearson statistic needs a nonempty finite vector")
    if not float(b) > 0.0:
        raise DomainError(f"b must be positive, got {b}")
    return float(kernels.neg_logsumexp_rows(np.ascontiguousarray(z), float(b))[0])


def np_statistic(z, b: float) -> float:
    """``sum_j exp(-z_j b)``, accumulated in log-sum-exp form; ``inf`` past the float range."""
    log_t = log_np_statistic(z, b)
    return math.exp(log_t) if log_t < 709.78 else math.inf


@dataclass(frozen=True)
class BoundReport:
    beta_bar: float
    beta_inf: float
    b: float
    k: int
    c_tilde: float
    log_c_tilde: float
    se: float
    alpha: float
    reps: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def _log_stats(k: int, b: float, cfg: SimConfig, stream: int, shift: float) -> np.ndarray:
    def block(eps):
        if shift:
            eps[:, 0] -= shift
        return kernels.neg_logsumexp_rows(eps, b)

    return map_blocks(cfg, stream, k, block)


def upper_bound_power(k: int, b: float, alpha: float = 0.05, cfg: SimConfig | None = None) -> BoundReport:
    """Monte Carlo ``beta_bar(b; k)`` alongside the exact max-test minimax power.

    The critical value is the ``ceil((1 - alpha) N)`` order statistic under
    ``mu = 0``; power is estimated under ``(-b, 0, ..., 0)`` on an independent
    stream.
    """
    cfg = cfg or SimConfig()
    k, b, alpha = int(k), float(b), float(alpha)
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if not b > 0.0:
        raise DomainError(f"b must be positive, got {b}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    null = _log_stats(k, b, cfg, STREAM_BOUND_NULL, 0.0)
    log_c, _ = upper_order_statistic(null, 1.0 - alpha)
    del null
    alt = _log_stats(k, b, cfg, STREAM_BOUND_ALT, b)
    beta_bar, se = proportion(alt > log_c)
    beta_inf = std_normal_cdf(b - critical_value_max(k, alpha).value) if alpha <= 0.5 else math.nan
    return BoundReport(
        beta_bar=beta_bar,
        beta_inf=beta_inf,
        b=b,
        k=k,
        c_tilde=math.exp(log_c) if log_c < 709.0 else math.inf,
        log_c_tilde=log_c,
        se=se,
        alpha=alpha,
        reps=int(cfg.reps),
        seed=int(cfg.seed),
    )


@dataclass(frozen=True)
class SweepRow:
    k: int
    b_minus: float
    beta_bar_minus: float
    se_minus: float
    b_plus: float
    beta_inf_plus: float

    def to_dict(self) -> dict:
        return asdict(self)


def asymptotic_sweep(alpha: float, epsilon: float, ks, cfg: SimConfig | None = None,
                     max_k: int = DEFAULT_MAX_K) -> list[SweepRow]:
    """Bound at ``sqrt((2 - eps) log k)`` and max-test power at ``sqrt((2 + eps) log k)``.

    The first column is Monte Carlo, the second exact.
    """
    cfg = cfg or SimConfig()
    ks = [int(k) for k in ks]
    eps = float(epsilon)
    if not 0.0 < eps < 2.0:
        raise DomainError(f"epsilon must lie in (0, 2), got {eps}")
    if any(k < 2 for k in ks) or any(a >= b for a, b in zip(ks, ks[1:])):
        raise DomainError("ks must be strictly increasing and at least 2")
    if ks and ks[-1] > max_k:
        raise DomainError(f"k={ks[-1]} exceeds the cap max_k={max_k}")
    rows = []
    for k in ks:
        b_minus = math.sqrt((2.0 - eps) * math.log(k))
        b_plus = math.sqrt((2.0 + eps) * math.log(k))
        rep = upper_bound_power(k, b_minus, alpha, cfg)
        beta_inf = std_normal_cdf(b_plus - critical_value_max(k, alpha).value)
        rows.append(SweepRow(k, b_minus, rep.beta_bar, rep.se, b_plus, beta_inf))
    return rows
