"""Least-favorable critical values for the one-sided L^p tests.

Under ``mu = 0`` the max statistic satisfies ``P(S_inf <= c) = Phi(c)^k`` for
``c >= 0``, which gives a closed form. Finite ``p`` uses the upper order
statistic of simulated null statistics. All finite-``p`` values computed with
the same :class:`SimConfig` share one innovation stream, so comparisons across
``p`` use common random numbers.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .montecarlo import (
    STREAM_CRITICAL,
    ConfigError,
    SimConfig,
    map_blocks,
    upper_order_statistic,
)
from .normal import DomainError, std_normal_quantile
from .stats import INF, format_norm_order, norm_order, s_p_rows

MIN_REPS = 10_000
DEFAULT_CRITICAL_REPS = 1_000_000


class UnsupportedError(ValueError):
    """Request outside the range the methods here are valid for."""


@dataclass(frozen=True)
class CriticalValue:
    value: float
    k: int
    p: float
    alpha: float
    method: str  # "closed_form" or "monte_carlo"
    reps: int | None = None
    seed: int | None = None
    mc_std_error: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p"] = format_norm_order(self.p)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CriticalValue":
        d = dict(d)
        d["p"] = norm_order(d["p"])
        return cls(**d)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if alpha > 0.5:
        raise UnsupportedError("alpha > 1/2 is not supported (critical value may be negative)")
    return alpha


def critical_value_max(k: int, alpha: float) -> CriticalValue:
    """Exact critical value of the max test, ``Phi^{-1}((1 - alpha)^{1/k})``."""
    k = int(k)
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    alpha = _check_alpha(alpha)
    level = math.exp(math.log1p(-alpha) / k)
    return CriticalValue(std_normal_quantile(level), k, INF, alpha, "closed_form")


def null_statistics(k: int, p, cfg: SimConfig) -> np.ndarray:
    """Simulated ``S_p(Z, 0)`` under ``mu = 0`` on the critical-value stream."""
    p = norm_order(p)
    return map_blocks(cfg, STREAM_CRITICAL, k, lambda eps: s_p_rows(eps, 0.0, p))


def critical_value_from_sample(stats: np.ndarray, k: int, p, alpha: float,
                               cfg: SimConfig | None = None) -> CriticalValue:
    """Upper ``ceil((1 - alpha) N)`` order statistic of a simulated null sample."""
    alpha = _check_alpha(alpha)
    value, se = upper_order_statistic(stats, 1.0 - alpha)
    return CriticalValue(
        value=value,
        k=int(k),
        p=norm_order(p),
        alpha=alpha,
        method="monte_carlo",
        reps=int(np.asarray(stats).size),
        seed=None if cfg is None else int(cfg.seed),
        mc_std_error=se,
    )


def critical_value_mc(k: int, alpha: float, p, cfg: SimConfig | None = None) -> CriticalValue:
    """Monte Carlo least-favorable critical value for any norm order."""
    cfg = cfg if cfg is not None else SimConfig(reps=DEFAULT_CRITICAL_REPS)
    alpha = _check_alpha(alpha)
    if int(cfg.reps) < MIN_REPS:
        raise ConfigError(f"critical values need at least {MIN_REPS} replications")
    return critical_value_from_sample(null_statistics(k, p, cfg), k, p, alpha, cfg)


def critical_value(k: int, alpha: float, p, cfg: SimConfig | None = None) -> CriticalValue:
    """Closed form for the max test, Monte Carlo otherwise."""
    p = norm_order(p)
    if p == INF:
        return critical_value_max(k, alpha)
    return critical_value_mc(k, alpha, p, cfg)


class CriticalValueCache:
    """JSON file of critical values keyed by ``(k, p, alpha, reps, seed)``."""

    def __init__(self, path):
        self.path = Path(path)
        self._entries: dict[str, dict] = {}
        if self.path.exists():
            self._entries = json.loads(self.path.read_text())

    @staticmethod
    def key(k: int, p, alpha: float, cfg: SimConfig | None) -> str:
        p = norm_order(p)
        if p == INF:
            return f"k={int(k)}|p=inf|alpha={float(alpha)!r}"
        cfg = cfg if cfg is not None else SimConfig(reps=DEFAULT_CRITICAL_REPS)
        return (f"k={int(k)}|p={format_norm_order(p)}|alpha={float(alpha)!r}"
                f"|reps={int(cfg.reps)}|seed={int(cfg.seed)}|block={int(cfg.block_size)}")

    def get(self, k, p, alpha, cfg=None) -> CriticalValue:
        key = self.key(k, p, alpha, cfg)
        if key in self._entries:
            return CriticalValue.from_dict(self._entries[key])
        cv = critical_value(k, alpha, p, cfg)
        self._entries[key] = cv.to_dict()
        return cv

    def save(self) -> None:
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        tmp.write_text(json.dumps(self._entries, indent=1, sort_keys=True))
        os.replace(tmp, self.path)

    def __len__(self):
        return len(self._entries)
