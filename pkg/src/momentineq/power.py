"""Rejection rules and minimax power of the one-sided L^p tests."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .critical import CriticalValue, critical_value
from .model import ModelParams, observations
from .montecarlo import STREAM_LP_ALT, STREAM_POWER, SimConfig, map_blocks, proportion
from .normal import DomainError, std_normal_cdf
from .stats import INF, norm_order, s_p, s_p_rows


@dataclass(frozen=True)
class TestSpec:
    """A level-``alpha`` test that rejects when ``S_p(Z, theta0)`` exceeds ``critical``."""

    __test__ = False  # keep pytest from collecting this class

    p: float
    alpha: float
    critical: CriticalValue

    def __post_init__(self):
        object.__setattr__(self, "p", norm_order(self.p))
        if self.critical.p != self.p or self.critical.alpha != float(self.alpha):
            raise DomainError("critical value was computed for a different (p, alpha)")

    @property
    def k(self) -> int:
        return self.critical.k

    @property
    def c(self) -> float:
        return self.critical.value


def make_test(k: int, p, alpha: float = 0.05, cfg: SimConfig | None = None) -> TestSpec:
    p = norm_order(p)
    return TestSpec(p, float(alpha), critical_value(k, alpha, p, cfg))


@dataclass(frozen=True)
class PowerReport:
    estimate: float
    std_error: float
    reps: int | None = None
    seed: int | None = None
    worst_case_mu: list | None = None
    by_member: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.estimate <= 1.0:
            raise ValueError(f"power estimate {self.estimate} outside [0, 1]")


def reject(test: TestSpec, z, theta0: float = 0.0) -> bool:
    return s_p(z, theta0, test.p) > test.c


def reject_rows(test: TestSpec, z: np.ndarray, theta0: float = 0.0) -> np.ndarray:
    return s_p_rows(z, theta0, test.p) > test.c


def minimax_power_exact(test: TestSpec, b: float) -> float:
    """``1 - Phi(c - b)``: power at the least favorable alternative ``(theta0 - b, inf, ..., inf)``."""
    b = float(b)
    if not b > 0.0:
        raise DomainError(f"separation b must be positive, got {b}")
    if test.alpha > 0.5:
        raise DomainError("closed-form minimax power needs alpha <= 1/2")
    return std_normal_cdf(b - test.c)


def _power(test: TestSpec, mu: ModelParams, theta0: float, cfg: SimConfig, stream: int) -> PowerReport:
    if mu.k != test.k:
        raise DomainError(f"mean vector has {mu.k} components, test was built for k={test.k}")
    hits = map_blocks(cfg, stream, mu.k,
                      lambda eps: reject_rows(test, observations(mu, eps), theta0))
    est, se = proportion(hits)
    return PowerReport(est, se, int(cfg.reps), int(cfg.seed))


def power_at(test: TestSpec, mu, theta0: float = 0.0, cfg: SimConfig | None = None,
             stream: int = STREAM_POWER) -> PowerReport:
    """Monte Carlo rejection probability at ``mu``."""
    mu = mu if isinstance(mu, ModelParams) else ModelParams(mu)
    return _power(test, mu, float(theta0), cfg or SimConfig(), stream)


def lp_alt_member(k: int, b: float, p_alt, m: int) -> np.ndarray:
    """``m`` coordinates at ``-b m^{-1/p_alt}``, the rest slack; ``||mu||_{-,p_alt} = b``."""
    p_alt = norm_order(p_alt)
    if not 1 <= m <= k:
        raise DomainError(f"need 1 <= m <= k, got m={m}, k={k}")
    mu = np.full(int(k), np.inf)
    mu[:m] = -float(b) * (1.0 if p_alt == INF else m ** (-1.0 / p_alt))
    return mu


def minimax_power_lp_alt(test: TestSpec, b: float, p_alt, cfg: SimConfig | None = None,
                         ms=None) -> PowerReport:
    """Smallest power over sparse-to-dense points on the ``||mu||_{-,p_alt} = b`` sphere.

    The search is restricted to the family built by :func:`lp_alt_member`, so
    the result is an upper bound on the minimax power over ``M_{1,p_alt}(b)``.
    Each member ``m`` uses its own stream, shared across tests.
    """
    cfg = cfg or SimConfig()
    k = test.k
    b = float(b)
    if not b > 0.0:
        raise DomainError(f"separation b must be positive, got {b}")
    ms = range(1, k + 1) if ms is None else [int(m) for m in ms]
    by_member = {}
    best = None
    for m in ms:
        mu = ModelParams(lp_alt_member(k, b, p_alt, m))
        rep = _power(test, mu, 0.0, cfg, STREAM_LP_ALT + m)
        by_member[m] = (rep.estimate, rep.std_error)
        if best is None or rep.estimate < best[1].estimate:
            best = (mu, rep)
    mu, rep = best
    return PowerReport(rep.estimate, rep.std_error, rep.reps, rep.seed,
                       worst_case_mu=mu.mu.tolist(), by_member=by_member)
