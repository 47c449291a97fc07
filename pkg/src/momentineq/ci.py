"""Upper confidence bounds by test inversion, their risk, and duality checks.

A test family ``phi_theta0`` inverts to ``(-inf, c_hat]`` with ``c_hat`` the
largest ``theta0`` that is not rejected. Loss is charged on the excess
``(c_hat - theta_bar(mu))_+``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .model import ModelParams, observations, theta_bar
from .montecarlo import STREAM_CI, SimConfig, map_blocks, mean_se
from .normal import DomainError
from .power import TestSpec, minimax_power_exact
from .stats import INF, format_norm_order

DEFAULT_TOL = 1e-8
QUAD_POINTS = 200
QUAD_MARGIN = 8.0


class UnsupportedLossError(ValueError):
    pass


@dataclass(frozen=True)
class UpperCI:
    c_hat: float
    p: float
    tol: float


@dataclass(frozen=True)
class LossSpec:
    """Excess-length loss from a small catalog with known representing measure.

    ``zero_one`` is ``1{t >= b}`` (point mass at ``b``), ``linear`` is ``t``
    (Lebesgue measure) and ``quadratic`` is ``t**2`` (density ``2b``).
    """

    kind: str
    b: float | None = None

    def __post_init__(self):
        if self.kind not in ("zero_one", "linear", "quadratic"):
            raise UnsupportedLossError(f"unknown loss {self.kind!r}")
        if self.kind == "zero_one" and not (self.b is not None and self.b > 0):
            raise DomainError("zero_one loss needs a positive threshold b")

    @classmethod
    def zero_one(cls, b: float) -> "LossSpec":
        return cls("zero_one", float(b))

    def __call__(self, t):
        t = np.maximum(np.asarray(t, dtype=np.float64), 0.0)
        if self.kind == "zero_one":
            return (t >= self.b).astype(np.float64)
        if self.kind == "linear":
            return t
        return t * t

    def nu_density(self, b):
        """Density of the representing measure on ``(0, inf)``."""
        b = np.asarray(b, dtype=np.float64)
        if self.kind == "linear":
            return np.ones_like(b)
        if self.kind == "quadratic":
            return 2.0 * b
        raise UnsupportedLossError("zero_one loss has a point-mass measure, not a density")

    def label(self) -> str:
        return f"zero_one({self.b:g})" if self.kind == "zero_one" else self.kind


@dataclass(frozen=True)
class RiskReport:
    estimate: float
    std_error: float
    reps: int
    seed: int


def invert_test(test: TestSpec, z, tol: float = DEFAULT_TOL, method: str = "auto") -> UpperCI:
    """Upper endpoint of the confidence interval obtained by inverting ``test`` at ``z``.

    The max test has the closed form ``min z + c``. Otherwise ``theta0 ->
    S_p(z, theta0)`` is continuous and nondecreasing, zero at ``min z`` and at
    least ``c`` at ``min z + c``, so bisection on that bracket always succeeds.
    ``method="bisect"`` forces bisection for the max test too.
    """
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    if z.size != test.k:
        raise DomainError(f"z has {z.size} components, test was built for k={test.k}")
    if np.isnan(z).any() or np.isneginf(z).any():
        raise DomainError("z may not contain NaN or -inf")
    if not np.isfinite(z).any():
        raise DomainError("z needs at least one finite component")
    c_hat = float(invert_rows(test, z[None, :], tol, method)[0])
    return UpperCI(c_hat, test.p, float(tol))


def invert_rows(test: TestSpec, z: np.ndarray, tol: float = DEFAULT_TOL, method: str = "auto") -> np.ndarray:
    if method not in ("auto", "bisect", "closed_form"):
        raise ValueError(f"unknown inversion method {method!r}")
    if method == "closed_form" and test.p != INF:
        raise DomainError("closed-form inversion exists only for the max test")
    if test.p == INF and method != "bisect":
        return z.min(axis=1) + test.c
    return kernels.invert_rows(np.ascontiguousarray(z, dtype=np.float64), float(test.c),
                               float(test.p), float(tol))


def excess_sample(test: TestSpec, mu, cfg: SimConfig, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Simulated ``(c_hat(Z) - theta_bar(mu))_+`` under ``mu``."""
    mu = mu if isinstance(mu, ModelParams) else ModelParams(mu)
    if mu.k != test.k:
        raise DomainError(f"mean vector has {mu.k} components, test was built for k={test.k}")
    tb = theta_bar(mu)
    return map_blocks(
        cfg, STREAM_CI, mu.k,
        lambda eps: np.maximum(invert_rows(test, observations(mu, eps), tol) - tb, 0.0),
    )


def ci_risk(test: TestSpec, mu, loss: LossSpec, cfg: SimConfig | None = None) -> RiskReport:
    """Monte Carlo ``E_mu loss((c_hat - theta_bar(mu))_+)``."""
    cfg = cfg or SimConfig()
    est, se = mean_se(loss(excess_sample(test, mu, cfg)))
    return RiskReport(est, se, int(cfg.reps), int(cfg.seed))


def least_favorable_mu(k: int, b: float) -> ModelParams:
    """``(-b, inf, ..., inf)``: one violated moment, all others slack."""
    mu = np.full(int(k), np.inf)
    mu[0] = -float(b)
    return ModelParams(mu)


def _config(test: TestSpec, cfg: SimConfig, **extra) -> dict:
    d = {"k": test.k, "p": format_norm_order(test.p), "alpha": test.alpha,
         "critical_value": test.c, "critical_method": test.critical.method}
    d.update(cfg.to_dict())
    d.update(extra)
    return d


@dataclass(frozen=True)
class DualityReport:
    lhs: float
    rhs: float
    gap: float
    se: float
    config: dict

    def to_dict(self) -> dict:
        return asdict(self)


def duality_check(test: TestSpec, b: float, cfg: SimConfig | None = None) -> DualityReport:
    """Compare minimax test power with one minus the zero-one CI risk.

    The left side is ``1 - Phi(c - b)``, the same for every ``theta0``. The
    right side is simulated at ``(-b, inf, ..., inf)``, which is least
    favorable for the zero-one loss at ``b``.
    """
    cfg = cfg or SimConfig()
    lhs = minimax_power_exact(test, b)
    risk = ci_risk(test, least_favorable_mu(test.k, b), LossSpec.zero_one(b), cfg)
    rhs = 1.0 - risk.estimate
    return DualityReport(lhs, rhs, abs(lhs - rhs), risk.std_error, _config(test, cfg, b=float(b)))


@dataclass(frozen=True)
class LossIntegralReport:
    direct: float
    integrated: float
    gap: float
    se: float
    direct_se: float
    quad_points: int
    b_max: float
    config: dict

    def to_dict(self) -> dict:
        return asdict(self)


def quadrature_nodes(loss: LossSpec, b_max: float, n: int = QUAD_POINTS):
    """Midpoint nodes and weights of ``nu`` on ``(0, b_max]``."""
    h = b_max / n
    nodes = (np.arange(n) + 0.5) * h
    return nodes, h * loss.nu_density(nodes)


def loss_integral_check(test: TestSpec, loss: LossSpec, cfg: SimConfig | None = None,
                        n_points: int = QUAD_POINTS) -> LossIntegralReport:
    """Direct risk versus the ``nu``-integral of zero-one risks, on common draws.

    Both sides are evaluated at ``(0, inf, ..., inf)``, which is least favorable
    for every zero-one loss simultaneously. ``nu`` is truncated at ``c + 8``.
    """
    cfg = cfg or SimConfig()
    mu = least_favorable_mu(test.k, 0.0)
    excess = excess_sample(test, mu, cfg)
    direct_vals = loss(excess)
    if loss.kind == "zero_one":
        integrated_vals = direct_vals
        b_max, n_points = float(loss.b), 1
    else:
        b_max = test.c + QUAD_MARGIN
        nodes, weights = quadrature_nodes(loss, b_max, n_points)
        # per replication: sum_i w_i 1{excess >= b_i}, via sorted nodes
        cum = np.concatenate([[0.0], np.cumsum(weights)])
        integrated_vals = cum[np.searchsorted(nodes, excess, side="right")]
    direct, direct_se = mean_se(direct_vals)
    integrated = float(np.mean(integrated_vals))
    _, gap_se = mean_se(direct_vals - integrated_vals)
    return LossIntegralReport(
        direct=direct,
        integrated=integrated,
        gap=abs(direct - integrated),
        se=gap_se,
        direct_se=direct_se,
        quad_points=int(n_points),
        b_max=float(b_max),
        config=_config(test, cfg, loss=loss.label()),
    )


def coverage(test: TestSpec, mu, cfg: SimConfig | None = None, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Empirical ``P(theta_bar(mu) <= c_hat)`` and its standard error."""
    cfg = cfg or SimConfig()
    mu = mu if isinstance(mu, ModelParams) else ModelParams(mu)
    tb = theta_bar(mu)
    hits = map_blocks(cfg, STREAM_CI, mu.k,
                      lambda eps: invert_rows(test, observations(mu, eps), tol) >= tb)
    est, _ = mean_se(hits)
    return est, math.sqrt(est * (1.0 - est) / hits.size)
