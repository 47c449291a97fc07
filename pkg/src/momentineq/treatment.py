"""Testing whether anyone should be treated, with welfare-gain alternatives.

Stratum effects ``tau(j)`` are observed as ``Z_j ~ N(tau(j), 1)``. The null
``tau <= 0`` is the moment inequality null for ``-tau`` at ``theta0 = 0``, so
the same L^p tests apply to ``-Z``. Treatment draws are built as
``tau - eps`` so that ``-Z`` reproduces the moment model's ``Z`` at
``mu = -tau`` draw for draw.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .model import ModelParams, ValidationError, observations
from .montecarlo import STREAM_WELFARE, SimConfig, map_blocks, proportion
from .normal import DomainError, StreamSeed
from .power import PowerReport, TestSpec, reject, reject_rows
from .stats import format_norm_order


@dataclass(frozen=True, eq=False)
class TreatmentModel:
    """Conditional average treatment effects by stratum; ``-inf`` is allowed."""

    tau: np.ndarray

    def __init__(self, tau):
        arr = np.array(tau, dtype=np.float64).reshape(-1)
        if arr.size < 1:
            raise DomainError("tau must have at least one component")
        if np.isnan(arr).any() or np.isposinf(arr).any():
            raise DomainError("tau may not contain NaN or +inf")
        arr.setflags(write=False)
        object.__setattr__(self, "tau", arr)

    @property
    def k(self) -> int:
        return self.tau.size

    def as_moment_model(self) -> ModelParams:
        return ModelParams(-self.tau)


def welfare_gain(model: TreatmentModel) -> float:
    """Average positive effect ``(1/k) sum_j tau(j)_+``."""
    return float(np.maximum(model.tau, 0.0).sum() / model.k)


def sample_treatment_z(model: TreatmentModel, seed: StreamSeed) -> np.ndarray:
    return model.tau - seed.generator().standard_normal(model.k)


def treatment_reject(test: TestSpec, z) -> bool:
    """Reject ``tau <= 0`` when ``S_p(-z, 0)`` exceeds the critical value."""
    return reject(test, -np.asarray(z, dtype=np.float64), 0.0)


def treatment_power(test: TestSpec, model: TreatmentModel, cfg: SimConfig, stream: int) -> PowerReport:
    if model.k != test.k:
        raise DomainError(f"tau has {model.k} components, test was built for k={test.k}")
    mu = model.as_moment_model()
    hits = map_blocks(cfg, stream, model.k, lambda eps: reject_rows(test, observations(mu, eps), 0.0))
    est, se = proportion(hits)
    return PowerReport(est, se, int(cfg.reps), int(cfg.seed))


def welfare_member(k: int, b: float, m: int) -> np.ndarray:
    """``m`` strata with effect ``k b / m``, the rest ``-inf``; welfare gain exactly ``b``."""
    if not 1 <= m <= k:
        raise DomainError(f"need 1 <= m <= k, got m={m}, k={k}")
    tau = np.full(int(k), -np.inf)
    tau[:m] = k * float(b) / m
    return tau


def minimax_power_welfare(test: TestSpec, b: float, cfg: SimConfig | None = None, ms=None) -> PowerReport:
    """Smallest power over sparse-to-dense effects with welfare gain ``b``.

    Restricted to :func:`welfare_member`, hence an upper bound on the minimax
    power over ``{tau : w(tau) >= b}``. Member ``m`` always uses the same
    stream, so different tests see common random numbers.
    """
    cfg = cfg or SimConfig()
    b = float(b)
    if not b > 0.0:
        raise DomainError(f"b must be positive, got {b}")
    k = test.k
    ms = range(1, k + 1) if ms is None else [int(m) for m in ms]
    by_member = {}
    best = None
    for m in ms:
        model = TreatmentModel(welfare_member(k, b, m))
        rep = treatment_power(test, model, cfg, STREAM_WELFARE + m)
        by_member[m] = (rep.estimate, rep.std_error)
        if best is None or rep.estimate < best[1].estimate:
            best = (model, rep)
    model, rep = best
    return PowerReport(rep.estimate, rep.std_error, rep.reps, rep.seed,
                       worst_case_mu=model.tau.tolist(), by_member=by_member)


@dataclass(frozen=True)
class WelfareRow:
    b: float
    p: str
    estimate: float
    se: float
    worst_m: int
    winner: bool

    def to_dict(self) -> dict:
        return asdict(self)


def compare_tests_welfare(tests, b_grid, cfg: SimConfig | None = None) -> list[WelfareRow]:
    """Family-minimum welfare power of each test at each ``b``; best test per ``b`` flagged."""
    cfg = cfg or SimConfig()
    tests = list(tests)
    if not tests:
        return []
    if len({(t.k, t.alpha) for t in tests}) != 1:
        raise DomainError("all tests must share k and alpha")
    rows = []
    for b in b_grid:
        reports = [minimax_power_welfare(t, b, cfg) for t in tests]
        top = max(r.estimate for r in reports)
        for t, r in zip(tests, reports):
            worst_m = int(np.isfinite(np.asarray(r.worst_case_mu)).sum())
            rows.append(WelfareRow(float(b), format_norm_order(t.p), r.estimate, r.std_error,
                                   worst_m, r.estimate == top))
    return rows


def aggregate_treatment(x, d, y, k: int) -> np.ndarray:
    """Stratum differences of treated and control means from a balanced sample.

    Each ``(stratum, arm)`` cell must hold exactly ``n / (2k)`` observations.
    """
    x = np.asarray(x)
    d = np.asarray(d)
    y = np.asarray(y, dtype=np.float64)
    k = int(k)
    if not (x.shape == d.shape == y.shape) or x.ndim != 1 or x.size == 0:
        raise ValidationError("x, d and y must be nonempty 1-d arrays of equal length")
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}")
    if not np.all(np.equal(np.mod(x, 1), 0)) or x.min() < 1 or x.max() > k:
        raise ValidationError(f"strata must be integers in 1..{k}")
    if not np.isin(d, (0, 1)).all():
        raise ValidationError("treatment indicator must be 0 or 1")
    cell = (x.astype(np.int64) - 1) * 2 + d.astype(np.int64)
    counts = np.bincount(cell, minlength=2 * k)
    if x.size % (2 * k) or np.any(counts != x.size // (2 * k)):
        raise ValidationError(f"unbalanced design: cell counts {counts.tolist()}")
    means = np.bincount(cell, weights=y, minlength=2 * k) / counts
    return means[1::2] - means[0::2]
