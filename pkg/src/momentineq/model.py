"""The Gaussian moment inequality model ``Z ~ N(mu, I_k)``.

A mean of ``+inf`` marks a slack moment: its observation is deterministically
``+inf`` and every one-sided statistic ignores it exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .normal import DomainError, StreamSeed


class ValidationError(ValueError):
    """Raw data that does not fit the balanced design."""


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Mean vector of the moment inequality model."""

    mu: np.ndarray

    def __init__(self, mu):
        arr = np.array(mu, dtype=np.float64).reshape(-1)
        if arr.size < 1:
            raise DomainError("mu must have at least one component")
        if np.isnan(arr).any():
            raise DomainError("mu may not contain NaN")
        if np.isneginf(arr).any():
            raise DomainError("mu may not contain -inf")
        if not np.isfinite(arr).any():
            raise DomainError("mu needs at least one finite component")
        arr.setflags(write=False)
        object.__setattr__(self, "mu", arr)

    @property
    def k(self) -> int:
        return self.mu.size

    def shift(self, c: float) -> "ModelParams":
        return ModelParams(self.mu + c)

    def __repr__(self):
        return f"ModelParams(mu={self.mu.tolist()})"


def theta_bar(params: ModelParams) -> float:
    """Upper end of the identified set, ``min_j mu(j)``."""
    if not isinstance(params, ModelParams):
        params = ModelParams(params)
    return float(params.mu.min())


def in_null(params: ModelParams, theta0: float) -> bool:
    return theta_bar(params) >= theta0


def sample_z(params: ModelParams, seed: StreamSeed) -> np.ndarray:
    """One draw of ``Z``; slack coordinates come back as ``+inf``."""
    eps = seed.generator().standard_normal(params.k)
    return params.mu + eps


def observations(params: ModelParams, eps: np.ndarray) -> np.ndarray:
    """Turn a block of standard normal innovations into draws of ``Z``."""
    return eps + params.mu[None, :]


@dataclass(frozen=True, eq=False)
class RawSample:
    """Labelled observations from a balanced design.

    ``x`` holds labels in ``1..k``; every label must occur exactly ``n / k``
    times. ``w`` holds the observed values.
    """

    x: np.ndarray
    w: np.ndarray
    k: int

    def __post_init__(self):
        x = np.asarray(self.x)
        w = np.asarray(self.w, dtype=np.float64)
        k = int(self.k)
        if k < 1:
            raise ValidationError(f"k must be positive, got {k}")
        if x.shape != w.shape or x.ndim != 1:
            raise ValidationError("labels and values must be 1-d arrays of equal length")
        if x.size == 0:
            raise ValidationError("empty sample")
        if not np.all(np.equal(np.mod(x, 1), 0)):
            raise ValidationError("labels must be integers")
        x = x.astype(np.int64)
        if x.min() < 1 or x.max() > k:
            raise ValidationError(f"labels must lie in 1..{k}")
        counts = np.bincount(x - 1, minlength=k)
        if x.size % k or np.any(counts != x.size // k):
            raise ValidationError(f"unbalanced design: label counts {counts.tolist()}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "k", k)


def aggregate(raw: RawSample) -> np.ndarray:
    """Per-label means ``Z_j`` of a balanced sample."""
    n_per = raw.x.size // raw.k
    return np.bincount(raw.x - 1, weights=raw.w, minlength=raw.k) / n_per
