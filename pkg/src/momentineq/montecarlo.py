"""Blocked, seed-addressed Monte Carlo engine.

Replications are cut into fixed-size blocks; block ``i`` of a stream always
draws from ``StreamSeed(cfg.seed, stream_id).generator(i)``. The block layout
depends only on ``(reps, k, block_size)``, so results do not depend on how
many worker threads run the blocks.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Callable

import numpy as np

from .normal import DomainError, StreamSeed

DEFAULT_SEED = 20_150_101
MAX_BLOCK_ELEMENTS = 1 << 21

# stream ids, one per independent simulation purpose
STREAM_CRITICAL = 1
STREAM_POWER = 2
STREAM_CI = 3
STREAM_BOUND_NULL = 4
STREAM_BOUND_ALT = 5
STREAM_LP_ALT = 0x100  # + m
STREAM_WELFARE = 0x10000  # + m


class ConfigError(ValueError):
    """Simulation configuration that cannot deliver the requested estimate."""


@dataclass(frozen=True)
class SimConfig:
    """Replication count, master seed and block layout for one simulation.

    ``threads`` only controls parallelism; it never changes a result.
    """

    reps: int = 100_000
    seed: int = DEFAULT_SEED
    block_size: int = 1 << 15
    threads: int | None = None

    def __post_init__(self):
        if int(self.reps) < 1:
            raise ConfigError(f"reps must be positive, got {self.reps}")
        if int(self.block_size) < 1:
            raise ConfigError(f"block_size must be positive, got {self.block_size}")
        StreamSeed(int(self.seed), 0)

    def with_reps(self, reps: int) -> "SimConfig":
        return replace(self, reps=int(reps))

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("threads")
        return d

    @property
    def workers(self) -> int:
        return self.threads if self.threads else (os.cpu_count() or 1)


def block_rows(cfg: SimConfig, k: int) -> int:
    return max(1, min(int(cfg.block_size), MAX_BLOCK_ELEMENTS // max(int(k), 1)))


def map_blocks(
    cfg: SimConfig,
    stream_id: int,
    k: int,
    func: Callable[[np.ndarray], np.ndarray],
) -> np.ndarray:
    """Apply ``func`` to standard normal ``(rows, k)`` blocks and concatenate.

    ``func`` receives a fresh C-contiguous block and must return one value per
    row. The concatenated output has length ``cfg.reps``.
    """
    if int(k) < 1:
        raise DomainError(f"k must be positive, got {k}")
    reps = int(cfg.reps)
    rows = block_rows(cfg, k)
    n_blocks = -(-reps // rows)
    seed = StreamSeed(int(cfg.seed), int(stream_id))

    def run(i: int) -> np.ndarray:
        n = min(rows, reps - i * rows)
        eps = seed.generator(i).standard_normal((n, int(k)))
        return np.asarray(func(eps), dtype=np.float64)

    workers = min(cfg.workers, n_blocks)
    if workers <= 1:
        parts = [run(i) for i in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    return np.concatenate(parts)


def draw_matrix(cfg: SimConfig, stream_id: int, k: int) -> np.ndarray:
    """Materialise the full ``(reps, k)`` innovation matrix of a stream."""
    out = np.empty((int(cfg.reps), int(k)))
    rows = block_rows(cfg, k)
    seed = StreamSeed(int(cfg.seed), int(stream_id))
    for i, start in enumerate(range(0, int(cfg.reps), rows)):
        n = min(rows, int(cfg.reps) - start)
        out[start:start + n] = seed.generator(i).standard_normal((n, int(k)))
    return out


def upper_order_statistic(values: np.ndarray, level: float) -> tuple[float, float]:
    """The ``ceil(level * N)``-th order statistic and its binomial standard error.

    The standard error is half the spread between the order statistics one
    binomial standard deviation either side of the target rank.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    r = int(np.ceil(level * n - 1e-9))
    if r >= n or r < 1:
        raise ConfigError(
            f"{n} replications cannot resolve the {level} quantile; increase reps"
        )
    d = max(1, int(np.ceil(np.sqrt(n * level * (1.0 - level)))))
    lo_r, hi_r = max(1, r - d), min(n, r + d)
    part = np.partition(values, (lo_r - 1, r - 1, hi_r - 1))
    value = float(part[r - 1])
    se = 0.5 * float(part[hi_r - 1] - part[lo_r - 1]) * (2 * d) / (hi_r - lo_r)
    return value, se


def proportion(hits: np.ndarray) -> tuple[float, float]:
    """Sample proportion and its binomial standard error."""
    hits = np.asarray(hits, dtype=bool)
    n = hits.size
    est = float(np.count_nonzero(hits)) / n
    return est, float(np.sqrt(est * (1.0 - est) / n))


def mean_se(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    sd = float(values.std(ddof=1)) if n > 1 else 0.0
    return float(values.mean()), sd / np.sqrt(n)
