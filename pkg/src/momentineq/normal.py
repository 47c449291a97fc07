"""Standard normal cdf/quantile and seeded Gaussian streams."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SQRT1_2 = 0.7071067811865475244008443621


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class StreamSeed:
    """Identifies one reproducible random stream.

    Distinct ``(master, stream_id)`` pairs map to independent
    ``numpy.random.SeedSequence`` children, so streams can be consumed on
    different workers without coordination.
    """

    master: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= int(v) <= _MASK64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self, *subkey: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.master), spawn_key=(int(self.stream_id), *subkey))
        return np.random.Generator(np.random.PCG64(ss))


def std_normal_cdf(x: float) -> float:
    """Standard normal distribution function.

    Uses the complementary error function, which keeps full relative accuracy
    in the lower tail. ``+inf`` maps to 1 and ``-inf`` to 0.
    """
    x = float(x)
    if math.isnan(x):
        raise DomainError("std_normal_cdf is undefined at NaN")
    return 0.5 * math.erfc(-x * _SQRT1_2)


def std_normal_pdf(x: float) -> float:
    x = float(x)
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def _ppnd16(p: float) -> float:
    # Wichura (1988), algorithm AS 241, relative accuracy about 1e-16.
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2509.0809287301226727 * r + 33430.575583588128105) * r
                    + 67265.770927008700853) * r + 45921.953931549871457) * r
                  + 13731.693765509461125) * r + 1971.5909503065514427) * r
                + 133.14166789178437745) * r + 3.387132872796366608)
        den = (((((((5226.495278852545925 * r + 28729.085735721942674) * r
                    + 39307.89580009271061) * r + 21213.794301586595867) * r
                  + 5394.1960214247511077) * r + 687.1870074920579083) * r
                + 42.313330701600911252) * r + 1.0)
        return q * num / den
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        num = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r
                    + 0.24178072517745061177) * r + 1.27045825245236838258) * r
                  + 3.64784832476320460504) * r + 5.7694972214606914055) * r
                + 4.6303378461565452959) * r + 1.42343711074968357734)
        den = (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r
                    + 0.0151986665636164571966) * r + 0.14810397642748007459) * r
                  + 0.68976733498510000455) * r + 1.6763848301838038494) * r
                + 2.05319162663775882187) * r + 1.0)
    else:
        r -= 5.0
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                    + 0.0012426609473880784386) * r + 0.026532189526576123093) * r
                  + 0.29656057182850489123) * r + 1.7848265399172913358) * r
                + 5.4637849111641143699) * r + 6.6579046435011037772)
        den = (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r
                    + 1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r
                  + 0.0148753612908506148525) * r + 0.13692988092273580531) * r
                + 0.59983220655588793769) * r + 1.0)
    val = num / den
    return -val if q < 0.0 else val


def std_normal_quantile(q: float) -> float:
    """Inverse of :func:`std_normal_cdf` on the open unit interval."""
    q = float(q)
    if not 0.0 < q < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {q}")
    return _ppnd16(q)


def sample_gaussian_vector(seed: StreamSeed, k: int) -> np.ndarray:
    """``k`` i.i.d. standard normal draws fully determined by ``seed``."""
    if int(k) < 1:
        raise DomainError(f"k must be positive, got {k}")
    return seed.generator().standard_normal(int(k))
