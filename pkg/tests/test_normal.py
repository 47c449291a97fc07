import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special, stats as sps

from momentineq.normal import (
    DomainError,
    StreamSeed,
    sample_gaussian_vector,
    std_normal_cdf,
    std_normal_quantile,
)


def bisect_quantile(q, tol=1e-14):
    lo, hi = -40.0, 40.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if std_normal_cdf(mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_cdf_examples():
    assert std_normal_cdf(0.0) == 0.5
    assert abs(std_normal_cdf(40.0) - 1.0) <= 1e-12
    assert abs(std_normal_cdf(1.6448536269514722) - 0.95) <= 1e-12


def test_cdf_matches_integrated_density():
    x = 1.6448536269514722
    body, _ = integrate.quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), 0.0, x, epsabs=1e-14)
    assert abs(std_normal_cdf(x) - (0.5 + body)) <= 1e-12


def test_cdf_infinities_and_nan():
    assert std_normal_cdf(math.inf) == 1.0
    assert std_normal_cdf(-math.inf) == 0.0
    with pytest.raises(DomainError):
        std_normal_cdf(math.nan)


@given(st.floats(-38, 38))
def test_cdf_symmetry(x):
    assert abs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) <= 1e-12


def test_cdf_against_scipy():
    xs = np.linspace(-12, 12, 4001)
    assert max(abs(std_normal_cdf(x) - special.ndtr(x)) for x in xs) <= 1e-12


def test_quantile_examples():
    assert std_normal_quantile(0.5) == 0.0
    assert abs(std_normal_quantile(0.95) - bisect_quantile(0.95)) <= 1e-12
    assert abs(std_normal_quantile(0.95) - 1.6448536269514722) <= 1e-12


@pytest.mark.parametrize("q", [0.001, 0.025, 0.3, 0.49])
def test_quantile_antisymmetry(q):
    assert abs(std_normal_quantile(q) + std_normal_quantile(1 - q)) <= 1e-12


def test_quantile_cdf_residual():
    for q in np.linspace(0.001, 0.999, 999):
        assert abs(std_normal_cdf(std_normal_quantile(q)) - q) <= 1e-12


def test_quantile_against_scipy_tails():
    qs = np.concatenate([np.logspace(-300, -1, 300), 1 - np.logspace(-15, -1, 100)])
    for q in qs:
        ref = special.ndtri(q)
        assert abs(std_normal_quantile(q) - ref) <= 1e-14 * max(1.0, abs(ref))


def test_roundtrip_grid():
    # upper tail goes through 1 - q, which a double only holds to ~1e-16
    for q in np.linspace(0.001, 0.999, 999):
        x = std_normal_quantile(q)
        assert abs(std_normal_quantile(std_normal_cdf(x)) - x) <= 1e-9
    for x in np.linspace(-6, 0, 601):
        assert abs(std_normal_quantile(std_normal_cdf(x)) - x) <= 1e-9


@pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5, math.nan])
def test_quantile_domain(q):
    with pytest.raises(DomainError):
        std_normal_quantile(q)


def test_sampler_determinism_and_streams():
    a = sample_gaussian_vector(StreamSeed(7, 3), 50)
    b = sample_gaussian_vector(StreamSeed(7, 3), 50)
    c = sample_gaussian_vector(StreamSeed(7, 4), 50)
    d = sample_gaussian_vector(StreamSeed(8, 3), 50)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_sampler_moments():
    x = sample_gaussian_vector(StreamSeed(11, 0), 1_000_000)
    assert abs(x.mean()) <= 4e-3
    assert abs(x.var() - 1.0) <= 6e-3


def test_sampler_ks():
    x = sample_gaussian_vector(StreamSeed(12, 0), 100_000)
    assert sps.kstest(x, "norm").pvalue > 1e-4


def test_streams_uncorrelated():
    a = sample_gaussian_vector(StreamSeed(5, 1), 200_000)
    b = sample_gaussian_vector(StreamSeed(5, 2), 200_000)
    assert abs(np.corrcoef(a, b)[0, 1]) < 4 / math.sqrt(200_000)


def test_sampler_domain():
    with pytest.raises(DomainError):
        sample_gaussian_vector(StreamSeed(1, 0), 0)
    with pytest.raises(DomainError):
        StreamSeed(-1, 0)
    with pytest.raises(DomainError):
        StreamSeed(1, 1 << 64)
