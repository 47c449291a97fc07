import math

import numpy as np
import pytest
from scipy.special import logsumexp
from scipy.stats import norm

from momentineq.bounds import asymptotic_sweep, log_np_statistic, np_statistic, upper_bound_power
from momentineq.normal import DomainError
from momentineq.montecarlo import SimConfig

CFG = SimConfig(reps=100_000, seed=51)


def test_np_statistic_examples():
    assert np_statistic(np.zeros(6), 1.7) == pytest.approx(6.0, rel=1e-15)
    assert np_statistic([-1.0, 0.0], 1.0) == pytest.approx(math.e + 1, rel=1e-15)
    grid = np.linspace(-3, 3, 25)
    vals = [np_statistic([z], 0.8) for z in grid]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_logsumexp_matches_naive():
    rng = np.random.default_rng(1)
    for _ in range(100):
        z = rng.normal(size=rng.integers(1, 50)) * 3
        b = rng.uniform(0.1, 5)
        naive = np.exp(-z * b).sum()
        assert np_statistic(z, b) == pytest.approx(naive, rel=1e-12)


def test_log_form_survives_overflow():
    z = np.array([-400.0, 0.0])
    assert log_np_statistic(z, 3.0) == pytest.approx(logsumexp(-3.0 * z), rel=1e-14)
    assert math.isinf(np_statistic(z, 3.0))


def test_np_statistic_domain():
    with pytest.raises(DomainError):
        np_statistic([np.inf], 1.0)
    with pytest.raises(DomainError):
        np_statistic([0.0], 0.0)


@pytest.mark.parametrize("b", [0.5, 1.5, 3.0])
def test_k1_bound_is_attained(b):
    r = upper_bound_power(1, b, 0.05, CFG)
    assert abs(r.beta_bar - (1 - norm.cdf(norm.ppf(0.95) - b))) <= 3 * r.se
    assert r.beta_inf == pytest.approx(1 - norm.cdf(norm.ppf(0.95) - b), abs=1e-12)


@pytest.mark.parametrize("k,b", [(2, 1.0), (5, 2.0), (10, 3.0)])
def test_domination(k, b):
    r = upper_bound_power(k, b, 0.05, CFG)
    assert r.beta_bar + 3 * r.se >= r.beta_inf


def test_vanishing_separation():
    r = upper_bound_power(5, 1e-3, 0.05, CFG)
    assert abs(r.beta_bar - 0.05) <= 3 * r.se


def importance_sampled_bound(k, b, alpha, reps, seed):
    """beta_bar from null draws only, weighting by the mixture likelihood ratio."""
    rng = np.random.default_rng(seed)
    null = np.concatenate([logsumexp(-b * rng.standard_normal((5000, k)), axis=1) for _ in range(reps // 5000)])
    log_c = np.sort(null)[int(math.ceil((1 - alpha) * null.size)) - 1]
    rng2 = np.random.default_rng(seed + 1)
    z = np.concatenate([logsumexp(-b * rng2.standard_normal((5000, k)), axis=1) for _ in range(reps // 5000)])
    weights = np.exp(z - b * b / 2) / k
    vals = weights * (z > log_c)
    return vals.mean(), vals.std() / math.sqrt(vals.size)


@pytest.mark.parametrize("k,b", [(10, 1.8584610944249194), (100, 2.628260884878466)])
def test_bound_matches_importance_sampling(k, b):
    r = upper_bound_power(k, b, 0.05, CFG)
    est, se = importance_sampled_bound(k, b, 0.05, 200_000, 5)
    assert abs(r.beta_bar - est) <= 3 * math.hypot(r.se, se) + 0.01


def test_monotone_in_b_common_numbers():
    vals = [upper_bound_power(5, b, 0.05, CFG) for b in (0.5, 1.0, 1.5, 2.0, 3.0)]
    for lo, hi in zip(vals, vals[1:]):
        assert hi.beta_bar >= lo.beta_bar - 3 * math.hypot(lo.se, hi.se)


def test_sweep_exact_column_increasing():
    rows = asymptotic_sweep(0.05, 0.5, [10, 100, 1000, 10_000], SimConfig(reps=10_000, seed=3))
    col = [r.beta_inf_plus for r in rows]
    oracle = [1 - norm.cdf(norm.ppf(0.95 ** (1 / k)) - math.sqrt(2.5 * math.log(k))) for k in (10, 100, 1000, 10_000)]
    np.testing.assert_allclose(col, oracle, atol=1e-10)
    assert all(a < b for a, b in zip(col, col[1:]))


def test_sweep_degenerate_epsilon():
    rows = asymptotic_sweep(0.05, 2 - 1e-9, [5, 50], SimConfig(reps=20_000, seed=8))
    for r in rows:
        assert r.b_minus < 1e-3
        assert abs(r.beta_bar_minus - 0.05) <= 3 * r.se_minus


@pytest.mark.parametrize("ks,eps", [([1, 10], 0.5), ([10, 10], 0.5), ([10], 2.5), ([10, 200_000], 0.5)])
def test_sweep_validation(ks, eps):
    with pytest.raises(DomainError):
        asymptotic_sweep(0.05, eps, ks, SimConfig(reps=1000))
