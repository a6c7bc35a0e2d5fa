import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from subordination.bernstein import BernsteinFunction, LevySpec
from subordination.errors import ConfigError, DomainError
from subordination.montecarlo import (BLOCK, SubordinatorSampler, block_generator, sample_path, sample_trajectory,
                                      validate_laplace)
from subordination.scales import ScaleSpec

P, W = ScaleSpec.power, ScaleSpec.piecewise
RHO_HALF = LevySpec(P(2.0), P(1.0))
KINKED = LevySpec(P(2.0), W(1.0, 4.0))
# rho_inf = 5 gives a finite fourth moment of the jump law
LIGHT_TAIL = LevySpec(P(2.0), W(1.0, 10.0))


def test_rate_and_compensator_closed_forms():
    for eps in (1e-2, 1e-4, 1e-6):
        s = SubordinatorSampler(RHO_HALF, eps)
        assert s.rate == pytest.approx(2 / math.sqrt(eps), rel=1e-10)
        assert s.table_rate == pytest.approx(s.rate, rel=1e-10)
        assert s.compensator == pytest.approx(2 * math.sqrt(eps), rel=1e-10)


def test_rate_decreasing_and_compensator_vanishing():
    eps = [1e-6, 1e-4, 1e-2]
    rates = [SubordinatorSampler(KINKED, e).rate for e in eps]
    comp = [SubordinatorSampler(KINKED, e).compensator for e in eps]
    assert rates[0] > rates[1] > rates[2] and all(np.isfinite(rates))
    assert comp[0] < comp[1] < comp[2] and comp[0] < 1e-2


def test_table_rate_with_kinks():
    s = SubordinatorSampler(KINKED, 1e-4)
    assert s.table_rate == pytest.approx(s.rate, rel=1e-10)


def test_jump_law_matches_exact_cdf():
    s = SubordinatorSampler(RHO_HALF, 1e-4)
    x = s.sample_jumps(block_generator(11, 0), 20000)
    assert np.all(x >= 1e-4)
    # mu = t^-3/2 restricted to [eps, inf): F(t) = 1 - sqrt(eps / t)
    assert stats.kstest(x, lambda t: 1 - np.sqrt(1e-4 / t)).pvalue > 1e-3


def test_jump_law_with_kinked_density():
    s = SubordinatorSampler(KINKED, 1e-3)
    x = s.sample_jumps(block_generator(2, 0), 20000)
    grid = np.logspace(-3, 2, 11)
    expected = np.array([KINKED.moment(0, 1e-3, g).value for g in grid]) / s.rate
    empirical = np.array([(x <= g).mean() for g in grid])
    assert np.max(np.abs(empirical - expected)) < 4 * 0.5 / math.sqrt(len(x))


def test_zero_horizon_and_errors():
    s = SubordinatorSampler(RHO_HALF, 1e-4)
    assert np.array_equal(sample_path(s, 0.0, 7), np.zeros(7))
    with pytest.raises(DomainError):
        sample_path(s, -1.0, 3)
    with pytest.raises(ConfigError):
        sample_path(SubordinatorSampler(RHO_HALF, 1e-12), 10.0, 1)
    with pytest.raises(ConfigError):
        SubordinatorSampler(RHO_HALF, 0.0)
    with pytest.raises(ConfigError):
        SubordinatorSampler(RHO_HALF, 1e-3, seed=-1)


def test_reproducible_and_seed_sensitive():
    a = sample_path(SubordinatorSampler(RHO_HALF, 1e-3, seed=5), 1.0, BLOCK + 100)
    b = sample_path(SubordinatorSampler(RHO_HALF, 1e-3, seed=5), 1.0, BLOCK + 100)
    c = sample_path(SubordinatorSampler(RHO_HALF, 1e-3, seed=6), 1.0, BLOCK + 100)
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, c)


def test_blocks_are_stream_independent():
    s = SubordinatorSampler(RHO_HALF, 1e-3, seed=9)
    two = sample_path(s, 1.0, 2 * BLOCK)
    one = sample_path(s, 1.0, BLOCK)
    assert np.array_equal(two[:BLOCK], one)


@settings(max_examples=10)
@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=5))
def test_trajectories_nondecreasing(steps):
    s = SubordinatorSampler(KINKED, 1e-3, seed=1)
    times = np.cumsum(steps)
    paths = sample_trajectory(s, times, 200)
    assert np.all(paths >= 0) and np.all(np.diff(paths, axis=1) >= 0)


def test_rho_half_laplace_at_one():
    s = SubordinatorSampler(RHO_HALF, 1e-4, seed=0)
    x = np.exp(-sample_path(s, 1.0, 100_000))
    se = x.std(ddof=1) / math.sqrt(len(x))
    assert abs(x.mean() - math.exp(-2 * math.sqrt(math.pi))) <= 3 * se


def test_doubling_time_doubles_log_laplace():
    s = SubordinatorSampler(RHO_HALF, 1e-4, seed=3)
    est = []
    for T in (0.5, 1.0):
        x = np.exp(-sample_path(s, T, 50_000))
        m, se = x.mean(), x.std(ddof=1) / math.sqrt(len(x))
        est.append((-math.log(m), se / m))
    (a, sa), (b, sb) = est
    assert abs(b - 2 * a) <= 4 * math.hypot(sb, 2 * sa)


def test_validate_report():
    rep = validate_laplace(SubordinatorSampler(KINKED, 1e-4, seed=4), 1.0, [0.0, 1.0], 50_000)
    assert rep["pass"]
    zero, one = rep["rows"]
    assert zero["empirical"] == zero["expected"] == 1.0 and zero["z"] == 0.0
    assert one["truncation_gap"] <= one["bias_bound"] * (1 + 1e-6) + 1e-15


def test_halving_eps_within_bias_bound():
    f = BernsteinFunction(KINKED)
    for lam in (0.5, 2.0):
        vals = []
        for eps in (1e-3, 5e-4):
            s = SubordinatorSampler(KINKED, eps)
            vals.append(f.integrate(lam, eps, np.inf).value + lam * s.compensator)
        bound = 0.5 * lam ** 2 * KINKED.moment(2, 0.0, 1e-3).value
        assert abs(vals[0] - vals[1]) <= bound


def test_second_moment():
    s = SubordinatorSampler(LIGHT_TAIL, 1e-3, seed=8)
    T, n = 1.0, 100_000
    x = sample_path(s, T, n)
    k2, k4 = (T * LIGHT_TAIL.moment(k, 1e-3, np.inf).value for k in (2, 4))
    mean = T * LIGHT_TAIL.moment(1, 0.0, np.inf).value
    se_var = math.sqrt((k4 + 2 * k2 ** 2) / n)
    assert abs(x.var(ddof=1) - k2) <= 5 * se_var
    assert abs(x.mean() - mean) <= 5 * math.sqrt(k2 / n)
    cv = math.sqrt(k2) / mean
    assert x.std(ddof=1) / x.mean() == pytest.approx(cv, rel=5 * se_var / (2 * k2) + 5 * math.sqrt(k2 / n) / mean)
