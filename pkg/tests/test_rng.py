"""Random stream and sampler tests: determinism, bit economy, and
distributional checks against analytic laws."""

import math

import numpy as np
import pytest
from scipy import stats

from probminhash import RandomStream, TruncExpParams, new_stream
from probminhash.errors import InvalidParamsError

KS_LEVEL = 0.001


def test_same_seed_identical_stream():
    a = new_stream(42)
    b = new_stream(42)
    assert np.array_equal(a.u64_batch(1000), b.u64_batch(1000))


def test_distinct_seeds_distinct_streams():
    assert new_stream(1).next_u64() != new_stream(2).next_u64()


def test_scalar_and_batch_draws_agree():
    a = new_stream(9)
    b = new_stream(9)
    batch = b.uniform01_batch(100)
    scalars = [a.next_uniform01() for _ in range(100)]
    assert np.array_equal(batch, np.array(scalars))


def test_uniform01_range_and_mean():
    u = new_stream(7).uniform01_batch(1_000_000)
    assert np.all(u >= 0.0) and np.all(u < 1.0)
    # CLT: 4 sigma = 4 / sqrt(12 * 10^6) < 0.002
    assert abs(u.mean() - 0.5) < 0.002


def test_uniform01_ks_uniformity():
    u = new_stream(11).uniform01_batch(1_000_000)
    assert stats.kstest(u, "uniform").pvalue > KS_LEVEL


def test_uniform01_bit_accounting():
    # a [0,1) real consumes exactly 53 bits; leftover bits carry over between
    # 64-bit refills, so nothing is discarded
    s = new_stream(3)
    for k in (1, 2, 17, 128):
        s = new_stream(3)
        s.uniform01_batch(k)
        assert s.bits_consumed == 53 * k
        assert s.words_generated == -(-53 * k // 64)


def test_uniform_int_singleton():
    s = new_stream(5)
    assert all(s.next_uniform_int(1) == 0 for _ in range(100))


def test_uniform_int_range_validation():
    with pytest.raises(InvalidParamsError):
        new_stream(0).next_uniform_int(0)


def test_uniform_int_chi_square_six_cells():
    draws = new_stream(13).uniform_int_batch(6, 600_000)
    counts = np.bincount(draws, minlength=6)
    assert stats.chisquare(counts).pvalue > KS_LEVEL


def test_uniform_int_large_range_bounds():
    draws = new_stream(17).uniform_int_batch(2 ** 32, 100_000)
    assert np.all(draws >= 0) and np.all(draws < 2 ** 32)


def test_uniform_int_bit_economy():
    # one rejection-free draw over {0..5} costs ceil(log2 6) = 3 bits
    s = new_stream(19)
    n = 100_000
    s.uniform_int_batch(6, n)
    rounds = s.bits_consumed / 3
    # mean rounds per draw is 8/6 (3-bit words, accept 6 of 8)
    assert rounds == pytest.approx(n * 8 / 6, rel=0.01)


def test_exp1_positive_mean_and_ks():
    x = new_stream(23).exp1_batch(1_000_000)
    assert np.all(x > 0.0)
    assert abs(x.mean() - 1.0) < 0.004
    assert stats.kstest(x, "expon").pvalue > KS_LEVEL


def test_trunc_exp_params_invariants():
    for lam in (0.01, 0.1, math.log(2.0), 3.0, 20.0):
        p = TruncExpParams.from_rate(lam)
        assert 0.0 < p.c2 < 1.0
        assert p.c3 < 1.0 < p.c1
        assert p.fast_path_probability == pytest.approx(
            lam / math.expm1(lam))
    with pytest.raises(InvalidParamsError):
        TruncExpParams.from_rate(0.0)


def test_trunc_exp_range():
    s = new_stream(29)
    p = TruncExpParams.from_rate(3.0)
    x = s.trunc_exp_batch(p, 100_000)
    assert np.all(x >= 0.0) and np.all(x < 1.0)


def _trunc_cdf(lam):
    def cdf(x):
        return -np.expm1(-lam * x) / -np.expm1(-lam)
    return cdf


def test_trunc_exp_ks():
    lam = 0.1
    x = new_stream(31).trunc_exp_batch(TruncExpParams.from_rate(lam), 1_000_000)
    assert stats.kstest(x, _trunc_cdf(lam)).pvalue > KS_LEVEL


def test_trunc_exp_fast_path_frequency_log2():
    # rectangle fast path accepts with probability lam / (e^lam - 1) = log 2
    p = TruncExpParams.from_rate(math.log(2.0))
    ctr = np.zeros(8, np.int64)
    new_stream(37).trunc_exp_batch(p, 1_000_000, ctr)
    assert ctr[1] / ctr[0] == pytest.approx(0.693, abs=0.005)


def test_trunc_exp_fast_path_frequency_small_rate():
    # lam = log(1 + 1/(m-1)) for m = 256: fast path ~ 1 - 1/(2*255)
    lam = math.log(1.0 + 1.0 / 255.0)
    p = TruncExpParams.from_rate(lam)
    ctr = np.zeros(8, np.int64)
    new_stream(41).trunc_exp_batch(p, 1_000_000, ctr)
    assert ctr[1] / ctr[0] == pytest.approx(1.0 - 1.0 / 510.0, abs=0.002)


def test_trunc_exp_region_counters_consistent():
    # exp is evaluated only at the density fallback: never for points accepted
    # in the rectangle, the left strip, or under either tangent
    p = TruncExpParams.from_rate(math.log(2.0))
    ctr = np.zeros(8, np.int64)
    new_stream(43).trunc_exp_batch(p, 200_000, ctr)
    draws, fast, strip, tan0, tan1, dens, expev, rej = ctr
    assert fast + strip + tan0 + tan1 + dens == draws
    assert expev == dens + rej
    assert min(fast, strip, tan0, tan1) > 0


def test_counted_and_plain_sampler_agree():
    p = TruncExpParams.from_rate(0.7)
    a = new_stream(47)
    b = new_stream(47)
    plain = np.array([a.next_trunc_exp(p) for _ in range(2000)])
    counted = b.trunc_exp_batch(p, 2000)
    assert np.array_equal(plain, counted)
