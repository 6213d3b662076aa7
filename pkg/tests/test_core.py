import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsprofile import (
    EPS_SCALE,
    RunConfig,
    distance,
    dot_product,
    precompute_stats,
    update_dot,
    validate_series,
)
from tsprofile.core import Profile

from conftest import naive_window_stats


class TestValidateSeries:
    def test_accepts_list_and_returns_contiguous_float(self):
        x = validate_series([1, 2, 3, 4, 5])
        assert x.dtype == np.float64 and x.flags.c_contiguous

    def test_rejects_short_series(self):
        with pytest.raises(ValueError, match="at least 4"):
            validate_series([1.0, 2.0, 3.0])

    def test_rejects_nan_and_inf_with_position(self):
        with pytest.raises(ValueError, match="position 2"):
            validate_series([1.0, 2.0, np.nan, 4.0])
        with pytest.raises(ValueError, match="non-finite"):
            validate_series([1.0, np.inf, 3.0, 4.0])

    def test_rejects_single_precision_overflow(self):
        with pytest.raises(ValueError, match="non-finite"):
            validate_series([1.0, 1e39, 3.0, 4.0], dtype=np.float32)

    def test_rejects_2d(self):
        with pytest.raises(ValueError, match="1-D"):
            validate_series(np.zeros((4, 2)))


class TestPrecomputeStats:
    def test_constant_series(self):
        stats = precompute_stats(np.ones(6), 4)
        assert np.array_equal(stats.means, [1.0, 1.0, 1.0])
        assert np.array_equal(stats.stddevs, [0.0, 0.0, 0.0])

    def test_alternating_series(self):
        x = np.array([0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0])
        stats = precompute_stats(x, 4)
        assert np.array_equal(stats.means, np.full(5, 0.5))
        assert np.array_equal(stats.stddevs, np.full(5, 0.5))

    def test_matches_two_pass_oracle_double(self):
        rng = np.random.default_rng(11)
        x = rng.uniform(-100, 100, 256)
        stats = precompute_stats(x, 16)
        means, stds = naive_window_stats(x, 16)
        np.testing.assert_allclose(stats.means, means, rtol=1e-12, atol=1e-10)
        np.testing.assert_allclose(stats.stddevs, stds, rtol=1e-12)

    def test_matches_two_pass_oracle_long_series(self):
        # error growth must stay bounded for n at the 1e5 scale
        rng = np.random.default_rng(5)
        x = rng.uniform(-100, 100, 100_000)
        for m in (4, 16, 1024):
            stats = precompute_stats(x, m)
            means, stds = naive_window_stats(x, m)
            np.testing.assert_allclose(stats.means, means, rtol=1e-12, atol=1e-10)
            np.testing.assert_allclose(stats.stddevs, stds, rtol=1e-12)

    def test_single_precision_within_1e4(self):
        rng = np.random.default_rng(6)
        x = rng.uniform(-100, 100, 20_000).astype(np.float32)
        stats = precompute_stats(x, 64)
        assert stats.means.dtype == np.float32
        means, stds = naive_window_stats(x, 64)
        np.testing.assert_allclose(stats.means.astype(np.float64), means,
                                   rtol=1e-4, atol=1e-4)
        np.testing.assert_allclose(stats.stddevs.astype(np.float64), stds, rtol=1e-4)

    def test_sigma_zero_iff_constant_window(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(-1, 1, 200)
        x[50:80] = 0.25
        m = 8
        stats = precompute_stats(x, m)
        windows = np.lib.stride_tricks.sliding_window_view(x, m)
        constant = windows.max(axis=1) == windows.min(axis=1)
        assert constant.any() and not constant.all()
        assert np.array_equal(stats.stddevs == 0.0, constant)

    def test_rejects_bad_window(self):
        with pytest.raises(ValueError):
            precompute_stats(np.ones(8), 8)
        with pytest.raises(ValueError):
            precompute_stats(np.ones(8), 9)
        with pytest.raises(ValueError):
            precompute_stats(np.ones(8), 3)

    @given(st.integers(0, 2**31), st.integers(4, 24), st.integers(30, 120))
    @settings(max_examples=40, deadline=None)
    def test_property_matches_oracle(self, seed, m, n):
        rng = np.random.default_rng(seed)
        x = rng.uniform(-100, 100, n)
        stats = precompute_stats(x, m)
        means, stds = naive_window_stats(x, m)
        np.testing.assert_allclose(stats.means, means, rtol=1e-12, atol=1e-10)
        np.testing.assert_allclose(stats.stddevs, stds, rtol=1e-12, atol=1e-12)
        assert len(stats) == n - m + 1
        assert (stats.stddevs >= 0).all()


class TestDotProduct:
    def test_hand_arithmetic(self):
        assert dot_product([1, 2, 3, 4, 5], 0, 1, 3) == 20.0

    def test_self_dot(self):
        x = [1.5, -2.0, 3.0, 4.0, 0.5]
        assert dot_product(x, 1, 1, 3) == pytest.approx((-2.0) ** 2 + 9.0 + 16.0)

    def test_all_pairs_exact_on_integer_series(self):
        rng = np.random.default_rng(1)
        x = rng.integers(-8, 9, 128).astype(np.float64)
        m = 8
        for i in range(0, 121, 5):
            for j in range(121):
                expected = 0.0
                for t in range(m):
                    expected += x[i + t] * x[j + t]
                assert dot_product(x, i, j, m) == expected

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            dot_product([1, 2, 3, 4, 5], 3, 0, 3)
        with pytest.raises(ValueError, match="out of range"):
            dot_product([1, 2, 3, 4, 5], 0, -1, 3)


class TestUpdateDot:
    def test_zero_corrections(self):
        assert update_dot(7.25, 0.0, 0.0, 0.0, 0.0) == 7.25

    def test_hand_arithmetic_chain(self):
        x = [1.0, 2.0, 3.0, 4.0, 5.0]
        q01 = dot_product(x, 0, 1, 3)
        assert q01 == 20.0
        q12 = update_dot(q01, x[0], x[1], x[3], x[4])
        assert q12 == 38.0 == dot_product(x, 1, 2, 3)

    def test_chained_updates_track_direct_dot_everywhere(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(512)
        m = 32
        length = 512 - m + 1
        for k in range(1, length):
            q = dot_product(x, 0, k, m)
            for i in range(1, length - k):
                j = i + k
                q = update_dot(q, x[i - 1], x[j - 1], x[i + m - 1], x[j + m - 1])
                direct = dot_product(x, i, j, m)
                assert q == pytest.approx(direct, rel=1e-10)


class TestDistance:
    def test_identical_windows_zero(self):
        mu, sigma, m = 2.0, 1.5, 8
        q = m * (sigma**2 + mu**2)
        assert distance(m, q, mu, sigma, mu, sigma) == 0.0

    def test_anticorrelated_maximum(self):
        # normalized correlation -1: q = m*mu_i*mu_j - m*sigma_i*sigma_j
        m, mu, sigma = 16, 0.0, 1.0
        q = -m * sigma * sigma
        assert distance(m, q, mu, sigma, mu, sigma) == math.sqrt(4 * m)

    def test_worked_example_locked_against_oracle(self):
        x = np.array([0.0, 1.0, 0.0, 1.0, 2.0, 0.0, 1.0, 0.0])
        m = 4
        q = dot_product(x, 0, 4, m)
        assert q == 0.0
        means, stds = naive_window_stats(x, m)
        d = distance(m, q, means[0], stds[0], means[4], stds[4])
        # independent oracle: z-normalize both windows explicitly
        a, b = x[0:4], x[4:8]
        an = (a - a.mean()) / a.std()
        bn = (b - b.mean()) / b.std()
        expected = np.sqrt(((an - bn) ** 2).sum())
        assert d == pytest.approx(expected, rel=1e-9)
        assert d == pytest.approx(3.9033668, abs=1e-6)

    def test_flat_rules(self):
        m = 8
        assert distance(m, 0.0, 1.0, 0.0, 1.0, 0.0) == 0.0
        assert distance(m, 0.0, 1.0, 0.0, 2.0, 1.0) == math.sqrt(2 * m)
        assert distance(m, 0.0, 2.0, 1.0, 1.0, 0.0) == math.sqrt(2 * m)
        # sigma below the scaled threshold counts as flat
        assert distance(m, 0.0, 100.0, 1e-12, 2.0, 1.0) == math.sqrt(2 * m)

    def test_negative_radicand_clamped(self):
        # same stats as the exact-zero case but q nudged up: correlation > 1
        mu, sigma, m = 2.0, 1.5, 8
        q = np.nextafter(m * (sigma**2 + mu**2), np.inf)
        d = distance(m, q, mu, sigma, mu, sigma)
        assert d == 0.0 and not math.isnan(d)

    def test_rejects_small_m(self):
        with pytest.raises(ValueError):
            distance(3, 0.0, 0.0, 1.0, 0.0, 1.0)

    @given(
        st.floats(-1e4, 1e4),
        st.floats(-100, 100), st.floats(1e-3, 100),
        st.floats(-100, 100), st.floats(1e-3, 100),
        st.integers(4, 512),
    )
    @settings(max_examples=200)
    def test_symmetric_bounded_never_nan(self, q, mu_i, sig_i, mu_j, sig_j, m):
        d_ij = distance(m, q, mu_i, sig_i, mu_j, sig_j)
        d_ji = distance(m, q, mu_j, sig_j, mu_i, sig_i)
        assert d_ij == d_ji  # bitwise symmetry
        assert 0.0 <= d_ij <= 2.0 * math.sqrt(m)
        assert not math.isnan(d_ij)

    def test_matches_explicit_znorm_on_random_windows(self):
        rng = np.random.default_rng(9)
        m = 16
        for _ in range(200):
            a = rng.uniform(-100, 100, m)
            b = rng.uniform(-100, 100, m)
            q = float(np.dot(a, b))
            d = distance(m, q, a.mean(), a.std(), b.mean(), b.std())
            an = (a - a.mean()) / a.std()
            bn = (b - b.mean()) / b.std()
            expected = float(np.sqrt(((an - bn) ** 2).sum()))
            assert d == pytest.approx(expected, rel=1e-9)

    def test_self_distance_zero_through_stats_path(self):
        rng = np.random.default_rng(12)
        x = rng.uniform(-100, 100, 128)
        m = 16
        stats = precompute_stats(x, m)
        for i in range(0, 113, 7):
            q = dot_product(x, i, i, m)
            d = distance(m, q, stats.means[i], stats.stddevs[i],
                         stats.means[i], stats.stddevs[i])
            assert d == pytest.approx(0.0, abs=1e-6)


class TestRunConfig:
    def test_defaults_resolve(self):
        config = RunConfig(m=32)
        assert config.resolved_exclusion == 8
        assert config.dtype == np.float64
        assert config.eps_scale == EPS_SCALE["double"]
        config.validate(500)

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError, match="m must be"):
            RunConfig(m=3).validate(100)
        with pytest.raises(ValueError, match="exceed"):
            RunConfig(m=100).validate(100)
        with pytest.raises(ValueError, match="exclusion"):
            RunConfig(m=8, exclusion=0).validate(100)
        with pytest.raises(ValueError, match="no computable"):
            RunConfig(m=64, exclusion=40).validate(100)
        with pytest.raises(ValueError, match="workers"):
            RunConfig(m=8, workers=0).validate(100)
        with pytest.raises(ValueError, match="batch_width"):
            RunConfig(m=8, batch_width=0).validate(100)
        with pytest.raises(ValueError, match="precision"):
            RunConfig(m=8, precision="half").validate(100)
        with pytest.raises(ValueError, match="ordering"):
            RunConfig(m=8, ordering="sorted").validate(100)
        with pytest.raises(ValueError, match="at most one"):
            RunConfig(m=8, budget_diagonals=5, budget_ms=5.0).validate(100)
        with pytest.raises(ValueError, match="seed"):
            RunConfig(m=8, seed=-1).validate(100)

    def test_single_precision_dtypes(self):
        config = RunConfig(m=8, precision="single")
        assert config.dtype == np.float32
        assert config.index_dtype == np.int32
        assert config.eps_scale == EPS_SCALE["single"]


class TestProfile:
    def test_empty_sentinels(self):
        p = Profile.empty(5, 8)
        assert np.all(np.isinf(p.distances))
        assert np.all(p.indices == -1)
        assert p.indices.dtype == np.int64

    def test_empty_single_precision(self):
        p = Profile.empty(5, 8, dtype=np.float32)
        assert p.distances.dtype == np.float32
        assert p.indices.dtype == np.int32
