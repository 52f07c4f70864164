import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetcache import (
    ContentConfig,
    hit_probability,
    mpc_hit_approx,
    sample_cache_realization,
    zipf_popularity,
)

from oracles import zipf_partial_sum_reversed


class TestZipf:
    def test_uniform_at_zero_exponent(self):
        assert np.allclose(zipf_popularity(4, 0.0), [0.25, 0.25, 0.25, 0.25])

    def test_two_items(self):
        a = zipf_popularity(2, 1.0)
        assert a[0] == pytest.approx(2.0 / 3.0, rel=1e-14)
        assert a[1] == pytest.approx(1.0 / 3.0, rel=1e-14)

    def test_large_library_normalised(self):
        a = zipf_popularity(100_000, 0.7)
        assert abs(math.fsum(a) - 1.0) <= 1e-12
        assert np.all(np.diff(a) < 0)

    @given(
        j=st.integers(1, 3000),
        s=st.floats(0.0, 2.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_property_normalised_nonincreasing(self, j, s):
        a = zipf_popularity(j, s)
        assert abs(math.fsum(a) - 1.0) <= 1e-12
        assert np.all(np.diff(a) <= 0)

    def test_domain(self):
        with pytest.raises(ValueError):
            zipf_popularity(0, 0.7)
        with pytest.raises(ValueError):
            zipf_popularity(10, -0.1)


class TestHitProbability:
    def test_full_cache(self):
        cfg = ContentConfig(library_size=500, cache_size=500)
        assert hit_probability(cfg) == pytest.approx(1.0, abs=1e-12)

    def test_constant_explicit_vector(self):
        j, cache = 40, 10
        q = np.full(j, cache / j)
        cfg = ContentConfig(
            library_size=j, cache_size=cache, placement="explicit", explicit_q=q
        )
        assert hit_probability(cfg) == pytest.approx(cache / j, rel=1e-12)

    def test_partial_sum_vs_reversed_oracle(self):
        cfg = ContentConfig(library_size=100_000, zipf_exponent=0.7, cache_size=3000)
        oracle = zipf_partial_sum_reversed(100_000, 0.7, 3000)
        assert hit_probability(cfg) == pytest.approx(oracle, abs=1e-12)

    def test_monotone_in_cache_size(self):
        values = [
            hit_probability(ContentConfig(library_size=1000, cache_size=cache))
            for cache in (0, 10, 100, 500, 1000)
        ]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert all(0.0 <= v <= 1.0 for v in values)


class TestMpcApprox:
    def test_full_cache(self):
        assert mpc_hit_approx(100, 100, 0.7) == 1.0

    def test_reference_point(self):
        # frozen: 0.03^(0.3), vs exact partial sum 0.33165 (gap ~5%)
        assert mpc_hit_approx(3000, 100_000, 0.7) == pytest.approx(
            0.34924996914343953, rel=1e-12
        )

    def test_linear_at_zero_exponent(self):
        assert mpc_hit_approx(25, 100, 0.0) == pytest.approx(0.25, rel=1e-15)

    def test_exponent_domain(self):
        with pytest.raises(ValueError):
            mpc_hit_approx(10, 100, 1.0)
        with pytest.raises(ValueError):
            mpc_hit_approx(0, 100, 0.5)


class TestCacheRealization:
    def test_most_popular_deterministic(self):
        cfg = ContentConfig(library_size=10, cache_size=3)
        rng = np.random.default_rng(0)
        assert sample_cache_realization(cfg, rng) == {1, 2, 3}

    def test_unit_marginals_forced(self):
        q = np.zeros(6)
        q[0] = q[1] = 1.0
        cfg = ContentConfig(library_size=6, cache_size=2, placement="explicit", explicit_q=q)
        rng = np.random.default_rng(1)
        for _ in range(50):
            assert sample_cache_realization(cfg, rng) == {1, 2}

    def test_empirical_marginals(self):
        q = np.full(4, 0.5)
        cfg = ContentConfig(library_size=4, cache_size=2, placement="explicit", explicit_q=q)
        rng = np.random.default_rng(2)
        draws = 100_000
        counts = np.zeros(4)
        for _ in range(draws):
            chosen = sample_cache_realization(cfg, rng)
            assert len(chosen) == 2  # integer total mass gives an exact count
            for j in chosen:
                counts[j - 1] += 1
        freq = counts / draws
        # three standard errors of a Bernoulli(0.5) mean at this many draws
        tol = 3.0 * math.sqrt(0.25 / draws)
        assert np.all(np.abs(freq - 0.5) <= max(tol, 0.01))

    def test_cache_size_cap(self):
        q = np.array([0.9, 0.8, 0.7, 0.3, 0.3])
        cfg = ContentConfig(library_size=5, cache_size=3, placement="explicit", explicit_q=q)
        rng = np.random.default_rng(3)
        total = float(np.sum(q))
        for _ in range(200):
            chosen = sample_cache_realization(cfg, rng)
            assert len(chosen) in (math.floor(total), math.ceil(total))
            assert len(chosen) <= 3

    def test_invalid_vectors_rejected(self):
        with pytest.raises(ValueError):
            ContentConfig(
                library_size=3,
                cache_size=1,
                placement="explicit",
                explicit_q=np.array([0.9, 0.9, 0.9]),
            )
        with pytest.raises(ValueError):
            ContentConfig(
                library_size=3,
                cache_size=2,
                placement="explicit",
                explicit_q=np.array([1.2, 0.0, 0.0]),
            )
        with pytest.raises(ValueError):
            ContentConfig(
                library_size=3,
                cache_size=2,
                placement="explicit",
                explicit_q=np.array([0.5, 0.5]),
            )

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ContentConfig(library_size=10, cache_size=11)
        with pytest.raises(ValueError):
            ContentConfig(placement="weird")
