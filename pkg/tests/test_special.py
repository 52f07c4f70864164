import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetcache import ConvergenceError, Tolerance, array_gain_sq, exp_integral_ei, hyp2f1_access

from oracles import ei_series, hyp2f1_euler

ALPHA_GRID = (2.5, 3.0, 3.5, 4.0)
Z_GRID = (0.0, -1.0, -10.0, -1e3, -1e6)

# frozen from the Euler-integral quadrature oracle before the implementation
HYP_A3_ZM100 = 0.25553402730627137


class TestHyp2f1Access:
    def test_unit_at_zero(self):
        assert hyp2f1_access(3.0, 0.0) == 1.0

    def test_arctan_identity(self):
        # 2F1(1, 1/2; 3/2; -t^2) = arctan(t)/t at alpha = 4
        for t in (0.5, 1.0, 2.0, 7.0):
            expected = math.atan(t) / t
            assert hyp2f1_access(4.0, -t * t) == pytest.approx(expected, rel=1e-12)

    def test_frozen_oracle_value(self):
        assert hyp2f1_access(3.0, -100.0) == pytest.approx(HYP_A3_ZM100, rel=1e-10)

    @pytest.mark.parametrize("alpha", ALPHA_GRID)
    @pytest.mark.parametrize("z", Z_GRID)
    def test_agrees_with_euler_oracle(self, alpha, z):
        assert hyp2f1_access(alpha, z) == pytest.approx(hyp2f1_euler(alpha, z), rel=1e-8)

    @pytest.mark.parametrize("alpha", ALPHA_GRID)
    def test_range_and_monotone(self, alpha):
        zs = [0.0, -0.3, -1.0, -3.0, -10.0, -40.0, -200.0, -4e3, -1e5, -1e7]
        values = [hyp2f1_access(alpha, z) for z in zs]
        assert all(0.0 < v <= 1.0 for v in values)
        assert all(a > b for a, b in zip(values, values[1:]))

    @given(
        alpha=st.floats(2.1, 6.0),
        z=st.floats(-1e8, 0.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_property_in_unit_interval(self, alpha, z):
        assert 0.0 < hyp2f1_access(alpha, z) <= 1.0

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            hyp2f1_access(2.0, -1.0)
        with pytest.raises(ValueError):
            hyp2f1_access(1.5, -1.0)
        with pytest.raises(ValueError):
            hyp2f1_access(3.0, 0.5)

    def test_nonconvergence_raises(self):
        with pytest.raises(ConvergenceError):
            hyp2f1_access(3.0, -10.0, Tolerance(rel_tol=1e-12, max_terms=5))

    def test_tolerance_validation(self):
        with pytest.raises(ValueError):
            Tolerance(rel_tol=0.0)
        with pytest.raises(ValueError):
            Tolerance(max_terms=0)


class TestExpIntegral:
    def test_known_value(self):
        assert exp_integral_ei(-1.0) == pytest.approx(-0.21938393439552027, rel=1e-10)

    def test_operating_point(self):
        # x = -r_b^2 pi lam_M at r_b = 5 m, lam_M = 1e-5 m^-2
        x = -25.0 * math.pi * 1e-5
        assert exp_integral_ei(x) == pytest.approx(ei_series(x), rel=1e-10)

    def test_log_asymptote_near_zero(self):
        gamma_e = 0.5772156649015328606
        assert abs(exp_integral_ei(-1e-8) - (gamma_e + math.log(1e-8))) < 1e-7

    @pytest.mark.parametrize("x", [-5.0, -2.0, -0.3, -1e-3, 1e-3, 0.5, 2.0, 5.0])
    def test_series_oracle_agreement(self, x):
        assert exp_integral_ei(x) == pytest.approx(ei_series(x), rel=1e-10)

    @pytest.mark.parametrize("x", [-39.0, -25.0, -12.0, -5.5])
    def test_continued_fraction_branch(self, x):
        assert exp_integral_ei(x) == pytest.approx(float(mpmath.ei(x)), rel=1e-10)

    def test_positive_midrange(self):
        for x in (10.0, 25.0, 40.0):
            assert exp_integral_ei(x) == pytest.approx(float(mpmath.ei(x)), rel=1e-10)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            exp_integral_ei(0.0)
        with pytest.raises(ValueError):
            exp_integral_ei(41.0)
        with pytest.raises(ValueError):
            exp_integral_ei(-41.0)


class TestArrayGain:
    def test_zero_is_quarter_pi(self):
        assert array_gain_sq(0) == pytest.approx(math.pi / 4.0, rel=1e-12)

    def test_large_antenna_point(self):
        # N = 128, S_o = 10
        assert abs(array_gain_sq(118) / 118.5 - 1.0) < 0.003

    def test_monotone(self):
        values = [array_gain_sq(n) for n in range(0, 201)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_asymptote_ratio(self):
        # approaches n + 1/2 (from above: the exact Gamma ratio behaves
        # like n + 3/4), within 1% from n = 50 on
        for n in (50, 80, 118, 200, 1000):
            assert abs(array_gain_sq(n) / (n + 0.5) - 1.0) <= 0.01

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            array_gain_sq(-1)
