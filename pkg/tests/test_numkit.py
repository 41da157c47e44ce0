"""Special functions and quadrature against independent oracles."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chi2, multivariate_normal

from condmtp.errors import AccuracyError, DomainError
from condmtp.numkit import (
    QuadratureSettings,
    _erfc_vec,
    bivariate_normal_quadrant,
    chi_square_sf,
    integrate_real_line,
    norm_cdf_vec,
    norm_ppf_vec,
    std_normal_cdf,
    std_normal_log_cdf,
    std_normal_pdf,
    std_normal_quantile,
)

mpmath.mp.dps = 50


def phi_oracle(x: float) -> float:
    """High-precision Phi via mpmath's erf series."""
    return float(mpmath.ncdf(x))


class TestNormalCdf:
    def test_symmetry_at_zero(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_upper_tail_limit(self):
        assert abs(std_normal_cdf(10.0) - 1.0) <= 1e-14

    def test_derived_quantile_point(self):
        # 1.959963985 is the p=0.975 point, cross-checked at 50 digits
        assert abs(phi_oracle(1.959963985) - 0.975) < 1e-9
        assert abs(std_normal_cdf(1.959963985) - 0.975) <= 1e-9

    @pytest.mark.parametrize("x", [math.inf, -math.inf, math.nan])
    def test_nonfinite_rejected(self, x):
        with pytest.raises(DomainError):
            std_normal_cdf(x)

    def test_absolute_accuracy_vs_mpmath(self):
        xs = np.concatenate([np.linspace(-8, 8, 161), [-37.4, -20, 20, 37.4]])
        for x in xs:
            assert abs(std_normal_cdf(float(x)) - phi_oracle(float(x))) <= 1e-14

    def test_monotone(self):
        xs = np.linspace(-12, 12, 2001)
        vals = [std_normal_cdf(float(x)) for x in xs]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_log_cdf_deep_tail(self):
        for x in (-5.0, -30.0, -37.0, -50.0, -200.0):
            ref = float(mpmath.log(mpmath.ncdf(x)))
            assert std_normal_log_cdf(x) == pytest.approx(ref, rel=1e-12)


class TestNormalQuantile:
    def test_median(self):
        assert std_normal_quantile(0.5) == 0.0

    def test_antisymmetry(self):
        p = 0.31
        assert std_normal_quantile(p) == pytest.approx(
            -std_normal_quantile(1.0 - p), abs=1e-14)

    def test_derived_by_bisection(self):
        # independent oracle: bisect Phi itself
        lo, hi = 0.0, 4.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if std_normal_cdf(mid) < 0.975:
                lo = mid
            else:
                hi = mid
        assert std_normal_quantile(0.975) == pytest.approx(lo, abs=1e-8)
        assert std_normal_quantile(0.975) == pytest.approx(1.959963985, abs=1e-8)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.1, math.nan])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            std_normal_quantile(p)

    def test_residual_tolerance(self):
        ps = np.concatenate([np.linspace(1e-6, 1 - 1e-6, 501),
                             [1e-12, 1e-9, 1 - 1e-9, 1e-300, 1 - 1e-16]])
        for p in ps:
            x = std_normal_quantile(float(p))
            assert abs(phi_oracle(x) - p) <= 1e-12

    def test_strictly_increasing(self):
        ps = np.linspace(1e-10, 1 - 1e-10, 999)
        xs = [std_normal_quantile(float(p)) for p in ps]
        assert all(b > a for a, b in zip(xs, xs[1:]))

    @given(st.floats(min_value=1e-8, max_value=1 - 1e-8))
    @settings(max_examples=80, deadline=None)
    def test_round_trip(self, p):
        x = std_normal_quantile(p)
        assert abs(std_normal_cdf(x) - p) <= 1e-9
        if abs(x) < 8:
            assert abs(std_normal_quantile(std_normal_cdf(x)) - x) <= 1e-9


class TestVectorVariants:
    def test_erfc_vec_vs_math(self):
        xs = np.concatenate([np.linspace(-26, 26, 1001), [-0.46875, 0.46875, 4.0]])
        got = _erfc_vec(xs)
        ref = np.array([math.erfc(x) for x in xs])
        ok = np.isclose(got, ref, rtol=8e-16, atol=5e-300)
        assert ok.all()

    def test_cdf_vec_matches_scalar(self):
        xs = np.linspace(-37, 37, 777)
        got = norm_cdf_vec(xs)
        ref = np.array([std_normal_cdf(float(x)) for x in xs])
        assert np.allclose(got, ref, rtol=0, atol=1e-14)

    def test_ppf_vec_matches_scalar(self):
        ps = np.linspace(1e-9, 1 - 1e-9, 555)
        got = norm_ppf_vec(ps)
        ref = np.array([std_normal_quantile(float(p)) for p in ps])
        assert np.allclose(got, ref, rtol=1e-13, atol=1e-13)

    def test_ppf_vec_domain(self):
        with pytest.raises(DomainError):
            norm_ppf_vec(np.array([0.5, 0.0]))


class TestQuadrature:
    def test_settings_validation(self):
        with pytest.raises(DomainError):
            QuadratureSettings(abs_tol=0.0)
        with pytest.raises(DomainError):
            QuadratureSettings(max_subdivisions=0)

    def test_normal_density_normalises(self):
        assert integrate_real_line(std_normal_pdf) == pytest.approx(1.0, abs=1e-10)

    def test_odd_integrand_vanishes(self):
        assert integrate_real_line(lambda x: x * std_normal_pdf(x)) == \
            pytest.approx(0.0, abs=1e-10)

    def test_constant_denominator(self):
        den = std_normal_cdf(std_normal_quantile(0.5))
        val = integrate_real_line(lambda x: std_normal_pdf(x) / den)
        assert val == pytest.approx(2.0, abs=1e-8)

    def test_split_points_help_with_kinks(self):
        val = integrate_real_line(lambda x: std_normal_pdf(x) * (x > 1.25),
                                  split_points=(1.25,))
        assert val == pytest.approx(1.0 - std_normal_cdf(1.25), abs=1e-9)

    def test_budget_exhaustion_carries_estimate(self):
        tight = QuadratureSettings(abs_tol=1e-15, rel_tol=1e-15,
                                   max_subdivisions=3)
        with pytest.raises(AccuracyError) as err:
            integrate_real_line(lambda x: std_normal_pdf(x) * math.cos(40 * x),
                                tight)
        assert math.isfinite(err.value.estimate)
        assert err.value.error_bound > 0


class TestBivariateNormal:
    def test_independent_centre(self):
        assert bivariate_normal_quadrant(0.0, 0.0, 0.0) == \
            pytest.approx(0.25, abs=1e-10)

    def test_marginalisation_is_exact(self):
        assert bivariate_normal_quadrant(0.7, math.inf, 0.4) == \
            std_normal_cdf(0.7)
        assert bivariate_normal_quadrant(math.inf, -0.3, -0.2) == \
            std_normal_cdf(-0.3)
        assert bivariate_normal_quadrant(-math.inf, 1.0, 0.5) == 0.0
        assert bivariate_normal_quadrant(math.inf, math.inf, 0.9) == 1.0

    def test_sheppard_orthant(self):
        # P(X<=0, Y<=0) = 1/4 + arcsin(rho) / (2 pi)
        for rho in (0.5, -0.5, 0.9, 0.25):
            ref = 0.25 + math.asin(rho) / (2.0 * math.pi)
            assert bivariate_normal_quadrant(0.0, 0.0, rho) == \
                pytest.approx(ref, abs=1e-8)

    def test_zero_correlation_factorises(self):
        pts = np.linspace(-2.5, 2.5, 6)
        for x in pts:
            for y in pts:
                ref = std_normal_cdf(float(x)) * std_normal_cdf(float(y))
                assert bivariate_normal_quadrant(float(x), float(y), 0.0) == \
                    pytest.approx(ref, abs=1e-10)

    def test_against_scipy(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            x, y = rng.uniform(-3, 3, 2)
            rho = rng.uniform(-0.95, 0.95)
            ref = multivariate_normal(
                mean=[0, 0], cov=[[1, rho], [rho, 1]]).cdf([x, y])
            assert bivariate_normal_quadrant(float(x), float(y), float(rho)) == \
                pytest.approx(float(ref), abs=2e-7)

    def test_rectangles_nonnegative(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            a, b = sorted(rng.uniform(-3, 3, 2))
            c, d = sorted(rng.uniform(-3, 3, 2))
            rho = rng.uniform(-0.9, 0.9)
            rect = (bivariate_normal_quadrant(b, d, rho)
                    - bivariate_normal_quadrant(a, d, rho)
                    - bivariate_normal_quadrant(b, c, rho)
                    + bivariate_normal_quadrant(a, c, rho))
            assert rect >= -1e-12

    @pytest.mark.parametrize("rho", [1.0, -1.0, 1.5])
    def test_rho_domain(self, rho):
        with pytest.raises(DomainError):
            bivariate_normal_quadrant(0.0, 0.0, rho)

    def test_nan_bound_rejected(self):
        with pytest.raises(DomainError):
            bivariate_normal_quadrant(math.nan, 0.0, 0.0)


class TestChiSquareSf:
    def test_zero_gives_full_mass(self):
        for k in (1, 2, 5, 40):
            assert chi_square_sf(0.0, k) == 1.0

    def test_df2_closed_form(self):
        assert chi_square_sf(5.991464, 2) == pytest.approx(0.05, abs=1e-7)

    def test_df0_point_mass(self):
        assert chi_square_sf(0.3, 0) == 0.0
        assert chi_square_sf(0.0, 0) == 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            chi_square_sf(-0.1, 2)
        with pytest.raises(DomainError):
            chi_square_sf(1.0, -1)
        with pytest.raises(DomainError):
            chi_square_sf(1.0, 2.5)

    def test_against_scipy(self):
        for df in (1, 2, 3, 4, 7, 10, 41, 100, 410):
            for x in (0.01, 0.5, 2.0, 9.3, 45.0, 180.0, 700.0):
                ref = float(chi2.sf(x, df))
                got = chi_square_sf(x, df)
                assert got == pytest.approx(ref, rel=1e-11, abs=1e-300)

    def test_monotone_in_x_and_df(self):
        xs = np.linspace(0.0, 30.0, 61)
        for df in (1, 2, 5, 10):
            vals = [chi_square_sf(float(x), df) for x in xs]
            assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))
        for x in (0.5, 3.0, 12.0):
            vals = [chi_square_sf(x, df) for df in range(1, 30)]
            assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_inverse_consistency_with_normal(self):
        # ChiSq_1 sf(x) = 2 (1 - Phi(sqrt(x)))
        for x in (0.3, 1.0, 4.0, 9.0):
            assert chi_square_sf(x, 1) == pytest.approx(
                2.0 * (1.0 - std_normal_cdf(math.sqrt(x))), rel=1e-12)
