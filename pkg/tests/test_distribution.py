import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from igkit import distribution as igd
from igkit.distribution import CanonicalForm, IgParams
from igkit.exceptions import DomainError
from igkit.inference import ks_statistic

UNIT = IgParams(1.0, 1.0)

# Frozen from a 40-digit mpmath evaluation of the density and its quadrature.
PDF_2_UNIT = 0.10984782236693059926
CDF_1_UNIT = 0.66810200122317060643
CDF_2_UNIT = 0.88547542598600642827
MEDIAN_2_3 = 1.5122506636053671019

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


class TestParams:
    @pytest.mark.parametrize("mu,lam", [(0, 1), (1, 0), (-1, 1), (1, -2), (math.inf, 1), (math.nan, 1)])
    def test_rejects_invalid(self, mu, lam):
        with pytest.raises(DomainError):
            IgParams(mu, lam)

    @pytest.mark.parametrize("mu,lam,expected", [(2, 4, (2, 2)), (1, 1, (1, 1)), (3, 27, (3, 1))])
    def test_moments(self, mu, lam, expected):
        p = IgParams(mu, lam)
        assert igd.moments(p) == pytest.approx(expected, rel=1e-15)
        assert (p.mean, p.variance) == pytest.approx(expected)


class TestPdf:
    def test_at_mean_is_gaussian_constant(self):
        assert igd.pdf(1.0, UNIT) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)
        assert round(igd.pdf(1.0, UNIT), 6) == 0.398942

    def test_extended_precision_value(self):
        assert igd.pdf(2.0, UNIT) == pytest.approx(PDF_2_UNIT, rel=1e-13)

    def test_normalizes_over_0_50(self):
        total, _ = integrate.quad(igd.pdf, 0, 50, args=(UNIT,), points=[1.0], epsabs=1e-13, limit=200)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_matches_cdf_central_difference(self):
        p = IgParams(2.0, 4.0)
        h = 1e-5
        fd = (igd.cdf(0.5 + h, p) - igd.cdf(0.5 - h, p)) / (2 * h)
        assert igd.pdf(0.5, p) == pytest.approx(fd, rel=1e-5)

    @pytest.mark.parametrize("x", [0.0, -1.0, math.nan])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            igd.pdf(x, UNIT)

    def test_array_in_array_out(self):
        out = igd.pdf(np.array([0.5, 1.0, 2.0]), UNIT)
        assert out.shape == (3,)
        assert isinstance(igd.pdf(1.0, UNIT), float)


class TestLogPdf:
    def test_unit_value(self):
        assert igd.log_pdf(1.0, UNIT) == pytest.approx(-0.918939, abs=1e-6)

    def test_finite_where_pdf_underflows(self):
        val = igd.log_pdf(1e6, UNIT)
        assert math.isfinite(val) and val < -1e5
        assert igd.pdf(1e6, UNIT) == 0.0

    @pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
    def test_exp_identity(self, x):
        assert math.exp(igd.log_pdf(x, UNIT)) == pytest.approx(igd.pdf(x, UNIT), rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            igd.log_pdf(0.0, UNIT)


class TestCdf:
    def test_quadrature_oracle_at_mean(self):
        assert igd.cdf(1.0, UNIT) == pytest.approx(CDF_1_UNIT, abs=1e-12)
        assert round(igd.cdf(1.0, UNIT), 6) == 0.668102

    def test_quadrature_oracle_at_two(self):
        quad, _ = integrate.quad(igd.pdf, 0, 2, args=(UNIT,), points=[1.0], epsabs=1e-13)
        assert igd.cdf(2.0, UNIT) == pytest.approx(quad, abs=1e-9)
        assert igd.cdf(2.0, UNIT) == pytest.approx(CDF_2_UNIT, abs=1e-12)

    def test_limits(self):
        assert igd.cdf(1e-300, UNIT) == 0.0
        assert igd.cdf(1e9, UNIT) == pytest.approx(1.0, abs=1e-12)

    def test_no_overflow_for_large_shape_ratio(self):
        # exp(2 lam / mu) alone overflows beyond lam/mu ~ 355.
        p = IgParams(1.0, 1e4)
        vals = igd.cdf(np.array([0.9, 1.0, 1.1]), p)
        assert np.all(np.isfinite(vals))
        assert vals[1] == pytest.approx(0.5, abs=0.01)
        assert np.all(np.diff(vals) > 0)

    def test_monotone(self):
        x = np.geomspace(1e-3, 1e3, 2000)
        assert np.all(np.diff(igd.cdf(x, IgParams(2.0, 0.7))) >= 0)

    def test_domain(self):
        with pytest.raises(DomainError):
            igd.cdf(-0.1, UNIT)

    @settings(max_examples=60, deadline=None)
    @given(mu=positive, lam=positive)
    def test_monotone_property(self, mu, lam):
        p = IgParams(mu, lam)
        x = mu * np.geomspace(1e-3, 1e3, 500)
        assert np.all(np.diff(igd.cdf(x, p)) >= 0)
        assert np.all(np.diff(igd.sf(x, p)) <= 0)

    def test_sf_complements_cdf(self):
        x = np.array([0.1, 0.9, 1.0, 1.1, 5.0])
        np.testing.assert_allclose(igd.sf(x, UNIT) + igd.cdf(x, UNIT), 1.0, atol=1e-15)

    def test_sf_keeps_relative_precision_in_tail(self):
        # 1 - cdf rounds to 0 here; the survival form does not.
        tail = igd.sf(200.0, UNIT)
        assert 0 < tail < 1e-40
        area, _ = integrate.quad(igd.pdf, 200.0, 400.0, args=(UNIT,), epsabs=0, epsrel=1e-10)
        assert tail == pytest.approx(area, rel=1e-6)


class TestQuantile:
    @pytest.mark.parametrize("x", [0.2, 1.0, 5.0])
    def test_round_trip(self, x):
        assert igd.quantile(igd.cdf(x, UNIT), UNIT) == pytest.approx(x, rel=1e-8)

    def test_inverse_of_cdf_example(self):
        assert igd.quantile(0.668102, UNIT) == pytest.approx(1.0, abs=1e-6)

    def test_median_bisection_oracle(self):
        p = IgParams(2.0, 3.0)
        m = igd.quantile(0.5, p)
        assert igd.cdf(m, p) == pytest.approx(0.5, abs=1e-10)
        assert m == pytest.approx(MEDIAN_2_3, rel=1e-10)

    @pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5])
    def test_domain(self, q):
        with pytest.raises(DomainError):
            igd.quantile(q, UNIT)

    def test_strictly_increasing(self):
        q = np.linspace(0.01, 0.99, 99)
        assert np.all(np.diff(igd.quantile(q, IgParams(1.5, 0.4))) > 0)

    @settings(max_examples=60, deadline=None)
    @given(mu=positive, lam=positive, q=st.floats(min_value=1e-4, max_value=1 - 1e-4))
    def test_cdf_of_quantile(self, mu, lam, q):
        p = IgParams(mu, lam)
        assert igd.cdf(igd.quantile(q, p), p) == pytest.approx(q, abs=1e-10)


class TestSample:
    def test_deterministic(self):
        p = IgParams(2.0, 3.0)
        np.testing.assert_array_equal(igd.sample(p, 1000, 7), igd.sample(p, 1000, 7))
        assert not np.array_equal(igd.sample(p, 1000, 7), igd.sample(p, 1000, 8))

    def test_positive_and_sized(self):
        x = igd.sample(IgParams(1.0, 0.01), 10_000, 1)
        assert x.shape == (10_000,)
        assert np.all(x > 0)
        assert igd.sample(UNIT, 0, 1).size == 0

    def test_rejects_negative_n(self):
        with pytest.raises(DomainError):
            igd.sample(UNIT, -1, 0)

    def test_moments_converge(self):
        x = igd.sample(IgParams(2.0, 3.0), 1_000_000, 2024)
        assert x.mean() == pytest.approx(2.0, rel=0.005)
        assert x.var() == pytest.approx(8.0 / 3.0, rel=0.02)

    def test_ecdf_close_to_cdf(self):
        x = igd.sample(UNIT, 100_000, 99)
        assert ks_statistic(x, lambda t: igd.cdf(t, UNIT)) < 0.01

    def test_broadcasting_rvs(self):
        mu = np.array([1.0, 10.0, 100.0])
        x = igd.rvs(mu, 5.0, size=(20000, 3), random_state=3)
        np.testing.assert_allclose(x.mean(axis=0), mu, rtol=0.1)


class TestCanonical:
    def test_reparameterization(self):
        c = igd.to_canonical(IgParams(1.0, 2.0))
        assert (c.eta1, c.eta2) == (-1.0, -1.0)

    def test_round_trip(self):
        p = IgParams(3.7, 0.9)
        back = igd.from_canonical(igd.to_canonical(p))
        assert back.mu == pytest.approx(p.mu, rel=1e-12)
        assert back.lam == pytest.approx(p.lam, rel=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(mu=positive, lam=positive)
    def test_round_trip_property(self, mu, lam):
        c = igd.to_canonical(IgParams(mu, lam))
        assert c.eta1 < 0 and c.eta2 < 0
        c2 = igd.to_canonical(igd.from_canonical(c))
        assert c2.eta1 == pytest.approx(c.eta1, rel=1e-12)
        assert c2.eta2 == pytest.approx(c.eta2, rel=1e-12)

    def test_rejects_nonnegative_eta(self):
        with pytest.raises(DomainError):
            CanonicalForm(0.0, -1.0)
        with pytest.raises(DomainError):
            CanonicalForm(-1.0, 0.5)

    def test_log_partition_gradient_gives_moments(self):
        c = igd.to_canonical(IgParams(2.0, 5.0))
        h = 1e-6
        d1 = (igd.log_partition(c.eta1 + h, c.eta2) - igd.log_partition(c.eta1 - h, c.eta2)) / (2 * h)
        d2 = (igd.log_partition(c.eta1, c.eta2 + h) - igd.log_partition(c.eta1, c.eta2 - h)) / (2 * h)
        assert d1 == pytest.approx(2.0, abs=1e-6)
        assert d2 == pytest.approx(0.7, abs=1e-6)
        assert c.mean_sufficient_statistics() == pytest.approx((2.0, 0.7), rel=1e-12)

    def test_inverse_moment_monte_carlo(self):
        x = igd.sample(IgParams(2.0, 5.0), 400_000, 5)
        inv = 1.0 / x
        se = inv.std() / math.sqrt(x.size)
        assert abs(inv.mean() - 0.7) < 4 * se

    def test_density_factorization(self):
        p = IgParams(1.3, 2.2)
        c = igd.to_canonical(p)
        x = np.array([0.3, 1.0, 4.0])
        log_h = -0.5 * np.log(2 * math.pi * x**3)
        recon = log_h + c.eta1 * x + c.eta2 / x - c.log_partition()
        np.testing.assert_allclose(recon, igd.log_pdf(x, p), rtol=1e-12)


class TestInvariants:
    @pytest.mark.parametrize("seed", range(20))
    def test_normalization(self, seed):
        r = np.random.default_rng(seed)
        p = IgParams(float(np.exp(r.uniform(-2, 2))), float(np.exp(r.uniform(-2, 3))))
        upper = igd.quantile(1 - 1e-10, p)
        mode_region = [p.mu * q for q in (0.1, 0.5, 1.0, 2.0)]
        pts = [t for t in mode_region if t < upper]
        total, _ = integrate.quad(igd.pdf, 0, upper, args=(p,), points=pts, epsabs=1e-13,
                                  epsrel=1e-12, limit=500)
        assert total == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("mu,lam", [(1.0, 1.0), (2.0, 0.3), (0.5, 20.0)])
    def test_cdf_pdf_consistency(self, mu, lam):
        p = IgParams(mu, lam)
        grid = np.geomspace(igd.quantile(0.01, p), igd.quantile(0.99, p), 40)
        h = grid * 1e-5
        fd = (igd.cdf(grid + h, p) - igd.cdf(grid - h, p)) / (2 * h)
        np.testing.assert_allclose(fd, igd.pdf(grid, p), rtol=1e-5)

    @pytest.mark.parametrize("q", [0.001, 0.01, 0.1, 0.5, 0.9, 0.99, 0.999])
    def test_quantile_cdf_pair(self, q):
        for p in (UNIT, IgParams(2.0, 3.0), IgParams(0.1, 50.0)):
            x = igd.quantile(q, p)
            assert igd.cdf(x, p) == pytest.approx(q, abs=1e-8)
            assert igd.quantile(igd.cdf(x, p), p) == pytest.approx(x, rel=1e-8)
