import math

import numpy as np
import pytest
from scipy import stats

import rctshrink as rs
from rctshrink.analytics import sample_abs_snr
from rctshrink.model import abs_cdf
from rctshrink.sim import mc_exaggeration_oracle

PUBLISHED_SNR = (0.14, 0.37, 0.84, 1.72, 3.01)
PUBLISHED_POWER = (0.05, 0.07, 0.13, 0.41, 0.85)
PUBLISHED_EXAG = (16.01, 6.31, 2.90, 1.55, 1.09)


def brute_power(snr):
    # direct transcription of the two-tail rejection probability
    return stats.norm.cdf(-1.96 - snr) + 1 - stats.norm.cdf(1.96 - snr)


class TestPower:
    def test_size(self):
        assert rs.power(0.0) == pytest.approx(0.05, abs=1e-4)

    def test_published_median(self):
        assert rs.power(0.84) == pytest.approx(0.13, abs=0.005)

    def test_design_identity(self):
        assert rs.power(1.96 + 0.8416) == pytest.approx(0.80, abs=1e-3)

    def test_matches_formula(self):
        x = np.linspace(-6, 6, 121)
        np.testing.assert_allclose(rs.power(x), brute_power(x), atol=1e-15)

    def test_even_and_increasing(self):
        x = np.linspace(0, 8, 161)
        np.testing.assert_array_equal(rs.power(x), rs.power(-x))
        assert np.all(np.diff(rs.power(x)) > 0)

    def test_crit_parameter(self):
        assert rs.power(0.0, crit=2.5758) == pytest.approx(0.01, abs=1e-4)


class TestPowerInverse:
    def test_eighty(self):
        assert rs.power_inverse(0.80) == pytest.approx(2.8016, abs=1e-4)

    def test_boundary(self):
        assert rs.power_inverse(0.05 + 1e-9) < 0.01

    def test_published_median(self):
        assert rs.power_inverse(0.13) == pytest.approx(0.84, abs=0.02)

    def test_roundtrip(self):
        # beyond |snr| ~ 7 power is within 1e-12 of 1 and one ulp of pw moves the
        # root by more than 1e-8, so the grid stops at 6
        for a in np.arange(1, 121) * 0.05:
            assert rs.power_inverse(rs.power(a)) == pytest.approx(a, abs=1e-8)
            assert abs(rs.power(rs.power_inverse(rs.power(a))) - rs.power(a)) <= 1e-10

    @pytest.mark.parametrize("pw", [0.05, 0.01, 1.0, 1.2])
    def test_out_of_range(self, pw):
        with pytest.raises(rs.InvalidInputError):
            rs.power_inverse(pw)


class TestExaggeration:
    def test_at_median_snr(self):
        assert rs.exaggeration_given_sig(0.84) == pytest.approx(2.90, abs=0.05)

    def test_at_tenth_percentile_snr(self):
        # the tabulated 16.01 belongs to the unrounded quantile (about 0.1465);
        # at exactly 0.14 the moment formula gives 16.74, confirmed by quadrature
        assert rs.exaggeration_given_sig(0.14) == pytest.approx(16.01, abs=0.3)

    def test_limit(self):
        assert rs.exaggeration_given_sig(10.0) == pytest.approx(1.0, abs=1e-3)

    def test_decreasing(self):
        grid = np.arange(1, 121) * 0.05
        assert np.all(np.diff(rs.exaggeration_given_sig(grid)) < 0)
        assert np.all(rs.exaggeration_given_sig(grid) > 1)

    def test_matches_quadrature(self):
        from scipy import integrate
        for t in [0.2, 1.0, 3.0]:
            f = lambda x: abs(x) * stats.norm.pdf(x - t)
            num = integrate.quad(f, 1.96, np.inf)[0] + integrate.quad(f, -np.inf, -1.96)[0]
            want = num / brute_power(t) / t
            assert rs.exaggeration_given_sig(t) == pytest.approx(want, rel=1e-9)

    @pytest.mark.parametrize("t", [0.0, -1.0, math.inf])
    def test_rejects(self, t):
        with pytest.raises(rs.InvalidInputError):
            rs.exaggeration_given_sig(t)

    @pytest.mark.slow
    @pytest.mark.parametrize("t", [0.2, 1.0, 3.0])
    def test_monte_carlo(self, t):
        est, se = mc_exaggeration_oracle(t, n=10_000_000, seed=int(t * 10))
        assert abs(rs.exaggeration_given_sig(t) - est) <= 3 * se


class TestMeanPower:
    def test_published(self, published_prior):
        assert rs.mean_power(published_prior) == pytest.approx(0.28, abs=0.005)

    def test_point_mass(self):
        assert rs.mean_power(rs.SnrPrior([1.0], [0.0])) == pytest.approx(0.05, abs=1e-4)

    def test_closed_form(self, published_prior):
        # E Phi(SNR - c) = Phi(-c / sqrt(1 + tau^2)) for SNR ~ N(0, tau^2)
        want = sum(w * 2 * stats.norm.cdf(-1.96 / math.sqrt(1 + t * t))
                   for w, t in zip(published_prior.weights, published_prior.taus))
        assert rs.mean_power(published_prior) == pytest.approx(want, abs=1e-6)

    def test_monte_carlo_unit(self, unit_prior):
        draws = rs.power_sample(unit_prior, 1_000_000, seed=8)
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(rs.mean_power(unit_prior) - draws.mean()) <= 3 * se

    def test_heavy_and_narrow(self):
        p = rs.SnrPrior([0.5, 0.5], [1e-3, 40.0])
        want = 0.5 * 2 * stats.norm.cdf(-1.96 / math.sqrt(1 + 1e-6)) + \
            0.5 * 2 * stats.norm.cdf(-1.96 / math.sqrt(1 + 1600))
        assert rs.mean_power(p) == pytest.approx(want, abs=1e-6)


class TestPowerCdf:
    def test_published(self, published_prior):
        assert rs.power_cdf_at(published_prior, 0.80) == pytest.approx(0.88, abs=0.01)
        assert rs.power_cdf_at(published_prior, 0.13) == pytest.approx(0.50, abs=0.01)

    def test_near_one(self, unit_prior):
        assert rs.power_cdf_at(unit_prior, 1 - 1e-15) == pytest.approx(1.0, abs=1e-12)

    def test_heavy_tail_approaches_one(self, published_prior):
        # the wide component keeps visible mass beyond |snr| = 9, so the limit is slow
        ts = [0.9, 0.99, 0.999999, 1 - 1e-15]
        vals = [rs.power_cdf_at(published_prior, t) for t in ts]
        assert np.all(np.diff(vals) > 0)
        assert vals[-1] == pytest.approx(abs_cdf(published_prior, rs.power_inverse(ts[-1])), abs=1e-15)
        assert 0.99 < vals[-1] < 1

    def test_rejects(self, published_prior):
        with pytest.raises(rs.InvalidInputError):
            rs.power_cdf_at(published_prior, 0.04)

    def test_against_sample(self, published_prior):
        draws = rs.power_sample(published_prior, 1_000_000, seed=3)
        assert np.mean(draws <= 0.8) == pytest.approx(rs.power_cdf_at(published_prior, 0.8), abs=0.002)


class TestSummaryTable:
    def test_published_rows(self, published_prior):
        t = rs.summary_table(published_prior)
        np.testing.assert_allclose(t.snr_abs_quantiles, PUBLISHED_SNR, atol=0.02)
        np.testing.assert_allclose(t.power_at_quantiles, PUBLISHED_POWER, atol=0.01)
        np.testing.assert_allclose(t.exaggeration_at_quantiles, PUBLISHED_EXAG, rtol=0.02)
        assert t.mean_power == pytest.approx(0.28, abs=0.005)
        assert t.frac_power_below_080 == pytest.approx(0.88, abs=0.01)

    def test_monotone_rows(self, published_prior):
        t = rs.summary_table(published_prior, np.linspace(0.05, 0.95, 19))
        assert np.all(np.diff(t.power_at_quantiles) >= 0)
        assert np.all(np.diff(t.exaggeration_at_quantiles) <= 0)

    def test_point_mass(self):
        t = rs.summary_table(rs.SnrPrior([1.0], [0.0]))
        np.testing.assert_allclose(t.power_at_quantiles, rs.power(0.0))
        assert all(math.isinf(e) for e in t.exaggeration_at_quantiles)

    @pytest.mark.parametrize("ps", [(), (0.5, 0.25), (0.0, 0.5), (0.5, 1.0)])
    def test_bad_probs(self, published_prior, ps):
        with pytest.raises(rs.InvalidInputError):
            rs.summary_table(published_prior, ps)

    def test_power_sample_quantiles(self, published_prior):
        t = rs.summary_table(published_prior)
        draws = rs.power_sample(published_prior, 1_000_000, seed=1)
        np.testing.assert_allclose(np.quantile(draws, t.probabilities), t.power_at_quantiles,
                                   atol=0.01)

    def test_power_sample_deterministic(self, published_prior):
        a = rs.power_sample(published_prior, 1000, seed=5)
        b = rs.power_sample(published_prior, 1000, seed=5)
        np.testing.assert_array_equal(a, b)
        assert np.all(sample_abs_snr(published_prior, 1000, seed=5) >= 0)


def test_mean_power_between_bounds():
    rng = np.random.default_rng(0)
    for _ in range(20):
        k = int(rng.integers(1, 4))
        p = rs.SnrPrior(rng.dirichlet(np.ones(k)), rng.uniform(0.01, 10, k))
        assert 0.05 < rs.mean_power(p) < 1
