import math
import warnings

import numpy as np
import pytest
from scipy import stats

import rctshrink as rs
from rctshrink.sim import sample_z


def test_published_deconvolution(published_z):
    prior = rs.deconvolve(published_z)
    for got, want in zip(prior.taus, rs.COCHRANE_SNR_SDS):
        assert got == pytest.approx(want, abs=0.01)
    # 1.71 -> 1.3871..., printed as 1.38
    assert prior.taus[1] == pytest.approx(math.sqrt(1.71**2 - 1), rel=1e-15)


def test_published_convolution():
    z = rs.convolve(rs.cochrane_prior())
    for got, want in zip(z.sigmas, rs.COCHRANE_Z_SDS):
        assert got == pytest.approx(want, abs=0.01)


def test_pure_noise_component():
    assert rs.convolve(rs.SnrPrior([1.0], [0.0])).sigmas == (1.0,)
    assert rs.convolve(rs.SnrPrior([1.0], [1.0])).sigmas[0] == pytest.approx(math.sqrt(2), rel=1e-15)


def test_sigma_exactly_one_gives_point_mass():
    with pytest.warns(rs.ClampWarning):
        prior = rs.deconvolve(rs.ZMixture([1.0], [1.0]))
    assert prior.taus == (0.0,)
    with pytest.warns(rs.ClampWarning):
        prior = rs.deconvolve(rs.ZMixture([1.0], [1.0]), floor=0.04)
    assert prior.taus[0] == pytest.approx(0.2)


def test_clamp_warns_per_component():
    m = rs.ZMixture([0.3, 0.3, 0.4], [0.8, 0.95, 2.0])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        prior = rs.deconvolve(m)
    clamps = [w.message for w in caught if isinstance(w.message, rs.ClampWarning)]
    assert [c.index for c in clamps] == [0, 1]
    assert clamps[0].sigma == 0.8
    assert prior.taus[:2] == (0.0, 0.0)
    assert prior.taus[2] == pytest.approx(math.sqrt(3.0))


def test_no_warning_without_clamping(published_z):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rs.deconvolve(published_z)


def test_roundtrip(published_z):
    back = rs.convolve(rs.deconvolve(published_z))
    assert back.weights == published_z.weights
    np.testing.assert_allclose(back.sigmas, published_z.sigmas, rtol=0, atol=1e-12)


def test_weights_bit_exact(published_z):
    p = rs.deconvolve(published_z)
    assert p.weights == published_z.weights
    assert rs.convolve(p).weights == p.weights


def test_never_widens():
    rng = np.random.default_rng(3)
    for _ in range(50):
        k = int(rng.integers(1, 5))
        m = rs.ZMixture(rng.dirichlet(np.ones(k)), rng.uniform(0.5, 6, k))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", rs.ClampWarning)
            p = rs.deconvolve(m)
        assert all(t <= s for t, s in zip(p.taus, m.sigmas))


@pytest.mark.slow
def test_sampling_matches_convolution(published_prior):
    z = sample_z(published_prior, 1_000_000, seed=11)
    zm = rs.convolve(published_prior)
    res = stats.kstest(z, lambda x: rs.mixture_cdf(zm, x))
    crit = 1.628 / math.sqrt(z.size)  # asymptotic 1% critical value
    assert res.statistic < crit
