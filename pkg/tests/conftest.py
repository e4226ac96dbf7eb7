import math

import numpy as np
import pytest
from scipy import integrate

import rctshrink as rs


@pytest.fixture
def published_z():
    return rs.cochrane_zmixture()


@pytest.fixture
def published_prior():
    return rs.cochrane_prior()


@pytest.fixture
def unit_prior():
    return rs.SnrPrior([1.0], [1.0])


# Reference implementations that share no code with the package.

def ref_norm_pdf(x, mu=0.0, sd=1.0):
    u = (x - mu) / sd
    return math.exp(-0.5 * u * u) / (sd * math.sqrt(2 * math.pi))


def ref_norm_cdf(x, mu=0.0, sd=1.0):
    return 0.5 * (1.0 + math.erf((x - mu) / (sd * math.sqrt(2.0))))


def ref_prior_pdf(weights, taus, x):
    return sum(w * ref_norm_pdf(x, 0.0, t) for w, t in zip(weights, taus))


def quad_posterior(weights, taus, z, fn):
    """E(fn(SNR) | z) by integrating prior density x likelihood directly."""
    lim = 12.0 * max(taus) + abs(z)

    def dens(x):
        return ref_prior_pdf(weights, taus, x) * ref_norm_pdf(z, x, 1.0)

    pts = sorted({0.0, z, z / 2})
    norm = integrate.quad(dens, -lim, lim, points=pts, limit=400, epsabs=1e-13)[0]
    num = integrate.quad(lambda x: fn(x) * dens(x), -lim, lim, points=pts, limit=400,
                         epsabs=1e-13)[0]
    return num / norm


def quad_posterior_cdf(weights, taus, z, a):
    lim = 12.0 * max(taus) + abs(z)

    def dens(x):
        return ref_prior_pdf(weights, taus, x) * ref_norm_pdf(z, x, 1.0)

    norm = integrate.quad(dens, -lim, lim, points=sorted({0.0, z}), limit=400,
                          epsabs=1e-13)[0]
    if a <= -lim:
        return 0.0
    part = integrate.quad(dens, -lim, min(a, lim), limit=400, epsabs=1e-13)[0]
    return part / norm


def random_prior(rng, k=None):
    k = k or int(rng.integers(1, 5))
    w = rng.dirichlet(np.ones(k))
    taus = rng.uniform(0.2, 4.0, size=k)
    return rs.SnrPrior(w, taus)
