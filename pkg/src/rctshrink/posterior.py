"""Inference for a single trial given the population SNR prior.

For a prior component N(0, tau^2) and z = SNR + N(0, 1) the conditional law
of the SNR is again normal, with mean ``z tau^2 / (tau^2 + 1)`` and variance
``tau^2 / (tau^2 + 1)``; the component weights are updated by the marginal
likelihood of z under N(0, tau^2 + 1).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special, stats

from .errors import InvalidInputError
from .model import PosteriorSnr, SnrPrior, abs_quantile, mixture_cdf, mixture_quantile

__all__ = [
    "posterior_snr",
    "posterior_mean",
    "posterior_cdf",
    "shrink_estimate",
    "credible_interval",
    "conditional_coverage",
    "ratio_quartiles_given_z",
]


def _check_z(z):
    z = float(z)
    if not math.isfinite(z):
        raise InvalidInputError("z must be finite")
    return z


def _check_s(s):
    s = float(s)
    if not (math.isfinite(s) and s > 0):
        raise InvalidInputError(f"standard error must be > 0, got {s!r}")
    return s


def posterior_snr(p: SnrPrior, z: float) -> PosteriorSnr:
    """Conditional distribution of the SNR given the z-value."""
    z = _check_z(z)
    w, _, tau = p.components()
    var_z = tau**2 + 1.0
    with np.errstate(divide="ignore"):
        logw = np.log(w) + stats.norm.logpdf(z, scale=np.sqrt(var_z))
    lam = np.exp(logw - special.logsumexp(logw))
    shrink = tau**2 / var_z
    return PosteriorSnr(lam / lam.sum(), z * shrink, np.sqrt(shrink))


def posterior_mean(p: SnrPrior, z: float) -> float:
    """E(SNR | z)."""
    post = posterior_snr(p, z)
    return float(np.dot(post.weights, post.means))


def posterior_cdf(p: SnrPrior, z, x):
    """P(SNR <= x | z), vectorized over broadcastable arrays ``z`` and ``x``.

    Evaluates the same conditional law as :func:`posterior_snr` without
    building one object per z, which matters for large simulation studies.
    """
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(z)):
        raise InvalidInputError("z must be finite")
    z, x = np.broadcast_arrays(z, x)
    w, _, tau = p.components()
    var_z = tau**2 + 1.0
    with np.errstate(divide="ignore"):
        logw = np.log(w)[:, None] + stats.norm.logpdf(z.ravel()[None, :],
                                                      scale=np.sqrt(var_z)[:, None])
    lam = np.exp(logw - special.logsumexp(logw, axis=0))
    shrink = (tau**2 / var_z)[:, None]
    mu = z.ravel()[None, :] * shrink
    sd = np.sqrt(shrink)
    xr = x.ravel()[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        comp = np.where(sd > 0, special.ndtr((xr - mu) / np.where(sd > 0, sd, 1.0)),
                        (xr >= 0).astype(float))
    out = (lam * comp).sum(axis=0).reshape(z.shape)
    return float(out) if out.ndim == 0 else out


def shrink_estimate(p: SnrPrior, b: float, s: float) -> float:
    """Shrunken effect estimate ``s * E(SNR | z = b/s)``."""
    s = _check_s(s)
    return s * posterior_mean(p, float(b) / s)


def credible_interval(p: SnrPrior, b: float, s: float, level: float = 0.95):
    """Equal-tailed posterior interval for the effect, on the scale of ``b``.

    The interval covers the true effect with probability ``level``
    conditionally on z = b/s under the prior.
    """
    s = _check_s(s)
    if not (0 < level < 1):
        raise InvalidInputError(f"level must lie in (0, 1), got {level!r}")
    post = posterior_snr(p, float(b) / s)
    alpha = (1.0 - level) / 2.0
    return s * mixture_quantile(post, alpha), s * mixture_quantile(post, 1.0 - alpha)


def conditional_coverage(p: SnrPrior, z: float, crit: float = 1.96) -> float:
    """P(z - crit < SNR < z + crit | z): coverage of the usual interval b +- crit*s."""
    z = _check_z(z)
    post = posterior_snr(p, z)
    return float(mixture_cdf(post, z + crit) - mixture_cdf(post, z - crit))


def ratio_quartiles_given_z(p: SnrPrior, z: float, estimator: str = "raw",
                            probs=(0.25, 0.5, 0.75)):
    """Quantiles of |estimate| / |SNR| given z.

    ``estimator="raw"`` uses |z| in the numerator (the exaggeration ratio
    |b|/|beta|); ``"shrunk"`` uses |E(SNR | z)|.  The ratio is a decreasing
    function of |SNR|, so its q-quantile is the numerator divided by the
    (1 - q)-quantile of |SNR| given z.  Posterior mass at SNR = 0 maps to an
    infinite ratio.
    """
    z = _check_z(z)
    if z == 0:
        raise InvalidInputError("ratio quantiles are undefined at z = 0")
    if estimator not in ("raw", "shrunk"):
        raise InvalidInputError(f"unknown estimator {estimator!r}")
    post = posterior_snr(p, z)
    num = abs(z) if estimator == "raw" else abs(float(np.dot(post.weights, post.means)))
    out = []
    for q in probs:
        a = abs_quantile(post, 1.0 - q)
        out.append(num / a if a > 0 else math.inf)
    return tuple(out)
