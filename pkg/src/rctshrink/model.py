"""Domain types: trials, zero-mean normal mixtures and the posterior of the SNR.

All mixture types share the same evaluation routines (:func:`mixture_pdf`,
:func:`mixture_cdf`, :func:`mixture_quantile`, :func:`abs_cdf`,
:func:`abs_quantile`).  Components with zero standard deviation are point
masses: they add a jump to the CDF and nothing to the density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .errors import InvalidInputError

__all__ = [
    "TrialRecord",
    "ZMixture",
    "SnrPrior",
    "PosteriorSnr",
    "mixture_pdf",
    "mixture_cdf",
    "mixture_quantile",
    "abs_cdf",
    "abs_quantile",
]

# sum(w) within this of 1 is accepted as is; within RENORM_TOL it is rescaled
WEIGHT_TOL = 1e-12
RENORM_TOL = 1e-9
BRACKET_SDS = 12.0
_SQRT_2PI = math.sqrt(2 * math.pi)


@dataclass(frozen=True)
class TrialRecord:
    """One trial: effect estimate ``b`` with standard error ``s``."""

    id: str
    b: float
    s: float

    def __post_init__(self):
        if not (math.isfinite(self.b) and math.isfinite(self.s)):
            raise InvalidInputError(f"trial {self.id!r}: non-finite b or s")
        if self.s <= 0:
            raise InvalidInputError(f"trial {self.id!r}: s must be > 0, got {self.s}")

    @property
    def z(self) -> float:
        return self.b / self.s


def _as_float_tuple(values, name):
    try:
        arr = np.asarray(values, dtype=float).ravel()
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name} must be numeric") from exc
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} must be finite")
    return arr


def _check_weights(weights):
    w = _as_float_tuple(weights, "weights")
    if w.size == 0:
        raise InvalidInputError("a mixture needs at least one component")
    if np.any(w < 0):
        raise InvalidInputError("weights must be nonnegative")
    total = math.fsum(w)
    if abs(total - 1.0) > RENORM_TOL:
        raise InvalidInputError(f"weights sum to {total!r}, not 1")
    if abs(total - 1.0) > WEIGHT_TOL:
        w = w / total
    return w


def _canonical(weights, sds):
    # ascending sd, ties by weight: stable ordering for serialized models
    order = np.lexsort((weights, sds))
    return tuple(float(v) for v in weights[order]), tuple(float(v) for v in sds[order])


class _Mixture:
    """Shared evaluation interface; subclasses provide ``components``."""

    def components(self):
        """Return ``(weights, means, sds)`` as float arrays."""
        raise NotImplementedError

    @property
    def n_components(self) -> int:
        return len(self.weights)

    def pdf(self, x):
        return mixture_pdf(self, x)

    def cdf(self, x):
        return mixture_cdf(self, x)

    def quantile(self, p):
        return mixture_quantile(self, p)


@dataclass(frozen=True, eq=True)
class ZMixture(_Mixture):
    """Zero-mean normal mixture for the z-value.

    Components are stored sorted by ascending standard deviation.
    """

    weights: tuple
    sigmas: tuple

    def __post_init__(self):
        w = _check_weights(self.weights)
        sig = _as_float_tuple(self.sigmas, "sigmas")
        if sig.size != w.size:
            raise InvalidInputError("weights and sigmas differ in length")
        if np.any(sig <= 0):
            raise InvalidInputError("sigmas must be > 0")
        w, sig = _canonical(w, sig)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "sigmas", sig)

    def components(self):
        w = np.array(self.weights)
        return w, np.zeros_like(w), np.array(self.sigmas)


@dataclass(frozen=True, eq=True)
class SnrPrior(_Mixture):
    """Zero-mean normal mixture for the signal-to-noise ratio.

    A component with ``tau == 0`` is a point mass at zero.
    """

    weights: tuple
    taus: tuple

    def __post_init__(self):
        w = _check_weights(self.weights)
        tau = _as_float_tuple(self.taus, "taus")
        if tau.size != w.size:
            raise InvalidInputError("weights and taus differ in length")
        if np.any(tau < 0):
            raise InvalidInputError("taus must be >= 0")
        w, tau = _canonical(w, tau)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "taus", tau)

    def components(self):
        w = np.array(self.weights)
        return w, np.zeros_like(w), np.array(self.taus)


@dataclass(frozen=True, eq=True)
class PosteriorSnr(_Mixture):
    """Normal mixture for the SNR given an observed z-value.

    Component order follows the prior it was derived from.
    """

    weights: tuple
    means: tuple
    sds: tuple

    def __post_init__(self):
        w = _check_weights(self.weights)
        mu = _as_float_tuple(self.means, "means")
        sd = _as_float_tuple(self.sds, "sds")
        if not (w.size == mu.size == sd.size):
            raise InvalidInputError("weights, means and sds differ in length")
        if np.any(sd < 0):
            raise InvalidInputError("sds must be >= 0")
        object.__setattr__(self, "weights", tuple(float(v) for v in w))
        object.__setattr__(self, "means", tuple(float(v) for v in mu))
        object.__setattr__(self, "sds", tuple(float(v) for v in sd))

    def components(self):
        return np.array(self.weights), np.array(self.means), np.array(self.sds)


def _scalar_or_array(out, x):
    return float(out) if np.ndim(x) == 0 else out


def mixture_pdf(m, x):
    """Density of a mixture at ``x`` (scalar or array).

    Point-mass components are left out of the density.
    """
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise InvalidInputError("x must be finite")
    w, mu, sd = m.components()
    cont = sd > 0
    if not np.any(cont):
        return _scalar_or_array(np.zeros_like(xa), x)
    u = (xa[..., None] - mu[cont]) / sd[cont]
    dens = np.exp(-0.5 * u * u) / (sd[cont] * _SQRT_2PI)
    return _scalar_or_array(dens @ w[cont], x)


def _cdf(m, x, strict=False):
    xa = np.asarray(x, dtype=float)
    if np.any(np.isnan(xa)):
        raise InvalidInputError("x must not be NaN")
    w, mu, sd = m.components()
    xe = xa[..., None]
    cont = sd > 0
    out = np.zeros(xa.shape)
    if np.any(cont):
        out = out + special.ndtr((xe - mu[cont]) / sd[cont]) @ w[cont]
    if not np.all(cont):
        hit = (xe > mu[~cont]) if strict else (xe >= mu[~cont])
        out = out + hit.astype(float) @ w[~cont]
    return np.clip(out, 0.0, 1.0)


def mixture_cdf(m, x):
    """P(X <= x) for a mixture; accepts +-inf."""
    return _scalar_or_array(_cdf(m, x), x)


def _check_prob(p):
    if not (isinstance(p, (int, float, np.floating, np.integer)) and 0 < p < 1):
        raise InvalidInputError(f"probability must lie in (0, 1), got {p!r}")
    return float(p)


def _spread(sd):
    top = float(np.max(sd))
    return top if top > 0 else 1.0


def mixture_quantile(m, p):
    """Smallest x with ``mixture_cdf(m, x) >= p``, found by Brent's method.

    The bracket starts at twelve times the widest component sd on either
    side of the component means and is widened if ``p`` is extreme.
    """
    p = _check_prob(p)
    _, mu, sd = m.components()
    step = BRACKET_SDS * _spread(sd)
    lo, hi = float(np.min(mu)) - step, float(np.max(mu)) + step
    while _cdf(m, lo) > p:
        lo -= step
    while _cdf(m, hi) < p:
        hi += step
    return optimize.brentq(
        lambda x: float(_cdf(m, x)) - p, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps,
        maxiter=500,
    )


def abs_cdf(m, x):
    """P(|X| <= x) for ``x >= 0``."""
    xa = np.asarray(x, dtype=float)
    if np.any(np.isnan(xa)) or np.any(xa < 0):
        raise InvalidInputError("abs_cdf needs x >= 0")
    out = _cdf(m, xa) - _cdf(m, -xa, strict=True)
    return _scalar_or_array(np.clip(out, 0.0, 1.0), x)


def abs_quantile(m, p):
    """Quantile of |X|; returns 0 when the atom at zero already carries ``p``."""
    p = _check_prob(p)
    _, mu, sd = m.components()
    if abs_cdf(m, 0.0) >= p:
        return 0.0
    step = BRACKET_SDS * _spread(sd)
    hi = float(np.max(np.abs(mu))) + step
    while abs_cdf(m, hi) < p:
        hi += step
    return optimize.brentq(
        lambda a: float(abs_cdf(m, a)) - p, 0.0, hi, xtol=1e-14,
        rtol=4 * np.finfo(float).eps, maxiter=500,
    )
