"""Move between the z-value mixture and the SNR prior.

Under unit-variance normal noise, z = SNR + noise, so each mixture component
gains (convolve) or loses (deconvolve) exactly one unit of variance.
"""

from __future__ import annotations

import warnings

import numpy as np

from .model import SnrPrior, ZMixture

__all__ = ["ClampWarning", "deconvolve", "convolve"]


class ClampWarning(UserWarning):
    """A z-component was no wider than the noise and got clamped."""

    def __init__(self, index, sigma, tau):
        self.index = index
        self.sigma = sigma
        self.tau = tau
        super().__init__(
            f"component {index}: sigma={sigma!r} <= sqrt(1 + floor); SNR sd clamped to {tau!r}"
        )


def deconvolve(m: ZMixture, floor: float = 0.0) -> SnrPrior:
    """SNR prior with ``tau_k = sqrt(max(sigma_k**2 - 1, floor))``.

    Every clamped component triggers a :class:`ClampWarning`.  With the
    default ``floor=0`` a clamped component becomes a point mass at zero.
    """
    if not floor >= 0:
        raise ValueError("floor must be >= 0")
    sig = np.array(m.sigmas)
    excess = sig**2 - 1.0
    clamped = (excess < floor) | (sig <= 1.0)
    tau = np.sqrt(np.where(clamped, floor, excess))
    for k in np.flatnonzero(clamped):
        warnings.warn(ClampWarning(int(k), float(sig[k]), float(tau[k])), stacklevel=2)
    return SnrPrior(m.weights, tau)


def convolve(p: SnrPrior) -> ZMixture:
    """z-value mixture with ``sigma_k = sqrt(tau_k**2 + 1)``."""
    tau = np.array(p.taus)
    return ZMixture(p.weights, np.sqrt(tau**2 + 1.0))
