"""Population summaries: achieved power, exaggeration and the quantile table."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, stats

from .errors import InvalidInputError
from .model import SnrPrior, abs_cdf, abs_quantile
from .sim import sample_snr

__all__ = [
    "CRIT",
    "DEFAULT_PROBS",
    "SummaryTable",
    "power",
    "power_inverse",
    "exaggeration_given_sig",
    "mean_power",
    "power_cdf_at",
    "summary_table",
    "sample_abs_snr",
    "power_sample",
]

CRIT = 1.96
NOMINAL_SIZE = 0.05
DEFAULT_PROBS = (0.10, 0.25, 0.50, 0.75, 0.90)


def power(snr, crit: float = CRIT):
    """Rejection probability of the two-sided Wald test at true SNR ``snr``.

    ``Phi(-crit - snr) + 1 - Phi(crit - snr)``; the upper tail is evaluated
    as ``Phi(snr - crit)`` to keep precision for large SNR.
    """
    x = np.asarray(snr, dtype=float)
    out = stats.norm.cdf(-crit - x) + stats.norm.cdf(x - crit)
    return float(out) if np.ndim(snr) == 0 else out


def power_inverse(pw: float, crit: float = CRIT) -> float:
    """The |SNR| at which the test has power ``pw``.

    At the default critical value the accepted range is the nominal (0.05, 1);
    the exact size 2 Phi(-1.96) = 0.049996 sits just below it. For other
    critical values the lower bound is the exact size.
    """
    size = power(0.0, crit)
    lower = max(size, NOMINAL_SIZE) if crit == CRIT else size
    if not (lower < pw < 1):
        raise InvalidInputError(f"power must lie in ({lower:.4g}, 1), got {pw!r}")
    hi = crit + 10.0
    while power(hi, crit) < pw:
        hi *= 2
    return optimize.brentq(lambda a: power(a, crit) - pw, 0.0, hi, xtol=1e-14,
                           rtol=4 * np.finfo(float).eps, maxiter=500)


def exaggeration_given_sig(abs_snr, crit: float = CRIT):
    """Expected |b|/|beta| given significance, as a function of |SNR|.

    With X ~ N(t, 1), ``E(|X|; |X| > c)`` is the sum of the upper-tail
    moment ``t Phi(t - c) + phi(c - t)`` and the lower-tail moment
    ``phi(c + t) - t Phi(-c - t)``; dividing by the power and by ``t`` gives
    the ratio.
    """
    t = np.asarray(abs_snr, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t <= 0):
        raise InvalidInputError("abs_snr must be finite and > 0")
    upper = t * stats.norm.cdf(t - crit) + stats.norm.pdf(crit - t)
    lower = stats.norm.pdf(crit + t) - t * stats.norm.cdf(-crit - t)
    out = (upper + lower) / (power(t, crit) * t)
    return float(out) if np.ndim(abs_snr) == 0 else out


def mean_power(p: SnrPrior, crit: float = CRIT) -> float:
    """Average achieved power over the prior (the assurance).

    Integrated numerically per component over +-12 sd; the mass beyond that
    range is below 1e-32 and is accounted for with the limiting power of 1.
    """
    total = 0.0
    for w, tau in zip(p.weights, p.taus):
        if tau == 0:
            total += w * power(0.0, crit)
            continue
        lim = 12.0 * tau
        val, _ = integrate.quad(
            lambda x: power(x, crit) * stats.norm.pdf(x, scale=tau), -lim, lim,
            epsabs=1e-10, epsrel=1e-10, limit=200, points=[-crit, 0.0, crit],
        )
        total += w * (val + 2.0 * stats.norm.sf(12.0))
    return float(total)


def power_cdf_at(p: SnrPrior, t: float, crit: float = CRIT) -> float:
    """Fraction of the population whose achieved power is at most ``t``."""
    return float(abs_cdf(p, power_inverse(t, crit)))


@dataclass(frozen=True)
class SummaryTable:
    """Quantiles of |SNR| with the power and exaggeration at each of them.

    The exaggeration row is the exaggeration function evaluated at the
    |SNR| quantiles, so it decreases from left to right.
    """

    probabilities: tuple
    snr_abs_quantiles: tuple
    power_at_quantiles: tuple
    exaggeration_at_quantiles: tuple
    mean_power: float
    frac_power_below_080: float

    def rows(self):
        """Header and rows for delimited output."""
        header = ["quantity"] + [f"Q{round(100 * q):02d}" for q in self.probabilities]
        return header, [
            ["abs_snr", *self.snr_abs_quantiles],
            ["power", *self.power_at_quantiles],
            ["exaggeration", *self.exaggeration_at_quantiles],
        ]


def summary_table(p: SnrPrior, ps=DEFAULT_PROBS, crit: float = CRIT) -> SummaryTable:
    ps = tuple(float(q) for q in ps)
    if not ps or any(not 0 < q < 1 for q in ps) or any(b <= a for a, b in zip(ps, ps[1:])):
        raise InvalidInputError("probabilities must be strictly increasing in (0, 1)")
    snr = tuple(abs_quantile(p, q) for q in ps)
    pw = tuple(power(a, crit) for a in snr)
    # zero |SNR| quantile (atom at 0): exaggeration diverges
    exag = tuple(exaggeration_given_sig(a, crit) if a > 0 else math.inf for a in snr)
    return SummaryTable(ps, snr, pw, exag, mean_power(p, crit), power_cdf_at(p, 0.80, crit))


def sample_abs_snr(p: SnrPrior, n: int, seed: int = 0) -> np.ndarray:
    """Draw ``n`` values of |SNR| from the prior."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    return np.abs(sample_snr(p, n, np.random.default_rng(seed)))


def power_sample(p: SnrPrior, n: int, seed: int = 0, crit: float = CRIT) -> np.ndarray:
    """Achieved power of ``n`` trials drawn from the prior."""
    return power(sample_abs_snr(p, n, seed), crit)
