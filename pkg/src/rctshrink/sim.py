"""Seeded simulation of trial populations and brute-force Monte Carlo oracles.

All randomness goes through :func:`numpy.random.default_rng` (PCG64), so a
given seed reproduces the same draws on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientAcceptancesError, InvalidInputError
from .model import SnrPrior, TrialRecord

__all__ = [
    "SDistSpec",
    "sample_snr",
    "sample_z",
    "sample_trial_arrays",
    "sample_trials",
    "PosteriorOracle",
    "mc_posterior_oracle",
    "mc_exaggeration_oracle",
    "batch_estimate",
]

MIN_ACCEPTED = 1000
CHUNK = 1_000_000


@dataclass(frozen=True)
class SDistSpec:
    """Distribution of standard errors.

    ``kind`` is one of ``"lognormal"`` (params ``(meanlog, sdlog)``),
    ``"fixed"`` (params ``(s,)``) or ``"empirical"`` (params: the list of
    values to resample from).
    """

    kind: str
    params: tuple = field(default=())

    def __post_init__(self):
        params = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", params)
        if self.kind == "lognormal":
            if len(params) != 2 or not params[1] >= 0:
                raise InvalidInputError("lognormal needs (meanlog, sdlog >= 0)")
        elif self.kind == "fixed":
            if len(params) != 1:
                raise InvalidInputError("fixed needs exactly one value")
        elif self.kind == "empirical":
            if not params:
                raise InvalidInputError("empirical needs at least one value")
        else:
            raise InvalidInputError(f"unknown s-distribution kind {self.kind!r}")
        if not all(math.isfinite(v) for v in params):
            raise InvalidInputError("s-distribution parameters must be finite")
        if self.kind != "lognormal" and min(params) <= 0:
            raise InvalidInputError("standard errors must be > 0")

    @classmethod
    def parse(cls, text: str) -> "SDistSpec":
        """Parse ``"fixed:2"``, ``"lognormal:-1,0.5"`` or ``"empirical:0.1,0.2,0.4"``."""
        kind, _, rest = text.partition(":")
        try:
            params = [float(v) for v in rest.split(",") if v.strip()]
        except ValueError as exc:
            raise InvalidInputError(f"bad s-distribution {text!r}") from exc
        return cls(kind.strip(), tuple(params))

    def sample(self, rng, n):
        if self.kind == "fixed":
            return np.full(n, self.params[0])
        if self.kind == "lognormal":
            return rng.lognormal(self.params[0], self.params[1], size=n)
        return rng.choice(np.array(self.params), size=n)


def sample_snr(p: SnrPrior, n: int, rng) -> np.ndarray:
    comp = rng.choice(len(p.weights), size=n, p=np.array(p.weights))
    return rng.standard_normal(n) * np.array(p.taus)[comp]


def sample_z(p: SnrPrior, n: int, seed: int = 0) -> np.ndarray:
    """z = SNR + standard normal noise, ``n`` draws."""
    rng = np.random.default_rng(seed)
    return sample_snr(p, n, rng) + rng.standard_normal(n)


def sample_trial_arrays(p: SnrPrior, sspec: SDistSpec, n: int, seed: int = 0):
    """Arrays ``(b, s)`` from the generative model b ~ N(s * SNR, s^2)."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    rng = np.random.default_rng(seed)
    s = sspec.sample(rng, n)
    beta = s * sample_snr(p, n, rng)
    b = beta + s * rng.standard_normal(n)
    return b, s


def sample_trials(p: SnrPrior, sspec: SDistSpec, n: int, seed: int = 0):
    """Simulated trials as a list of :class:`TrialRecord`."""
    b, s = sample_trial_arrays(p, sspec, n, seed)
    width = len(str(n))
    return [TrialRecord(f"sim{i:0{width}d}", float(bi), float(si))
            for i, (bi, si) in enumerate(zip(b, s))]


def batch_estimate(x, stat, n_batches=20):
    """Statistic on the full sample plus a batch-means standard error."""
    x = np.asarray(x)
    full = float(stat(x))
    parts = np.array([stat(chunk) for chunk in np.array_split(x, n_batches)], dtype=float)
    return full, float(parts.std(ddof=1) / math.sqrt(n_batches))


@dataclass
class PosteriorOracle:
    """SNR draws whose z fell within ``band`` of ``z0``."""

    z0: float
    band: float
    snr: np.ndarray
    n_drawn: int

    @property
    def n_accepted(self):
        return self.snr.size

    @property
    def mean(self):
        return float(self.snr.mean())

    @property
    def mean_se(self):
        return float(self.snr.std(ddof=1) / math.sqrt(self.snr.size))

    def quantile(self, q):
        """Empirical quantile with a batch-means standard error."""
        return batch_estimate(self.snr, lambda x: np.quantile(x, q))

    def probability(self, lo, hi):
        """P(lo < SNR < hi) with its binomial standard error."""
        ph = float(np.mean((self.snr > lo) & (self.snr < hi)))
        return ph, math.sqrt(max(ph * (1 - ph), 1e-300) / self.snr.size)

    def cdf_at(self, x):
        """Empirical P(SNR <= x) with its binomial standard error.

        Comparing this with ``q`` at an analytic q-quantile checks the
        quantile without estimating a density.
        """
        ph = float(np.mean(self.snr <= x))
        return ph, math.sqrt(max(ph * (1 - ph), 1e-300) / self.snr.size)

    def ratio_quantile(self, numerator, q):
        """Quantile of ``numerator / |SNR|``."""
        with np.errstate(divide="ignore"):
            return batch_estimate(numerator / np.abs(self.snr), lambda x: np.quantile(x, q))


def mc_posterior_oracle(p: SnrPrior, z0: float, n: int = 10_000_000, seed: int = 0,
                        band: float = 0.01) -> PosteriorOracle:
    """Rejection sampler for SNR | z close to ``z0``."""
    if n < 100_000:
        raise InvalidInputError("the oracle needs n >= 1e5 draws")
    rng = np.random.default_rng(seed)
    kept = []
    left = n
    while left > 0:
        m = min(CHUNK, left)
        snr = sample_snr(p, m, rng)
        z = snr + rng.standard_normal(m)
        kept.append(snr[np.abs(z - z0) <= band])
        left -= m
    snr = np.concatenate(kept)
    if snr.size < MIN_ACCEPTED:
        raise InsufficientAcceptancesError(
            f"only {snr.size} of {n} draws within {band} of z = {z0}")
    return PosteriorOracle(float(z0), float(band), snr, n)


def mc_exaggeration_oracle(abs_snr: float, crit: float = 1.96, n: int = 10_000_000,
                           seed: int = 0):
    """Monte Carlo E(|X| / t | |X| > crit) for X ~ N(t, 1); returns (estimate, se)."""
    if not abs_snr > 0:
        raise InvalidInputError("abs_snr must be > 0")
    if n < 100_000:
        raise InvalidInputError("the oracle needs n >= 1e5 draws")
    rng = np.random.default_rng(seed)
    total = total2 = 0.0
    count = 0
    left = n
    while left > 0:
        m = min(CHUNK, left)
        x = np.abs(abs_snr + rng.standard_normal(m))
        r = x[x > crit] / abs_snr
        total += float(r.sum())
        total2 += float((r**2).sum())
        count += r.size
        left -= m
    if count < MIN_ACCEPTED:
        raise InsufficientAcceptancesError(f"only {count} significant draws of {n}")
    mean = total / count
    var = (total2 / count - mean**2) * count / (count - 1)
    return mean, math.sqrt(var / count)
