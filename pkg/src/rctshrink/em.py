"""Maximum-likelihood fit of a zero-mean normal mixture to z-values by EM."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateFitError, InvalidInputError
from .model import ZMixture

__all__ = ["EmConfig", "FitDiagnostics", "fit_em", "select_components", "bic"]

_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)
ABS_TOL = 1e-12


@dataclass(frozen=True)
class EmConfig:
    max_iter: int = 2000
    rel_tol: float = 1e-8
    restarts: int = 10
    seed: int = 0
    weight_floor: float = 1e-6
    sigma_floor: float = 1e-3
    accelerate: bool = True

    def __post_init__(self):
        if self.max_iter < 1 or self.restarts < 1:
            raise InvalidInputError("max_iter and restarts must be >= 1")
        if not (self.rel_tol > 0 and self.weight_floor > 0 and self.sigma_floor > 0):
            raise InvalidInputError("tolerances and floors must be > 0")
        if self.seed < 0:
            raise InvalidInputError("seed must be nonnegative")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class FitDiagnostics:
    """Outcome of the winning EM run.

    ``trace`` holds the log-likelihood after every iteration, starting with
    the initial parameters.
    """

    loglik: float
    n_iter: int
    converged: bool
    bic: float
    restart_index: int
    n_obs: int = 0
    n_components: int = 0
    trace: tuple = ()

    def to_dict(self, with_trace=False):
        d = asdict(self)
        if not with_trace:
            d.pop("trace")
        else:
            d["trace"] = list(self.trace)
        return d


def bic(loglik: float, k: int, n: int) -> float:
    """BIC with ``k - 1`` free weights and ``k`` scales."""
    return -2.0 * loglik + (2 * k - 1) * math.log(n)


def _check_data(zs):
    z = np.asarray(zs, dtype=float).ravel()
    if z.size == 0:
        raise InvalidInputError("no data")
    if not np.all(np.isfinite(z)):
        raise InvalidInputError("data contain non-finite values")
    if not np.any(z != 0):
        raise DegenerateFitError("all z-values are exactly 0")
    return z


def _estep(z2, w, sig):
    """Responsibilities (K x n) and the total log-likelihood."""
    expo = np.multiply.outer(-0.5 / sig**2, z2)
    dens = np.exp(expo)
    dens *= (w / sig)[:, None]
    tot = dens.sum(axis=0)
    if tot.min() > 1e-280:
        dens /= tot
        return dens, float(np.sum(np.log(tot))) - z2.size * _LOG_SQRT_2PI
    # far tails underflow: redo in log space
    expo += np.log(w / sig)[:, None]
    top = expo.max(axis=0)
    expo -= top
    np.exp(expo, out=expo)
    tot = expo.sum(axis=0)
    expo /= tot
    return expo, float(np.sum(top) + np.sum(np.log(tot))) - z2.size * _LOG_SQRT_2PI


def _initial_sigmas(z, k):
    rms = math.sqrt(float(np.mean(z**2)))
    lo = 0.5 * rms
    hi = max(2.0 * float(np.max(np.abs(z))) / 1.96, lo * 1.01)
    if k == 1:
        return np.array([math.sqrt(lo * hi)])
    return np.geomspace(lo, hi, k)


def _mstep(z2, resp, sig, cfg):
    nk = resp.sum(axis=1)
    w = np.maximum(nk / z2.size, cfg.weight_floor)
    w /= w.sum()
    with np.errstate(invalid="ignore", divide="ignore"):
        var = (resp @ z2) / nk
    var = np.where(nk > 0, var, sig**2)
    return w, np.maximum(np.sqrt(var), cfg.sigma_floor)


def _pack(w, sig):
    return np.concatenate([np.log(w), np.log(sig)])


def _unpack(theta, k, cfg):
    lw = theta[:k] - theta[:k].max()
    w = np.maximum(np.exp(lw) / np.exp(lw).sum(), cfg.weight_floor)
    return w / w.sum(), np.maximum(np.exp(theta[k:]), cfg.sigma_floor)


def _run(z2, w, sig, cfg):
    """One EM run from ``(w, sig)``.

    With ``cfg.accelerate`` each cycle takes two EM steps, extrapolates
    along them (SQUAREM, step length -|r|/|v| capped at -1) and keeps the
    extrapolated point only if its log-likelihood is no lower than the last
    EM iterate; otherwise it falls back to the plain EM step.  Either way the
    recorded log-likelihood never decreases.
    """
    k = w.size
    resp, ll = _estep(z2, w, sig)
    trace = [ll]
    it = 0

    def done(old, new):
        delta = abs(new - old)
        return delta < cfg.rel_tol * abs(new) or delta < ABS_TOL

    while it < cfg.max_iter:
        w1, sig1 = _mstep(z2, resp, sig, cfg)
        resp1, ll1 = _estep(z2, w1, sig1)
        it += 1
        trace.append(ll1)
        if done(ll, ll1):
            return w1, sig1, ll1, it, True, trace
        if not cfg.accelerate or it >= cfg.max_iter:
            w, sig, resp, ll = w1, sig1, resp1, ll1
            continue
        w2, sig2 = _mstep(z2, resp1, sig1, cfg)
        t0, t1, t2 = _pack(w, sig), _pack(w1, sig1), _pack(w2, sig2)
        r = t1 - t0
        v = t2 - t1 - r
        vv = float(v @ v)
        alpha = min(-math.sqrt(float(r @ r) / vv), -1.0) if vv > 0 else -1.0
        we, sige = _unpack(t0 - 2 * alpha * r + alpha**2 * v, k, cfg)
        resp_e, ll_e = _estep(z2, we, sige)
        it += 1
        if np.isfinite(ll_e) and ll_e >= ll1:
            w, sig, resp, ll = we, sige, resp_e, ll_e
        else:
            resp, ll = _estep(z2, w2, sig2)
            w, sig = w2, sig2
        trace.append(ll)
    return w, sig, ll, it, False, trace


def fit_em(zs, k: int, cfg: EmConfig | None = None):
    """Fit ``k`` zero-mean normal components to ``zs``.

    Restart 0 starts from a geometric ladder of scales between half the RMS
    of the data and ``2 max|z| / 1.96``; later restarts multiply that ladder
    by log-normal noise drawn from a stream seeded with ``(cfg.seed, r)``.
    Weights always start uniform.  The run with the highest final
    log-likelihood wins.

    Returns
    -------
    mixture : ZMixture
    diagnostics : FitDiagnostics
    """
    cfg = cfg or EmConfig()
    z = _check_data(zs)
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= z.size):
        raise InvalidInputError(f"number of components must be in [1, {z.size}], got {k!r}")
    k = int(k)
    # sorted squares: the fit depends on neither order nor sign of the data
    z2 = np.sort(z**2)
    base = _initial_sigmas(z, k)
    best = None
    for r in range(cfg.restarts):
        sig0 = base.copy()
        if r > 0:
            rng = np.random.default_rng([cfg.seed, r])
            sig0 = sig0 * np.exp(0.5 * rng.standard_normal(k))
        sig0 = np.maximum(sig0, cfg.sigma_floor)
        w, sig, ll, it, conv, trace = _run(z2, np.full(k, 1.0 / k), sig0, cfg)
        if best is None or ll > best[2]:
            best = (w, sig, ll, it, conv, trace, r)
    w, sig, ll, it, conv, trace, r = best
    diag = FitDiagnostics(
        loglik=ll, n_iter=it, converged=conv, bic=bic(ll, k, z.size), restart_index=r,
        n_obs=int(z.size), n_components=k, trace=tuple(trace),
    )
    return ZMixture(w, sig), diag


def select_components(zs, k_range=range(1, 7), cfg: EmConfig | None = None):
    """Fit every K in ``k_range`` and keep the lowest BIC (ties go to smaller K).

    Returns
    -------
    mixture, diagnostics, chosen_k
    """
    ks = sorted(int(k) for k in k_range)
    if not ks or ks[0] < 1 or ks[-1] > 8:
        raise InvalidInputError("component range must lie within 1..8")
    best = None
    for k in ks:
        mix, diag = fit_em(zs, k, cfg)
        if best is None or diag.bic < best[1].bic:
            best = (mix, diag, k)
    return best
