"""Fitting the z-value mixture to a simulated collection of trials.

Draw 23,747 trials from the published prior, fit zero-mean normal mixtures
with 1 to 6 components, pick the number of components by BIC and compare
the fitted distribution with the one that generated the data.
"""

import numpy as np

import rctshrink as rs
from rctshrink.model import mixture_cdf

prior = rs.cochrane_prior()
trials = rs.sample_trials(prior, rs.SDistSpec.parse("lognormal:-1,0.8"), 23747, seed=1)
zs = np.array([t.z for t in trials])

cfg = rs.EmConfig(restarts=5, seed=1)
fit, diag, k = rs.select_components(zs, range(1, 7), cfg)
print(f"BIC picks K = {k} (log-likelihood {diag.loglik:.1f}, {diag.n_iter} iterations)")
print("fitted z-mixture:", fit)
print("generating z-mixture:", rs.convolve(prior))

grid = np.linspace(-10, 10, 401)
gap = np.max(np.abs(mixture_cdf(fit, grid) - mixture_cdf(rs.convolve(prior), grid)))
print(f"largest CDF difference: {gap:.4f}")

# Individual components are only weakly identified; the summaries that
# matter downstream are stable.
fitted = rs.summary_table(rs.deconvolve(fit))
truth = rs.summary_table(prior)
print("median |SNR|   fitted %.3f   true %.3f" % (fitted.snr_abs_quantiles[2], truth.snr_abs_quantiles[2]))
print("mean power     fitted %.3f   true %.3f" % (fitted.mean_power, truth.mean_power))
