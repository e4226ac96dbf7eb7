"""Empirical-Bayes analysis of a collection of trial z-values.

Fit a zero-mean normal mixture to z = b/s, deconvolve it into a prior on the
signal-to-noise ratio, and derive achieved power, exaggeration, conditional
coverage and shrinkage estimates from that prior.
"""

__version__ = "0.1.0"

from .errors import (DegenerateFitError, EmptyInputError, InsufficientAcceptancesError,
                     InvalidInputError, RctShrinkError, SchemaMismatchError,
                     VersionUnsupportedError)
from .model import (PosteriorSnr, SnrPrior, TrialRecord, ZMixture, abs_cdf, abs_quantile,
                    mixture_cdf, mixture_pdf, mixture_quantile)
from .deconv import ClampWarning, convolve, deconvolve
from .em import EmConfig, FitDiagnostics, fit_em, select_components
from .posterior import (conditional_coverage, credible_interval, posterior_cdf,
                        posterior_mean, posterior_snr, ratio_quartiles_given_z,
                        shrink_estimate)
from .analytics import (SummaryTable, exaggeration_given_sig, mean_power, power,
                        power_cdf_at, power_inverse, power_sample, summary_table)
from .sim import (SDistSpec, mc_exaggeration_oracle, mc_posterior_oracle, sample_trials,
                  sample_z)

# Published 4-component fit of z-values from 23,747 Cochrane trials, with
# the SNR standard deviations as printed (rounded to two decimals).
COCHRANE_WEIGHTS = (0.32, 0.31, 0.30, 0.07)
COCHRANE_Z_SDS = (1.19, 1.71, 2.40, 5.65)
COCHRANE_SNR_SDS = (0.64, 1.38, 2.18, 5.56)


def cochrane_zmixture() -> ZMixture:
    """The published z-value mixture for the Cochrane collection."""
    return ZMixture(COCHRANE_WEIGHTS, COCHRANE_Z_SDS)


def cochrane_prior() -> SnrPrior:
    """The published SNR prior for the Cochrane collection.

    Uses the printed SNR standard deviations; ``deconvolve(cochrane_zmixture())``
    differs from them only by rounding (at most 0.007).
    """
    return SnrPrior(COCHRANE_WEIGHTS, COCHRANE_SNR_SDS)
