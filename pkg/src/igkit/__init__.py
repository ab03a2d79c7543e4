"""Inverse Gaussian modelling toolkit: distribution, likelihood inference,
IG-response GLM with diagnostics, and a first-passage-time simulator."""

__version__ = "0.1.0"

from .distribution import (
    CanonicalForm,
    IgParams,
    cdf,
    from_canonical,
    log_pdf,
    moments,
    pdf,
    quantile,
    sample,
    sf,
    to_canonical,
)
from .glm import GlmFit, GlmSpec, InverseGaussianRegressor, irls_fit
from .inference import (
    InverseGaussianEstimator,
    MleFit,
    bias_corrected_lambda,
    compare_distributions,
    fisher_information,
    fit_mle,
    ks_test,
)

__all__ = [
    "CanonicalForm",
    "GlmFit",
    "GlmSpec",
    "IgParams",
    "InverseGaussianEstimator",
    "InverseGaussianRegressor",
    "MleFit",
    "bias_corrected_lambda",
    "cdf",
    "compare_distributions",
    "fisher_information",
    "fit_mle",
    "from_canonical",
    "irls_fit",
    "ks_test",
    "log_pdf",
    "moments",
    "pdf",
    "quantile",
    "sample",
    "sf",
    "to_canonical",
]
