"""Optimal causal linear filters for stationary processes and their finite-past approximations."""

from .errors import (CausalWienerError, ConstraintViolated, DegenerateFit, DivergentNorm,
                     IncompatibleFilter, InvalidBand, InvalidRoots, LengthMismatch,
                     NotPositiveDefinite, SeriesNotConverging, TruncationInsufficient)
from .experiments import (ExperimentConfig, RateReport, baxter_grid_check, parse_grid, rate_fit,
                          run_experiment)
from .filters import (FilterSpec, bandpass_filter, explicit_filter, hhat_finite, hhat_infinite,
                      identity_filter, polydecay_filter, shift_filter)
from .lm_expansion import LmConstants, estimate_constants, f_coeffs, finite_predictor_series
from .mspe import mspe_bounds, sigma, sigma_tilde
from .predictor import (PredictorCoeffs, finite_predictor_coeffs, infinite_predictor_coeffs,
                        one_step_rho)
from .process import (AutocovSeq, CoeffSeq, ProcessSpec, ar_inf_coeffs, autocovariance,
                      ma_inf_coeffs, weighted_norm)
from .toeplitz import levinson_durbin, levinson_solve, toeplitz_quadform

__all__ = [
    "AutocovSeq", "CausalWienerError", "CoeffSeq", "ConstraintViolated", "DegenerateFit",
    "DivergentNorm", "ExperimentConfig", "FilterSpec", "IncompatibleFilter", "InvalidBand",
    "InvalidRoots", "LengthMismatch", "LmConstants", "NotPositiveDefinite", "PredictorCoeffs",
    "ProcessSpec", "RateReport", "SeriesNotConverging", "TruncationInsufficient",
    "ar_inf_coeffs", "autocovariance", "bandpass_filter", "baxter_grid_check",
    "estimate_constants", "explicit_filter", "f_coeffs", "finite_predictor_coeffs",
    "finite_predictor_series", "hhat_finite", "hhat_infinite", "identity_filter",
    "infinite_predictor_coeffs", "levinson_durbin", "levinson_solve", "ma_inf_coeffs",
    "mspe_bounds", "one_step_rho", "parse_grid", "polydecay_filter", "rate_fit",
    "run_experiment", "shift_filter", "sigma", "sigma_tilde", "toeplitz_quadform",
    "weighted_norm",
]
