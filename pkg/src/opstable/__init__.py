"""Double points of operator stable Levy processes.

Closed-form Hausdorff dimension and existence of the double-point set from
the stability exponent, plus numerical estimators that check the closed
forms independently.
"""

__version__ = "0.1.0"

from .closedform import DimensionReport, critical_beta, dim_double_points, exists_double_points
from .errors import (
    InconclusiveError,
    NumericError,
    OpstableError,
    ValidationError,
)
from .psi import PsiModel, eval_psi_hat, psi_model_for
from .spectral import SpectralProfile, analyze_exponent, analyze_matrix, profile_from_alphas, validate_exponent

__all__ = [
    "DimensionReport",
    "critical_beta",
    "dim_double_points",
    "exists_double_points",
    "InconclusiveError",
    "NumericError",
    "OpstableError",
    "ValidationError",
    "PsiModel",
    "eval_psi_hat",
    "psi_model_for",
    "SpectralProfile",
    "analyze_exponent",
    "analyze_matrix",
    "profile_from_alphas",
    "validate_exponent",
]
