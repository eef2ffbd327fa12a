"""Closed-form double-point answers from the exponents alone."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import DomainError, UnsupportedDim
from .spectral import SpectralProfile

GAMMA_TOL = 1e-12
CASE_D_THRESHOLD = 1.5

EMPTY = "Empty"
INFINITE = "Infinite"

Number = Union[float, str]


@dataclass(frozen=True)
class DimensionReport:
    dim_value: Number  # float, or EMPTY
    raw_formula_value: float | None  # None when d >= 4
    exists: bool
    critical_beta: Number  # float, or INFINITE
    gamma: float
    case_label: str

    @property
    def is_empty(self) -> bool:
        return self.dim_value == EMPTY

    def to_dict(self) -> dict:
        return {
            "dim_value": self.dim_value,
            "raw_formula_value": self.raw_formula_value,
            "exists": self.exists,
            "critical_beta": self.critical_beta,
            "gamma": self.gamma,
            "case_label": self.case_label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DimensionReport":
        return cls(**data)


def deficiency(alphas: Sequence[float]) -> float:
    return 2.0 - sum(1.0 / a for a in alphas)


def dimension_formula(alphas: Sequence[float]) -> float:
    """Raw dimension formula (possibly negative) for d = 2 or 3."""
    if len(alphas) == 2:
        a1, a2 = alphas
        return min(a1 * (2.0 - 1.0 / a1 - 1.0 / a2), 2.0 * a2 - 2.0 * a2 / a1)
    if len(alphas) == 3:
        a1 = alphas[0]
        return a1 * deficiency(alphas)
    raise UnsupportedDim(f"no dimension formula for d={len(alphas)}")


def critical_beta_formula(alphas: Sequence[float]) -> float:
    """Threshold exponent of the truncated double integral, assuming gamma > 0."""
    if len(alphas) == 2:
        a1, a2 = alphas
        return max(3.0 + a1 / a2 - 2.0 * a1, 2.0 + 2.0 * a2 / a1 - 2.0 * a2)
    if len(alphas) == 3:
        a1, a2, a3 = alphas
        return 4.0 + a1 / a2 + a1 / a3 - 2.0 * a1
    raise UnsupportedDim(f"no critical exponent formula for d={len(alphas)}")


def critical_beta(profile: SpectralProfile) -> Number:
    if profile.dim not in (2, 3):
        raise UnsupportedDim(f"critical exponent is only defined for d in (2, 3), got {profile.dim}")
    if deficiency(profile.alphas) <= GAMMA_TOL:
        return INFINITE
    return critical_beta_formula(profile.alphas)


def exists_double_points(profile: SpectralProfile) -> bool:
    if profile.dim >= 4:
        return False
    if profile.dim == 3 and profile.case_label == "d":
        return profile.alphas[0] >= CASE_D_THRESHOLD - GAMMA_TOL
    return deficiency(profile.alphas) > GAMMA_TOL


def dim_double_points(profile: SpectralProfile) -> DimensionReport:
    gamma = deficiency(profile.alphas)
    if profile.dim >= 4:
        return DimensionReport(EMPTY, None, False, INFINITE, gamma, profile.case_label)
    raw = dimension_formula(profile.alphas)
    beta = critical_beta(profile)
    if raw < -GAMMA_TOL:
        dim: Number = EMPTY
    elif beta == INFINITE:
        dim = 0.0
    else:
        dim = max(profile.dim - beta, 0.0)
    return DimensionReport(
        dim_value=dim,
        raw_formula_value=raw,
        exists=exists_double_points(profile),
        critical_beta=beta,
        gamma=gamma,
        case_label=profile.case_label,
    )


def lemma_alpha_check(a1: float, a2: float, a3: float) -> bool:
    """Compare the two secondary thresholds against the leading one.

    Returns True when both lower-order exponents are dominated by
    ``4 + a1/a2 + a1/a3 - 2 a1``; expected for every admissible triple.
    """
    if not all(math.isfinite(x) for x in (a1, a2, a3)):
        raise DomainError("exponents must be finite")
    if not 2.0 >= a1 >= a2 >= a3 > 1.0:
        raise DomainError(f"need 2 >= a1 >= a2 >= a3 > 1, got ({a1}, {a2}, {a3})")
    lhs = max(
        2.0 + 2.0 * a3 / a1 + 2.0 * a3 / a2 - 2.0 * a3,
        3.0 + 2.0 * a2 / a1 + a2 / a3 - 2.0 * a2,
    )
    rhs = 4.0 + a1 / a2 + a1 / a3 - 2.0 * a1
    return lhs <= rhs + 1e-12
