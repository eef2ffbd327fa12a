"""Comparability models for the Levy exponent.

In every structure case the exponent is two-sided comparable, for large
frequencies, to a sum of coordinate powers with logarithmic corrections on
the coordinates inside a Jordan or complex block::

    psi_hat(xi) = sum_j |xi_j|**alpha_j * log(|xi|)**(alpha_j * logpow_j)

The comparability constant is unknowable, so only growth rates derived from
these models are meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import BelowCutoff, UnsupportedDim
from .spectral import SpectralProfile

TAU = max(math.e, 2.0)

LOG_POWERS = {
    (2, "a"): (0, 0),
    (2, "b"): (0, 1),
    (3, "a"): (0, 0, 0),
    (3, "b"): (0, 1, 0),
    (3, "c"): (0, 0, 1),
    (3, "d"): (0, 1, 2),
}


@dataclass(frozen=True)
class PsiModel:
    alphas: tuple[float, ...]
    logpows: tuple[int, ...]
    tau: float = TAU
    epsilon: float = 0.0

    def __post_init__(self):
        if len(self.alphas) != len(self.logpows):
            raise ValueError("alphas and logpows must have the same length")
        if any(not 0 < a <= 2 for a in self.alphas):
            raise ValueError(f"exponents must lie in (0, 2], got {self.alphas}")
        if any(p < 0 for p in self.logpows):
            raise ValueError("log powers must be non-negative")
        if any(self.logpows) and self.tau < math.e:
            raise ValueError("tau must be >= e when log corrections are present")

    @property
    def dim(self) -> int:
        return len(self.alphas)

    @property
    def has_logs(self) -> bool:
        return any(self.logpows)

    def shifted(self, eps: float) -> "PsiModel":
        """Model with exponents ``(1 - eps) * alpha`` (same log pattern)."""
        return replace(
            self, alphas=tuple((1.0 - eps) * a for a in self.alphas), epsilon=eps
        )

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        return psi_hat_floor(self, xi)

    def to_dict(self) -> dict:
        return {
            "alphas": list(self.alphas),
            "logpows": list(self.logpows),
            "tau": self.tau,
            "epsilon": self.epsilon,
        }


def psi_model_for(profile: SpectralProfile) -> PsiModel:
    key = (profile.dim, profile.case_label)
    if profile.dim not in (2, 3):
        raise UnsupportedDim(f"no Levy exponent model for d={profile.dim}")
    if key not in LOG_POWERS:
        raise UnsupportedDim(f"unknown case {profile.case_label!r} for d={profile.dim}")
    return PsiModel(alphas=tuple(profile.alphas), logpows=LOG_POWERS[key], tau=TAU)


def _evaluate(model: PsiModel, xi: np.ndarray, log_norm: np.ndarray) -> np.ndarray:
    total = np.zeros(xi.shape[:-1])
    for j, (a, lp) in enumerate(zip(model.alphas, model.logpows)):
        term = np.abs(xi[..., j]) ** a
        if lp:
            term = term * log_norm ** (a * lp)
        total = total + term
    return total


def eval_psi_hat(model: PsiModel, xi: Sequence[float]) -> float:
    """Evaluate the model at one frequency with ``|xi| >= tau``."""
    x = np.asarray(xi, dtype=float)
    if x.shape != (model.dim,):
        raise ValueError(f"expected a {model.dim}-vector, got shape {x.shape}")
    norm = float(np.linalg.norm(x))
    if norm < model.tau:
        raise BelowCutoff(f"|xi| = {norm:.4g} is below the cutoff tau = {model.tau:.4g}")
    return float(_evaluate(model, x[None, :], np.array([math.log(norm)]))[0])


def psi_hat_floor(model: PsiModel, xi: np.ndarray) -> np.ndarray:
    """Vectorized model over the last axis of ``xi``, defined everywhere.

    Below the cutoff the logarithm is frozen at ``log(tau)``; the region is
    bounded, so this cannot affect any convergence verdict.
    """
    x = np.asarray(xi, dtype=float)
    if not model.has_logs:
        return _evaluate(model, x, np.empty(0))
    norm = np.sqrt(np.sum(x * x, axis=-1))
    log_norm = np.log(np.maximum(norm, model.tau))
    return _evaluate(model, x, log_norm)
