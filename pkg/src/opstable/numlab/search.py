"""Bisection for the critical exponent of a beta-indexed family of traces.

Bisection tracks the sign of the fitted geometric rate: blocks grow for beta
below the threshold and shrink above it. The bracket is then confirmed by
classifier verdicts a fixed margin outside it.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Callable, Sequence

from scipy.optimize import brentq

from ..errors import DomainError, InconclusiveError, NoBracket
from .series import SeriesTerm, dyadic_series_sum
from .trace import CONVERGENT, DIVERGENT, CriterionEstimate, DyadicTrace

MIN_TOL = 0.05
MAX_STEPS = 8
CONFIRM_MARGIN = 0.3
BOUNDARY_SHIFT = 0.01

Evaluator = Callable[[float, int], DyadicTrace]  # (beta, m_max) -> trace


def _diverging(trace: DyadicTrace) -> bool:
    if math.isnan(trace.rate):
        raise InconclusiveError(f"no usable rate for trace {trace.meta}")
    return trace.rate >= 0.0


def bisect_rate(evaluate: Evaluator, d: int, tol: float, m_max: int,
                options: dict | None = None, margin: float = CONFIRM_MARGIN) -> CriterionEstimate:
    if not tol >= MIN_TOL:
        raise DomainError(f"tol must be >= {MIN_TOL}, got {tol}")
    options = dict(options or {})
    options.update(tol=tol, m_max=m_max, confirm_margin=margin)
    last_error = None
    for attempt_m in (m_max, m_max + 1):
        try:
            est = _bisect_once(evaluate, float(d), tol, attempt_m, margin)
        except InconclusiveError as exc:
            last_error = exc
            continue
        options["m_max_used"] = attempt_m
        return CriterionEstimate(**{**est, "options": options})
    raise InconclusiveError(f"bracket not confirmed after retry: {last_error}")


def _bisect_once(evaluate: Evaluator, d: float, tol: float, m_max: int, margin: float) -> dict:
    calls = 0

    def ev(beta):
        nonlocal calls
        calls += 1
        return evaluate(beta, m_max)

    t_top = ev(d)
    if _diverging(t_top):
        raise NoBracket(f"blocks still grow at beta={d}; no threshold in [0, {d}]")
    t_zero = ev(0.0)
    if not _diverging(t_zero):
        # threshold at (or numerically indistinguishable from) zero
        hi = min(tol, d)
        t_hi = ev(hi)
        t_above = ev(min(hi + margin, d))
        if _diverging(t_hi) or t_above.verdict != CONVERGENT:
            raise InconclusiveError(
                f"expected convergence above 0, got rate {t_hi.rate:.3g} at {hi} "
                f"and {t_above.verdict} at {min(hi + margin, d)}"
            )
        return dict(beta_lo=0.0, beta_hi=hi, trace_at_lo=t_zero, trace_at_hi=t_hi,
                    evaluations=calls, trace_above=t_above, at_lower_edge=True)

    lo, hi, t_lo, t_hi = 0.0, d, t_zero, t_top
    for _ in range(MAX_STEPS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        t_mid = ev(mid)
        if _diverging(t_mid):
            lo, t_lo = mid, t_mid
        else:
            hi, t_hi = mid, t_mid
    below_beta = max(lo - margin, 0.0)
    above_beta = min(hi + margin, d)
    t_below = t_zero if below_beta == 0.0 else ev(below_beta)
    t_above = t_top if above_beta == d else ev(above_beta)
    if t_below.verdict != DIVERGENT or t_above.verdict != CONVERGENT:
        raise InconclusiveError(
            f"confirmation failed: beta={below_beta:.3g} -> {t_below.verdict}, "
            f"beta={above_beta:.3g} -> {t_above.verdict}"
        )
    return dict(beta_lo=lo, beta_hi=hi, trace_at_lo=t_lo, trace_at_hi=t_hi,
                evaluations=calls, trace_below=t_below, trace_above=t_above)


def _gamma(alpha: Sequence[float]) -> float:
    return 2.0 - sum(1.0 / a for a in alpha)


def _series_evaluator(alpha, d, scale, threads) -> Evaluator:
    def evaluate(beta, m_max):
        return dyadic_series_sum(SeriesTerm.for_alphas(alpha, beta, scale), d, m_max, threads=threads)
    return evaluate


def default_m_max(d: int) -> int:
    return 12 if d == 2 else 8


def estimate_critical_beta_series(alpha: Sequence[float], d: int, tol: float = 0.1,
                                  m_max: int | None = None, threads: int = 1,
                                  scale: float = 1.0,
                                  boundary_shift: float | None = BOUNDARY_SHIFT) -> CriterionEstimate:
    """Bracket the critical exponent of the comparison lattice series.

    When some exponent equals 2 and ``boundary_shift`` is set, a companion
    estimate with those exponents lowered to ``2 - boundary_shift`` is
    attached, since logarithmic factors can appear exactly at 2.
    """
    alpha = tuple(float(a) for a in alpha)
    if d not in (2, 3) or len(alpha) != d:
        raise DomainError(f"need d in (2, 3) with {d} exponents, got {alpha}")
    if any(alpha[i] < alpha[i + 1] for i in range(d - 1)) or not all(1.0 <= a <= 2.0 for a in alpha):
        raise DomainError(f"exponents must be sorted non-increasing in [1, 2], got {alpha}")
    if _gamma(alpha) <= 0:
        raise DomainError(f"deficiency must be positive, got {_gamma(alpha):.4g}")
    m_max = default_m_max(d) if m_max is None else int(m_max)
    options = {"alphas": list(alpha), "scale": scale}
    est = bisect_rate(_series_evaluator(alpha, d, scale, threads), d, tol, m_max, options)
    if boundary_shift and any(a == 2.0 for a in alpha):
        shifted = tuple(2.0 - boundary_shift if a == 2.0 else a for a in alpha)
        comp = bisect_rate(_series_evaluator(shifted, d, scale, threads), d, tol, m_max,
                           {"alphas": list(shifted), "scale": scale, "boundary_shift": boundary_shift})
        est = replace(est, companion=comp)
    return est


def refine_critical_beta(alpha: Sequence[float], lo: float, hi: float,
                         m_max: int | None = None, xtol: float = 1e-3, threads: int = 1) -> float:
    """Root of the fitted rate in ``[lo, hi]`` (finer than the bisection bracket).

    Useful for comparing nearby exponent tuples, where the common finite-size
    bias of the rate cancels.
    """
    alpha = tuple(float(a) for a in alpha)
    d = len(alpha)
    m_max = default_m_max(d) if m_max is None else int(m_max)
    evaluate = _series_evaluator(alpha, d, 1.0, threads)
    f = lambda beta: evaluate(beta, m_max).rate
    flo, fhi = f(lo), f(hi)
    if not (flo >= 0 > fhi):
        raise NoBracket(f"rate does not change sign on [{lo}, {hi}]: {flo:.3g}, {fhi:.3g}")
    return float(brentq(f, lo, hi, xtol=xtol))
