"""Dyadic block traces and the convergence classifier.

A trace holds the increments ``B_m = S(2^(m+1)) - S(2^m)`` of a truncated sum
or integral. Power-law problems give ``B_m ~ C * 2^(s m) * m^q``: the series
converges iff ``s < 0``, or ``s == 0`` and ``q < -1``.

Two slopes are reported. ``slope`` is the plain least-squares slope of
``log2 B_m`` over the last ``WINDOW`` blocks. ``rate`` and ``log_order`` come
from fitting ``a + s m + q log2(m+1) + r 2^-(m - m_last)`` over the last
``FIT_WINDOW`` blocks, which removes the logarithmic and boundary
corrections that bias the plain slope at desk-scale truncations. Sampled
integrals, whose corrections decay like ``1/m`` rather than geometrically,
use the "harmonic" model ``a + s m + q log2(m+1) + c/m`` over
``HARMONIC_WINDOW`` blocks instead.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

CONVERGENT = "Convergent"
DIVERGENT = "Divergent"
INCONCLUSIVE = "Inconclusive"

WINDOW = 4
FIT_WINDOW = 6
HARMONIC_WINDOW = 10
FIT_MODELS = ("transient", "harmonic")

RATE_CONVERGENT = -0.2
RATE_DIVERGENT = -0.05
# polynomial regime, |rate| < -RATE_DIVERGENT
ORDER_CONVERGENT = -1.75
ORDER_DIVERGENT = -1.5


@dataclass(frozen=True)
class Fit:
    slope: float
    rate: float
    log_order: float


def fit_blocks(index: Sequence[float], blocks: Sequence[float], model: str = "transient") -> Fit:
    if model not in FIT_MODELS:
        raise ValueError(f"unknown fit model {model!r}")
    m = np.asarray(index, dtype=float)
    b = np.asarray(blocks, dtype=float)
    if len(b) < WINDOW or np.any(b[-WINDOW:] <= 0):
        return Fit(math.nan, math.nan, math.nan)
    y = np.log2(b)
    slope = float(np.polyfit(m[-WINDOW:], y[-WINDOW:], 1)[0])
    w = min(HARMONIC_WINDOW if model == "harmonic" else FIT_WINDOW, len(b))
    if np.any(b[-w:] <= 0):
        return Fit(slope, math.nan, math.nan)
    mw, yw = m[-w:], y[-w:]
    cols = [np.ones(w), mw, np.log2(mw + 1.0)]
    # a fourth column needs enough points to stay overdetermined
    if w >= 5:
        cols.append(2.0 ** -(mw - mw[-1]) if model == "transient" else 1.0 / np.maximum(mw, 1.0))
    coef = np.linalg.lstsq(np.column_stack(cols), yw, rcond=None)[0]
    return Fit(slope, float(coef[1]), float(coef[2]))


def classify(rate: float, log_order: float) -> str:
    if not (math.isfinite(rate) and math.isfinite(log_order)):
        return INCONCLUSIVE
    if rate <= RATE_CONVERGENT:
        return CONVERGENT
    if rate >= -RATE_DIVERGENT:
        return DIVERGENT
    if rate >= RATE_DIVERGENT:
        if log_order <= ORDER_CONVERGENT:
            return CONVERGENT
        if log_order >= ORDER_DIVERGENT:
            return DIVERGENT
    return INCONCLUSIVE


@dataclass(frozen=True)
class DyadicTrace:
    """Increments of a truncated sum over a doubling schedule.

    ``index[i]`` labels ``block_sums[i]`` (the dyadic exponent ``m`` or, for
    the case-(d) series, the term number ``n``); ``base`` is the truncated
    value before the first block.
    """

    index: tuple[float, ...]
    block_sums: tuple[float, ...]
    base: float = 0.0
    slope: float = math.nan
    rate: float = math.nan
    log_order: float = math.nan
    verdict: str = INCONCLUSIVE
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_blocks(cls, index, blocks, base: float = 0.0, meta: dict | None = None,
                    fit: str = "transient") -> "DyadicTrace":
        index = tuple(float(i) for i in index)
        blocks = tuple(float(b) for b in blocks)
        meta = {**(meta or {}), "fit": fit}
        res = fit_blocks(index, blocks, model=fit)
        return cls(
            index=index,
            block_sums=blocks,
            base=float(base),
            slope=res.slope,
            rate=res.rate,
            log_order=res.log_order,
            verdict=classify(res.rate, res.log_order),
            meta=meta,
        )

    @property
    def cumulative(self) -> np.ndarray:
        return self.base + np.cumsum(self.block_sums)

    @property
    def total(self) -> float:
        return float(self.cumulative[-1]) if self.block_sums else self.base

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["m", "block_sum", "cumulative"])
        for m, b, c in zip(self.index, self.block_sums, self.cumulative):
            writer.writerow([_fmt_index(m), repr(b), repr(float(c))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "index": list(self.index),
            "block_sums": list(self.block_sums),
            "base": self.base,
            "slope": _nan_to_none(self.slope),
            "rate": _nan_to_none(self.rate),
            "log_order": _nan_to_none(self.log_order),
            "verdict": self.verdict,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DyadicTrace":
        def num(x):
            return math.nan if x is None else float(x)

        return cls(
            index=tuple(data["index"]),
            block_sums=tuple(data["block_sums"]),
            base=float(data["base"]),
            slope=num(data["slope"]),
            rate=num(data["rate"]),
            log_order=num(data["log_order"]),
            verdict=data["verdict"],
            meta=dict(data.get("meta", {})),
        )


@dataclass(frozen=True)
class CriterionEstimate:
    """Bisection bracket for a critical exponent.

    The bracket straddles the sign change of the fitted geometric rate:
    ``trace_at_lo.rate >= 0 > trace_at_hi.rate``. ``trace_below`` and
    ``trace_above`` are confirmation traces a fixed margin outside the bracket
    (Divergent below, Convergent above). When the rate is already negative
    at ``beta = 0`` the bracket is pinned to ``[0, tol]``, ``at_lower_edge``
    is set and only the upper confirmation is made.
    """

    beta_lo: float
    beta_hi: float
    trace_at_lo: DyadicTrace
    trace_at_hi: DyadicTrace
    evaluations: int
    trace_below: DyadicTrace | None = None
    trace_above: DyadicTrace | None = None
    at_lower_edge: bool = False
    options: dict = field(default_factory=dict, compare=False)
    companion: "CriterionEstimate | None" = None

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.beta_lo + self.beta_hi)

    @property
    def width(self) -> float:
        return self.beta_hi - self.beta_lo

    def to_dict(self) -> dict:
        return {
            "beta_lo": self.beta_lo,
            "beta_hi": self.beta_hi,
            "midpoint": self.midpoint,
            "evaluations": self.evaluations,
            "at_lower_edge": self.at_lower_edge,
            "trace_at_lo": self.trace_at_lo.to_dict(),
            "trace_at_hi": self.trace_at_hi.to_dict(),
            "trace_below": None if self.trace_below is None else self.trace_below.to_dict(),
            "trace_above": None if self.trace_above is None else self.trace_above.to_dict(),
            "options": self.options,
            "companion": None if self.companion is None else self.companion.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CriterionEstimate":
        def tr(x):
            return None if x is None else DyadicTrace.from_dict(x)

        return cls(
            beta_lo=float(data["beta_lo"]),
            beta_hi=float(data["beta_hi"]),
            trace_at_lo=DyadicTrace.from_dict(data["trace_at_lo"]),
            trace_at_hi=DyadicTrace.from_dict(data["trace_at_hi"]),
            evaluations=int(data["evaluations"]),
            trace_below=tr(data.get("trace_below")),
            trace_above=tr(data.get("trace_above")),
            at_lower_edge=bool(data.get("at_lower_edge", False)),
            options=dict(data.get("options", {})),
            companion=None if data.get("companion") is None
            else CriterionEstimate.from_dict(data["companion"]),
        )


def _fmt_index(m: float) -> str:
    return str(int(m)) if float(m).is_integer() else repr(m)


def _nan_to_none(x: float):
    return None if math.isnan(x) else x
