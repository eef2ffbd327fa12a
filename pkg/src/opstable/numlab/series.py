"""Lattice series for the double-point criteria and their dyadic shell sums.

The comparison series are

    d=2:  sum_{k,n>=1}   (k^b + n^b)^-1       (k^a1 + n^a2)^-g
    d=3:  sum_{k,n,m>=1} (k^b + n^b + m^b)^-1 (k^a1 + n^a2 + m^a3)^-g

with ``g = 2 - sum(1/a)``. They are summed over shells
``max(k, n[, m]) in (2^j, 2^(j+1)]``; each shell is split into fixed row
chunks whose partial sums are combined in a fixed order, so the result does
not depend on the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numba
import numpy as np

from ..errors import DomainError, NumericOverflow, ValidationError
from .trace import WINDOW, DyadicTrace

ROW_CHUNK = 64


def series_term_2d(alpha, gamma, beta, k, n):
    """``(k^beta + n^beta)^-1 (k^a1 + n^a2)^-gamma``; broadcasts over arrays."""
    a1, a2 = alpha
    k = np.asarray(k, dtype=float)
    n = np.asarray(n, dtype=float)
    out = (k**a1 + n**a2) ** (-gamma) / (k**beta + n**beta)
    return out[()] if out.ndim == 0 else out


def series_term_3d(alpha, gamma, beta, k, n, m):
    a1, a2, a3 = alpha
    k, n, m = (np.asarray(v, dtype=float) for v in (k, n, m))
    out = (k**a1 + n**a2 + m**a3) ** (-gamma) / (k**beta + n**beta + m**beta)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class SeriesTerm:
    """Comparison-series term with a compiled shell-sum path.

    ``scale`` multiplies every term; verdicts must not depend on it.
    """

    alphas: tuple[float, ...]
    gamma: float
    beta: float
    scale: float = 1.0

    @classmethod
    def for_alphas(cls, alphas: Sequence[float], beta: float, scale: float = 1.0) -> "SeriesTerm":
        alphas = tuple(float(a) for a in alphas)
        return cls(alphas, 2.0 - sum(1.0 / a for a in alphas), float(beta), float(scale))

    @property
    def dim(self) -> int:
        return len(self.alphas)

    def __call__(self, *idx):
        if len(idx) != self.dim:
            raise ValueError(f"expected {self.dim} indices, got {len(idx)}")
        f = series_term_2d if self.dim == 2 else series_term_3d
        return self.scale * f(self.alphas, self.gamma, self.beta, *idx)


# compiled kernels --------------------------------------------------------


@numba.njit(nogil=True, cache=True)
def _rows_2d(pa1, pa2, pb, g, lo, hi, r0, r1):
    # rows k in [r0, r1); n ranges over the part of the shell in that row
    tot = 0.0
    for k in range(r0, r1):
        start = 1 if k > lo else lo + 1
        s = 0.0
        for n in range(start, hi + 1):
            s += (pa1[k] + pa2[n]) ** (-g) / (pb[k] + pb[n])
        tot += s
    return tot


@numba.njit(nogil=True, cache=True)
def _rows_3d(pa1, pa2, pa3, pb, g, lo, hi, r0, r1):
    tot = 0.0
    for k in range(r0, r1):
        sk = 0.0
        for n in range(1, hi + 1):
            start = 1 if (k > lo or n > lo) else lo + 1
            s = 0.0
            for m in range(start, hi + 1):
                s += (pa1[k] + pa2[n] + pa3[m]) ** (-g) / (pb[k] + pb[n] + pb[m])
            sk += s
        tot += sk
    return tot


def _chunks(hi: int) -> list[tuple[int, int]]:
    return [(r, min(r + ROW_CHUNK, hi + 1)) for r in range(1, hi + 1, ROW_CHUNK)]


def _fast_shell(term: SeriesTerm, lo: int, hi: int, pool) -> float:
    idx = np.arange(hi + 1, dtype=float)
    pows = [idx**a for a in term.alphas]
    pb = idx**term.beta
    if term.dim == 2:
        job = lambda c: _rows_2d(pows[0], pows[1], pb, term.gamma, lo, hi, c[0], c[1])
    else:
        job = lambda c: _rows_3d(pows[0], pows[1], pows[2], pb, term.gamma, lo, hi, c[0], c[1])
    chunks = _chunks(hi)
    parts = list(pool.map(job, chunks)) if pool is not None else [job(c) for c in chunks]
    return term.scale * math.fsum(parts)


def _generic_shell(term: Callable, d: int, lo: int, hi: int, pool) -> float:
    cols = np.arange(1, hi + 1, dtype=float)

    def job(c):
        r0, r1 = c
        tot = 0.0
        for k in range(r0, r1):
            if d == 2:
                n = cols if k > lo else cols[lo:]
                tot += float(np.sum(term(np.full(n.shape, float(k)), n)))
            else:
                N, M = np.meshgrid(cols, cols, indexing="ij")
                if k <= lo:
                    keep = (N > lo) | (M > lo)
                    N, M = N[keep], M[keep]
                tot += float(np.sum(term(np.full(N.shape, float(k)), N, M)))
        return tot

    chunks = _chunks(hi)
    parts = list(pool.map(job, chunks)) if pool is not None else [job(c) for c in chunks]
    return math.fsum(parts)


def _shell(term, d, lo, hi, pool) -> float:
    if isinstance(term, SeriesTerm):
        if term.dim != d:
            raise ValidationError(f"term has dimension {term.dim}, expected {d}")
        return _fast_shell(term, lo, hi, pool)
    return _generic_shell(term, d, lo, hi, pool)


def dyadic_series_sum(term, d_sum: int, m_max: int, m0: int = 0, threads: int = 1) -> DyadicTrace:
    """Shell sums ``B_m`` for ``m = m0..m_max`` plus the inner sum ``S(2^m0)``.

    ``term`` is a :class:`SeriesTerm` or any vectorized non-negative callable
    of ``d_sum`` index arrays.
    """
    if d_sum not in (2, 3):
        raise DomainError(f"d_sum must be 2 or 3, got {d_sum}")
    if m0 < 0 or m_max < m0 + WINDOW:
        raise DomainError(f"need m_max >= m0 + {WINDOW}, got m0={m0}, m_max={m_max}")
    threads = max(1, int(threads))
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        # inner cube 1..2^m0 is the shell (0, 2^m0] with every row full
        base = _shell(term, d_sum, 0, 2**m0, pool)
        blocks = [_shell(term, d_sum, 2**m, 2 ** (m + 1), pool) for m in range(m0, m_max + 1)]
    finally:
        if pool is not None:
            pool.shutdown()
    if not (math.isfinite(base) and all(math.isfinite(b) for b in blocks)):
        raise NumericOverflow("series terms overflowed; check the exponents and beta")
    if base < 0 or any(b < 0 for b in blocks):
        raise ValidationError("series terms must be non-negative")
    meta = {"d_sum": d_sum, "m0": m0, "m_max": m_max}
    if isinstance(term, SeriesTerm):
        meta.update(alphas=list(term.alphas), beta=term.beta, scale=term.scale)
    return DyadicTrace.from_blocks(range(m0, m_max + 1), blocks, base=base, meta=meta)


def direct_sum(term, d_sum: int, n_max: int) -> float:
    """Plain sum over the cube ``1..n_max`` (reference for shell regrouping)."""
    i = np.arange(1, n_max + 1, dtype=float)
    grids = np.meshgrid(*([i] * d_sum), indexing="ij")
    return float(np.sum(term(*grids)))
