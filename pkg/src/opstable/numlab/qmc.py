"""Quasi-Monte Carlo estimates of the multiple-point integrals.

Both integrands are products of factors ``1 / (1 + psi(v))`` over a few
"feature" vectors that are linear in the integration variables. Each
sampling frame draws all features but one from a heavy-tailed
per-coordinate density and recovers the last one; frames are combined with
the balance heuristic so every feature gets importance sampled where it is
small.

Every nested box gets its own sample budget and contributes only its
outermost shell, which keeps the relative error of each block even across
the schedule. Contributions are reduced per fixed-size chunk in chunk
order, so results do not depend on the number of threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from ..errors import BudgetExceeded, DomainError
from ..psi import PsiModel, psi_hat_floor
from .integrals import check_radii, doubling_radii
from .search import bisect_rate
from .trace import CriterionEstimate, DyadicTrace

SAMPLE_BUDGET = 2**20
CHUNK = 2**16
MAX_QMC_DIM = 6
# sampled rates flatten near the threshold, so confirm further out
QMC_CONFIRM_MARGIN = 0.5


def _pow2_floor(x: int) -> int:
    return 1 << (int(x).bit_length() - 1)


def log_uniform(t: np.ndarray, L: float) -> np.ndarray:
    """Map ``[0, 1)`` to ``[-L, L]`` with density ``1 / (2 (1 + |z|) ln(1 + L))``."""
    s = 2.0 * t - 1.0
    return np.sign(s) * np.expm1(np.abs(s) * math.log1p(L))


def log_uniform_density(z: np.ndarray, L: float) -> np.ndarray:
    """Per-vector density (product over the last axis)."""
    q = np.where(np.abs(z) <= L, 1.0 / (2.0 * (1.0 + np.abs(z)) * math.log1p(L)), 0.0)
    return np.prod(q, axis=-1)


def _check_k(k: int, d: int, allowed: Sequence[int]) -> None:
    if k not in allowed:
        raise DomainError(f"k must be one of {tuple(allowed)}, got {k}")
    if d * (k - 1) > MAX_QMC_DIM:
        raise BudgetExceeded(f"d*(k-1) = {d * (k - 1)} exceeds the desk-scale limit {MAX_QMC_DIM}")


# A frame kernel maps uniform points to (weight, sup-norm, extra) arrays,
# where weight already includes 1 / (n * sum of frame densities).
FrameKernel = Callable[[np.ndarray, float, int, int], tuple]


def _sample_shells(kernel: FrameKernel, dim: int, frames: int, radii, seed: int,
                   threads: int, samples: int):
    """Per-box samples restricted to the box's outermost shell.

    Returns, per chunk, ``(shell, weight, extra)`` for the points kept.
    """
    n = _pow2_floor(samples // frames)
    jobs = []
    for box, R in enumerate(radii):
        inner = radii[box - 1] if box else 0.0
        for g in range(frames):
            eng = qmc.Sobol(d=dim, scramble=True, seed=np.random.default_rng([seed, box, g]))
            pts = eng.random_base2(int(math.log2(n)))
            for start in range(0, n, CHUNK):
                jobs.append((box, inner, R, g, pts[start:start + CHUNK]))

    def run(job):
        box, inner, R, g, chunk = job
        w, sup, extra = kernel(chunk, 2.0 * R, g, n)
        keep = (sup > inner) & (sup <= R)
        return box, w[keep], extra[keep] if extra is not None else None

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            out = list(pool.map(run, jobs))
    else:
        out = [run(j) for j in jobs]
    return out, n


def _mk_kernel(model: PsiModel, k: int) -> FrameKernel:
    d = model.dim

    def kernel(pts, L, g, n):
        z = log_uniform(pts, L).reshape(-1, k - 1, d)
        # features v_j = xi_{j-1} - xi_j sum to zero; v_g is recovered
        v = np.insert(z, g, -z.sum(axis=1), axis=1)
        xi = -np.cumsum(v, axis=1)[:, : k - 1]
        dens = np.stack([log_uniform_density(v[:, j], L) for j in range(k)], axis=1)
        p = sum(np.prod(np.delete(dens, h, axis=1), axis=1) for h in range(k))
        f = np.prod(1.0 / (1.0 + psi_hat_floor(model, v)), axis=1)
        sup = np.abs(xi).reshape(len(xi), -1).max(axis=1)
        return f / (n * p), sup, None

    return kernel


def mk_criterion_estimate(model: PsiModel, k: int = 2,
                          radii: Sequence[float] = doubling_radii(2.0, 9),
                          seed: int = 0, threads: int = 1,
                          samples: int = SAMPLE_BUDGET) -> DyadicTrace:
    """Shells of ``int prod_j 1/(1 + psi(xi_{j-1} - xi_j)) dxi`` with ``xi_0 = xi_k = 0``.

    Shells are taken in ``max_i |xi_i|_inf``.
    """
    d = model.dim
    _check_k(k, d, (2, 3))
    radii = check_radii(radii)
    out, n = _sample_shells(_mk_kernel(model, k), d * (k - 1), k, radii, seed, threads, samples)
    totals = np.zeros(len(radii))
    for box, w, _ in out:
        totals[box] += w.sum()
    meta = {"k": k, "alphas": list(model.alphas), "logpows": list(model.logpows),
            "radii": list(radii), "seed": seed, "samples_per_frame": n, "frames": k}
    index = [math.log2(r) for r in radii[1:]]
    return DyadicTrace.from_blocks(index, totals[1:], base=totals[0], meta=meta)


def _dimension_kernel(model: PsiModel) -> FrameKernel:
    d = model.dim

    def kernel(pts, L, g, n):
        z = log_uniform(pts, L).reshape(-1, 2, d)
        # features (xi1, xi2, u = xi1 + xi2); frame g samples all but feature g
        if g == 0:
            x1, x2 = z[:, 0], z[:, 1]
        elif g == 1:
            x1, x2 = z[:, 0], z[:, 1] - z[:, 0]
        else:
            x1, x2 = z[:, 1] - z[:, 0], z[:, 0]
        u = x1 + x2
        d1, d2, du = (log_uniform_density(w, L) for w in (x1, x2, u))
        p = d1 * d2 + d1 * du + d2 * du
        f = 1.0 / ((1.0 + psi_hat_floor(model, x1)) * (1.0 + psi_hat_floor(model, x2)))
        sup = np.maximum(np.abs(x1).max(axis=1), np.abs(x2).max(axis=1))
        return f / (n * p), sup, np.sqrt(np.sum(u * u, axis=1))

    return kernel


class DimensionSampler:
    """Beta-free weights of the k=2 dimension integral, cached per box."""

    def __init__(self, model: PsiModel, radii, seed: int = 0, threads: int = 1,
                 samples: int = SAMPLE_BUDGET):
        self.radii = check_radii(radii)
        self.chunks, self.n = _sample_shells(_dimension_kernel(model), 2 * model.dim, 3,
                                             self.radii, seed, threads, samples)

    def trace(self, beta: float, meta: dict | None = None) -> DyadicTrace:
        totals = np.zeros(len(self.radii))
        for box, w, unorm in self.chunks:
            totals[box] += np.sum(w / (1.0 + unorm**beta))
        index = [math.log2(r) for r in self.radii[1:]]
        return DyadicTrace.from_blocks(index, totals[1:], base=totals[0],
                                       meta={**(meta or {}), "beta": beta}, fit="harmonic")


def default_doublings(d: int) -> int:
    # the harmonic fit wants at least ten blocks; 3D outer shells get noisy past 2^12
    return 13 if d == 2 else 11


def dimension_search(model: PsiModel, k: int = 2, tol: float = 0.1, r0: float = 2.0,
                     doublings: int | None = None, seed: int = 0, threads: int = 1,
                     samples: int = SAMPLE_BUDGET) -> CriterionEstimate:
    """Bracket the threshold beta of the k=2 dimension integral.

    The dimension estimate is ``d - midpoint``. A failed confirmation is
    retried once with one more doubling of the outer box.
    """
    d = model.dim
    if d not in (2, 3):
        raise DomainError(f"dimension search needs d in (2, 3), got {d}")
    doublings = default_doublings(d) if doublings is None else int(doublings)
    _check_k(k, d, (2,))
    samplers: dict[int, DimensionSampler] = {}
    meta = {"alphas": list(model.alphas), "logpows": list(model.logpows), "seed": seed}

    def evaluate(beta, m):
        if m not in samplers:
            samplers[m] = DimensionSampler(model, doubling_radii(r0, m), seed, threads, samples)
        s = samplers[m]
        return s.trace(beta, {**meta, "radii": list(s.radii), "samples_per_frame": s.n})

    options = {**meta, "r0": r0, "samples": samples}
    return bisect_rate(evaluate, d, tol, doublings, options, margin=QMC_CONFIRM_MARGIN)
