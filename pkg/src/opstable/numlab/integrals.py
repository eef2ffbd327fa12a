"""Truncated-integral growth estimators.

All grids are midpoint rules on geometrically graded axes: ``[0, 1]`` is cut
into four equal cells and beyond 1 the cell edges grow by ``2^(1/4)``, so
every power of two is a cell edge and dyadic shells are unions of cells.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from ..errors import BudgetExceeded, DomainError, NumericOverflow, QuadratureFailure
from ..psi import PsiModel, psi_hat_floor
from .trace import CONVERGENT, DIVERGENT, INCONCLUSIVE, DyadicTrace

GRADING = 2.0 ** 0.25
UNIT_CELLS = 4
NODE_CAP = 5 * 10**7
PARTITION_POWER = 8.0


def doubling_radii(r0: float, doublings: int) -> tuple[float, ...]:
    return tuple(float(r0) * 2.0**i for i in range(int(doublings) + 1))


def check_radii(radii: Sequence[float], min_blocks: int = 4) -> tuple[float, ...]:
    radii = tuple(float(r) for r in radii)
    if len(radii) < min_blocks + 1:
        raise DomainError(f"need at least {min_blocks + 1} radii, got {len(radii)}")
    if radii[0] < 2.0:
        raise DomainError(f"first radius must be >= 2, got {radii[0]}")
    for a, b in zip(radii, radii[1:]):
        if not math.isclose(b, 2.0 * a, rel_tol=1e-12):
            raise DomainError(f"radii must double: {a} -> {b}")
    if not math.log2(radii[0]).is_integer():
        raise DomainError("radii must be powers of two so shells align with the grid")
    return radii


def graded_half_axis(R: float) -> tuple[np.ndarray, np.ndarray]:
    """Midpoints and widths of the graded cells covering ``[0, R]``."""
    edges = list(np.linspace(0.0, 1.0, UNIT_CELLS + 1))
    j = 1
    while 2.0 ** (j / 4) <= R * (1 + 1e-12):
        edges.append(2.0 ** (j / 4))
        j += 1
    e = np.asarray(edges)
    return 0.5 * (e[1:] + e[:-1]), np.diff(e)


def _shell_index(value: np.ndarray, radii: Sequence[float]) -> np.ndarray:
    """0 for value <= radii[0], i for radii[i-1] < value <= radii[i], len(radii) beyond."""
    return np.searchsorted(np.asarray(radii), value, side="left")


def _trace_from_shells(shell_totals: np.ndarray, radii, meta) -> DyadicTrace:
    totals = np.asarray(shell_totals, dtype=float)
    if not np.all(np.isfinite(totals)):
        raise NumericOverflow("integrand overflowed on the quadrature grid")
    index = [math.log2(r) for r in radii[1:]]
    return DyadicTrace.from_blocks(index, totals[1:len(radii)], base=totals[0], meta=meta)


# I_beta ----------------------------------------------------------------


class IbetaQuadrature:
    """Beta-independent part of the truncated I_beta quadrature.

    Integration runs in the coordinates ``(x, u = x + y)``. A smooth
    partition of unity built from ``rho(z) = (1 + |z|)^-p`` splits the
    integrand into pieces concentrated near ``x = 0``, ``y = 0`` and
    ``u = 0``; by the ``x <-> y`` symmetry the ``y`` piece equals the ``x``
    piece, so weight ``(2 rho(x) + rho(u)) / (rho(x) + rho(y) + rho(u))``
    keeps every piece on a grid graded where it peaks. Reflection in each
    coordinate pair lets ``u`` run over the positive quadrant.
    """

    def __init__(self, alpha: Sequence[float], radii: Sequence[float]):
        self.alpha = tuple(float(a) for a in alpha)
        if len(self.alpha) != 2:
            raise DomainError("I_beta is defined for two exponents")
        self.radii = check_radii(radii)
        R = self.radii[-1]
        xc, xw = graded_half_axis(R)
        uc, uw = graded_half_axis(2.0 * R)
        xs = np.concatenate([-xc[::-1], xc])
        xws = np.concatenate([xw[::-1], xw])
        nodes = len(xs) ** 2 * len(uc) ** 2
        if nodes > NODE_CAP:
            raise BudgetExceeded(f"{nodes} quadrature nodes exceed the cap {NODE_CAP}")
        self.u1, self.u2 = np.meshgrid(uc, uc, indexing="ij")
        nshell = len(self.radii) + 1
        G = np.zeros((len(uc), len(uc), nshell))
        X1, X2 = np.meshgrid(xs, xs, indexing="ij")
        WX = np.outer(xws, xws)
        a1, a2 = self.alpha
        psi_x = np.abs(X1) ** a1 + np.abs(X2) ** a2
        nx = np.hypot(X1, X2)
        rho_x = (1 + nx) ** -PARTITION_POWER
        sup_x = np.maximum(np.abs(X1), np.abs(X2))
        keep_x = nx > 1.0
        base_x = np.where(keep_x, WX / psi_x, 0.0)
        for i, u1 in enumerate(uc):
            Y1 = u1 - X1
            for j, u2 in enumerate(uc):
                Y2 = u2 - X2
                ny = np.hypot(Y1, Y2)
                psi_y = np.abs(Y1) ** a1 + np.abs(Y2) ** a2
                rho_y = (1 + ny) ** -PARTITION_POWER
                rho_u = (1 + math.hypot(u1, u2)) ** -PARTITION_POWER
                w = (2 * rho_x + rho_u) / (rho_x + rho_y + rho_u)
                f = np.where(ny > 1.0, base_x * w / np.where(ny > 1.0, psi_y, 1.0), 0.0)
                sup = np.maximum(sup_x, np.maximum(np.abs(Y1), np.abs(Y2)))
                shell = _shell_index(sup, self.radii)
                G[i, j] = np.bincount(shell.ravel(), weights=f.ravel(), minlength=nshell)
        # four sign choices of (u1, u2) times the u cell area
        self.G = G * (4.0 * np.outer(uw, uw))[:, :, None]

    def trace(self, beta: float) -> DyadicTrace:
        if beta < 0:
            raise DomainError(f"beta must be non-negative, got {beta}")
        with np.errstate(over="ignore"):
            den = 1.0 + self.u1**beta + self.u2**beta
        totals = np.einsum("ijs,ij->s", self.G, 1.0 / den)
        meta = {"alphas": list(self.alpha), "beta": beta, "radii": list(self.radii)}
        return _trace_from_shells(totals, self.radii, meta)


def integral_growth_ibeta(alpha: Sequence[float], beta: float,
                          radii: Sequence[float] = doubling_radii(2.0, 9)) -> DyadicTrace:
    """Truncated I_beta over ``|x|, |y| > 1`` and ``|x|_inf, |y|_inf <= R``."""
    return IbetaQuadrature(alpha, radii).trace(beta)


# existence integral ----------------------------------------------------


def existence_integral_estimate(model: PsiModel,
                                radii: Sequence[float] = doubling_radii(4.0, 12)) -> DyadicTrace:
    """Shell integrals of ``(1 + psi_hat)^-2`` over ``tau <= |xi|_inf <= R``."""
    d = model.dim
    if d not in (2, 3):
        raise DomainError(f"existence integral needs d in (2, 3), got {d}")
    radii = check_radii(radii)
    if radii[0] < model.tau:
        raise DomainError(f"first radius {radii[0]} is below the cutoff {model.tau:.4g}")
    c, w = graded_half_axis(radii[-1])
    if len(c) ** d > NODE_CAP:
        raise BudgetExceeded(f"{len(c) ** d} quadrature nodes exceed the cap {NODE_CAP}")
    nshell = len(radii) + 1
    totals = np.zeros(nshell)
    rest = np.meshgrid(*([c] * (d - 1)), indexing="ij")
    wrest = np.ones_like(rest[0])
    for wi in np.meshgrid(*([w] * (d - 1)), indexing="ij"):
        wrest = wrest * wi
    for x0, w0 in zip(c, w):
        xi = np.stack([np.full(rest[0].shape, x0), *rest], axis=-1)
        sup = xi.max(axis=-1)
        keep = sup >= model.tau
        f = np.where(keep, w0 * wrest / (1.0 + psi_hat_floor(model, xi)) ** 2, 0.0)
        totals += np.bincount(_shell_index(sup, radii).ravel(), weights=f.ravel(), minlength=nshell)
    totals *= 2.0**d
    meta = {"alphas": list(model.alphas), "logpows": list(model.logpows), "radii": list(radii)}
    return _trace_from_shells(totals, radii, meta)


# case-(d) series --------------------------------------------------------

CASE_D_WINDOW = 0.5  # fit over the last half of the terms
POWER_CONVERGENT = -1.2
POWER_DIVERGENT = -0.8


def case_d_term(n: int, alpha1: float) -> float:
    """``2^n int_1^{2^n} int_1^y (2^n + n y + n^2 z)^(-2 alpha1) dz dy``.

    The inner integral is done in closed form; the outer one by adaptive
    quadrature with break points where the ``y`` and ``z`` terms overtake
    ``2^n``.
    """
    c = 2.0**n
    q = 1.0 - 2.0 * alpha1
    n2 = float(n * n)

    def inner(y):
        base = c + n * y + n2
        return -(base**q) * np.expm1(q * np.log1p(n2 * (y - 1.0) / base)) / (n2 * (2.0 * alpha1 - 1.0))

    pts = sorted({p for p in (c / n2, c / n) if 1.0 < p < c})
    val, err, info = quad(inner, 1.0, c, points=pts or None, limit=400,
                          epsabs=0.0, epsrel=1e-10, full_output=1)[:3]
    if not math.isfinite(val) or err > 1e-6 * abs(val):
        raise QuadratureFailure(f"case-(d) term n={n} did not converge (estimate {val}, error {err})")
    return c * val


def _power_verdict(p: float) -> str:
    if not math.isfinite(p):
        return INCONCLUSIVE
    if p <= POWER_CONVERGENT:
        return CONVERGENT
    if p >= POWER_DIVERGENT:
        return DIVERGENT
    return INCONCLUSIVE


def dyadic_series_case_d(alpha1: float, n_max: int = 40) -> DyadicTrace:
    """Terms ``t_n``, ``n = 1..n_max``, of the full-Jordan-block series.

    ``slope`` is the log-log slope of ``t_n`` over the last half of the
    terms; the series is summable when it is clearly below -1.
    """
    if not 1.0 < alpha1 <= 2.0:
        raise DomainError(f"alpha1 must lie in (1, 2], got {alpha1}")
    if n_max < 10:
        raise DomainError(f"n_max must be >= 10, got {n_max}")
    ns = np.arange(1, n_max + 1)
    t = np.array([case_d_term(int(n), alpha1) for n in ns])
    sel = ns >= max(1, int(round(n_max * CASE_D_WINDOW)))
    p = float(np.polyfit(np.log2(ns[sel]), np.log2(t[sel]), 1)[0])
    r = float(np.polyfit(ns[sel], np.log2(t[sel]), 1)[0])
    return DyadicTrace(
        index=tuple(float(n) for n in ns),
        block_sums=tuple(float(v) for v in t),
        base=0.0,
        slope=p,
        rate=r,
        log_order=p,
        verdict=_power_verdict(p),
        meta={"alpha1": alpha1, "n_max": n_max, "fit": "log2 t_n vs log2 n"},
    )
