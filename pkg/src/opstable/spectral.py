"""Stability exponent validation and spectral case analysis.

The eigenvalue real parts ``a_i`` of the exponent ``B`` fix the per-direction
indices ``alpha_j = 1/a_i`` (repeated ``d_i`` times). Whether a repeated real
part carries a Jordan block or a complex pair decides the structure case
(``a``..``d``), which controls the logarithmic corrections of the Levy
exponent.

For ``d <= 3`` the spectrum is computed from closed-form quadratic/cubic root
formulas. Clustering decisions are made on discriminants rather than on root
gaps alone: the roots of a defective eigenvalue split like the square (cube)
root of rounding noise, so a root-space tolerance of ``eps`` would
misclassify every Jordan block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateSpectrum,
    DimensionOne,
    InvalidSpectrum,
    NonFinite,
    NonSquare,
)

REL_EPS = 1e-8
# a decision quantity within this factor of its threshold is ambiguous
GUARD = 2.0

REAL_DIAGONALIZABLE = "real-diagonalizable"
NILPOTENT_JORDAN = "nilpotent-jordan"
COMPLEX_PAIR = "complex-pair"


@dataclass(frozen=True)
class StabilityExponent:
    """A validated real ``d x d`` stability exponent (``d >= 2``)."""

    entries: tuple[tuple[float, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    @property
    def norm_inf(self) -> float:
        return float(np.abs(self.matrix).sum(axis=1).max())

    @property
    def eps_eig(self) -> float:
        return REL_EPS * (1.0 + self.norm_inf)

    def to_list(self) -> list[list[float]]:
        return [list(row) for row in self.entries]


@dataclass(frozen=True)
class Block:
    real_part: float
    size: int
    kind: str

    @property
    def alpha(self) -> float:
        return 1.0 / self.real_part


@dataclass(frozen=True)
class SpectralProfile:
    dim: int
    blocks: tuple[Block, ...]
    alphas: tuple[float, ...]
    case_label: str
    eigenvalues: tuple[complex, ...] = ()

    @property
    def gamma(self) -> float:
        return 2.0 - sum(1.0 / a for a in self.alphas)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "blocks": [
                {"real_part": b.real_part, "size": b.size, "kind": b.kind}
                for b in self.blocks
            ],
            "alphas": list(self.alphas),
            "case_label": self.case_label,
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpectralProfile":
        return cls(
            dim=int(data["dim"]),
            blocks=tuple(
                Block(float(b["real_part"]), int(b["size"]), str(b["kind"]))
                for b in data["blocks"]
            ),
            alphas=tuple(float(a) for a in data["alphas"]),
            case_label=str(data["case_label"]),
            eigenvalues=tuple(complex(re, im) for re, im in data.get("eigenvalues", [])),
        )


def profile_from_alphas(alphas: Sequence[float], case_label: str = "a") -> SpectralProfile:
    """Build a profile directly from exponents, skipping the matrix.

    The structure case cannot be inferred from the exponents, so it must be
    supplied. Block data is synthesized from the case: equal exponents that
    the case puts in one Jordan/complex block are grouped together.
    """
    alphas = tuple(float(a) for a in alphas)
    d = len(alphas)
    if d < 2:
        raise DimensionOne("double-point analysis needs d >= 2")
    if any(not math.isfinite(a) for a in alphas):
        raise NonFinite("exponents must be finite")
    if any(a <= 0 or a > 2 + 1e-12 for a in alphas):
        raise InvalidSpectrum(f"every exponent must lie in (0, 2], got {alphas}")
    if any(alphas[i] < alphas[i + 1] for i in range(d - 1)):
        raise InvalidSpectrum(f"exponents must be non-increasing, got {alphas}")
    if d >= 4:
        label = "high-dim"
    else:
        valid = {2: ("a", "b"), 3: ("a", "b", "c", "d")}[d]
        if case_label not in valid:
            raise InvalidSpectrum(f"case {case_label!r} is not defined for d={d}")
        label = case_label
    layout = {
        (2, "b"): [(0, 2)],
        (3, "b"): [(0, 2), (2, 1)],
        (3, "c"): [(0, 1), (1, 2)],
        (3, "d"): [(0, 3)],
    }.get((d, label))
    if layout is None:
        layout = [(j, 1) for j in range(d)]
    blocks = []
    for start, size in layout:
        group = alphas[start : start + size]
        if max(group) - min(group) > 1e-12:
            raise InvalidSpectrum(
                f"case {label} needs equal exponents at positions "
                f"{start + 1}..{start + size}, got {group}"
            )
        kind = NILPOTENT_JORDAN if size > 1 else REAL_DIAGONALIZABLE
        blocks.append(Block(1.0 / group[0], size, kind))
    return SpectralProfile(d, tuple(blocks), alphas, label)


# --------------------------------------------------------------------------
# roots


def _as_matrix(matrix) -> np.ndarray:
    try:
        B = np.array(matrix, dtype=float)
    except (TypeError, ValueError) as exc:
        raise NonSquare(f"matrix is not a rectangular array of numbers: {exc}") from None
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {B.shape}")
    return B


def _quadratic_pair(center: float, disc: float, eps: float) -> tuple[list[complex], str]:
    """Roots ``center +- sqrt(disc)`` classified as distinct/repeated/complex."""
    if eps / GUARD < abs(disc) <= GUARD * eps:
        raise DegenerateSpectrum(
            f"quadratic discriminant {disc:.3e} is within the tolerance band of {eps:.1e}"
        )
    if disc > eps:
        r = math.sqrt(disc)
        return [complex(center - r), complex(center + r)], "distinct"
    if disc < -eps:
        r = math.sqrt(-disc)
        return [complex(center, -r), complex(center, r)], "complex"
    return [complex(center), complex(center)], "repeated"


def _depressed_cubic_real_root(p: float, q: float) -> float:
    """Real root of ``t^3 + p t + q`` of largest magnitude."""
    D = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if p < 0 and D <= 0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
        t0 = max(roots, key=abs)
    else:
        w = -q / 2.0 - math.copysign(math.sqrt(max(D, 0.0)), q)
        u = math.copysign(abs(w) ** (1.0 / 3.0), w)
        t0 = u - p / (3.0 * u) if u != 0.0 else 0.0
    for _ in range(2):
        fp = 3.0 * t0 * t0 + p
        if fp == 0.0:
            break
        step = (t0 ** 3 + p * t0 + q) / fp
        if not math.isfinite(step) or abs(step) > abs(t0) + 1.0:
            break
        t0 -= step
    return t0


def char_poly(matrix) -> np.ndarray:
    """Monic characteristic polynomial coefficients, highest power first."""
    B = _as_matrix(matrix)
    d = B.shape[0]
    coeffs = [1.0]
    for k in range(1, d + 1):
        total = sum(
            np.linalg.det(B[np.ix_(idx, idx)]) for idx in combinations(range(d), k)
        )
        coeffs.append((-1) ** k * total)
    return np.array(coeffs)


def _closed_form_roots(B: np.ndarray, eps: float) -> list[complex]:
    d = B.shape[0]
    if d == 2:
        center = 0.5 * (B[0, 0] + B[1, 1])
        disc = (0.5 * (B[0, 0] - B[1, 1])) ** 2 + B[0, 1] * B[1, 0]
        roots, _ = _quadratic_pair(center, disc, eps)
        return roots
    # d == 3: shift by trace/3 so the cubic is depressed
    s = np.trace(B) / 3.0
    M = B - s * np.eye(3)
    p = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    p += M[0, 0] * M[2, 2] - M[0, 2] * M[2, 0]
    p += M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1]
    q = -float(np.linalg.det(M))
    t0 = _depressed_cubic_real_root(float(p), q)
    # remaining factor t^2 + t0 t + (t0^2 + p)
    disc = -0.75 * t0 * t0 - p
    pair, _ = _quadratic_pair(-0.5 * t0, disc, eps)
    return [complex(s + t0)] + [s + z for z in pair]


def eigenvalues(matrix) -> tuple[complex, ...]:
    """Spectrum of ``matrix``: closed forms for d <= 3, dense solver above."""
    B = _as_matrix(matrix)
    d = B.shape[0]
    if d <= 1:
        return tuple(complex(x) for x in np.diag(B))
    eps = REL_EPS * (1.0 + float(np.abs(B).sum(axis=1).max()))
    if d <= 3:
        roots = _closed_form_roots(B, eps)
    else:
        roots = [complex(z) for z in np.linalg.eigvals(B)]
    return tuple(sorted(roots, key=lambda z: (z.real, z.imag)))


# --------------------------------------------------------------------------
# clustering and classification


def _clusters(roots: Sequence[complex], merge_tol: float, strict: bool) -> list[list[complex]]:
    ordered = sorted(roots, key=lambda z: z.real)
    groups = [[ordered[0]]]
    for prev, z in zip(ordered, ordered[1:]):
        gap = z.real - prev.real
        if strict and merge_tol / GUARD < gap < GUARD * merge_tol:
            raise DegenerateSpectrum(
                f"eigenvalue real parts {prev.real!r} and {z.real!r} differ by "
                f"{gap:.3e}, inside the ambiguity band of the merge tolerance"
            )
        if gap <= merge_tol:
            groups[-1].append(z)
        else:
            groups.append([z])
    return groups


def _rank(M: np.ndarray, scale: float, eps: float) -> int:
    """Rank decided by k x k minors against ``eps * scale**k``."""
    d = M.shape[0]
    if d > 3:
        sv = np.linalg.svd(M, compute_uv=False)
        return int(np.sum(sv > eps * scale))
    rank = 0
    for k in range(1, d + 1):
        tol = eps * scale ** k
        big = any(
            abs(np.linalg.det(M[np.ix_(rows, cols)])) > tol
            for rows in combinations(range(d), k)
            for cols in combinations(range(d), k)
        )
        if not big:
            break
        rank = k
    return rank


def _blocks(B: np.ndarray, roots: Sequence[complex], eps: float) -> list[Block]:
    d = B.shape[0]
    scale = 1.0 + float(np.abs(B).sum(axis=1).max())
    imag_tol = math.sqrt(eps)
    if d <= 3:
        groups = _clusters(roots, 2.0 * math.sqrt(eps), strict=True)
    else:
        groups = _clusters(roots, 1e-3 * scale, strict=False)
    blocks = []
    for grp in groups:
        a = float(np.mean([z.real for z in grp]))
        m = len(grp)
        if any(abs(z.imag) > imag_tol for z in grp):
            kind = COMPLEX_PAIR
        elif m == 1:
            kind = REAL_DIAGONALIZABLE
        else:
            rank = _rank(B - a * np.eye(d), scale, eps)
            kind = NILPOTENT_JORDAN if rank > d - m else REAL_DIAGONALIZABLE
        blocks.append(Block(a, m, kind))
    return blocks


def _case_label(B: np.ndarray, blocks: Sequence[Block], eps: float) -> str:
    d = B.shape[0]
    if d >= 4:
        return "high-dim"
    special = [i for i, b in enumerate(blocks) if b.kind != REAL_DIAGONALIZABLE]
    if not special:
        return "a"
    if d == 2:
        return "b"
    (i,) = special
    blk = blocks[i]
    if blk.size == 2:
        # the defective/complex pair carries the larger alpha -> b, else c
        return "b" if i == 0 else "c"
    if blk.kind == COMPLEX_PAIR:
        return "b"
    scale = 1.0 + float(np.abs(B).sum(axis=1).max())
    rank = _rank(B - blk.real_part * np.eye(3), scale, eps)
    return "d" if rank == 2 else "b"


def _spectral_data(B: np.ndarray) -> tuple[tuple[complex, ...], list[Block], float]:
    eps = REL_EPS * (1.0 + float(np.abs(B).sum(axis=1).max()))
    roots = eigenvalues(B)
    return roots, _blocks(B, roots, eps), eps


def validate_exponent(matrix) -> StabilityExponent:
    """Check the standing assumptions on a stability exponent.

    Raises NonSquare, NonFinite, DimensionOne or InvalidSpectrum.
    """
    B = _as_matrix(matrix)
    if not np.all(np.isfinite(B)):
        raise NonFinite("matrix entries must be finite")
    d = B.shape[0]
    if d < 2:
        raise DimensionOne("d = 1 is not supported; multiple points need d >= 2")
    _, blocks, eps = _spectral_data(B)
    low = min(b.real_part for b in blocks)
    if low < 0.5 - eps:
        raise InvalidSpectrum(
            f"eigenvalue real part {low:.6g} < 1/2 (would give alpha = {1 / low:.6g} > 2)"
            if low > 0
            else f"eigenvalue real part {low:.6g} is not positive"
        )
    return StabilityExponent(tuple(tuple(float(x) for x in row) for row in B))


def analyze_exponent(exponent: StabilityExponent) -> SpectralProfile:
    """Group the spectrum into blocks and assign the structure case."""
    B = exponent.matrix
    roots, blocks, eps = _spectral_data(B)
    alphas = []
    for b in blocks:
        alphas.extend([min(1.0 / b.real_part, 2.0)] * b.size)
    return SpectralProfile(
        dim=exponent.dim,
        blocks=tuple(blocks),
        alphas=tuple(alphas),
        case_label=_case_label(B, blocks, eps),
        eigenvalues=tuple(roots),
    )


def analyze_matrix(matrix) -> SpectralProfile:
    return analyze_exponent(validate_exponent(matrix))
