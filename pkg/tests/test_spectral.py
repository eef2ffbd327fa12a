import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opstable.errors import (
    DegenerateSpectrum,
    DimensionOne,
    InvalidSpectrum,
    NonFinite,
    NonSquare,
)
from opstable.spectral import (
    COMPLEX_PAIR,
    NILPOTENT_JORDAN,
    REAL_DIAGONALIZABLE,
    SpectralProfile,
    analyze_exponent,
    analyze_matrix,
    char_poly,
    eigenvalues,
    profile_from_alphas,
    validate_exponent,
)

P_SHEAR = np.array([[1.0, 1.0], [0.0, 1.0]])


def test_validate_brownian_exponent():
    exp = validate_exponent([[0.5, 0], [0, 0.5]])
    assert exp.dim == 2


def test_validate_rejects_alpha_above_two():
    with pytest.raises(InvalidSpectrum):
        validate_exponent([[1 / 3, 0], [0, 1 / 2]])


def test_validate_full_jordan_block():
    assert validate_exponent([[2 / 3, 0, 0], [1, 2 / 3, 0], [0, 1, 2 / 3]]).dim == 3


@pytest.mark.parametrize(
    "matrix, exc",
    [
        ([[1.0]], DimensionOne),
        ([[1.0, 2.0]], NonSquare),
        ([[1.0, 0.0], [0.0]], NonSquare),
        ([[np.nan, 0.0], [0.0, 1.0]], NonFinite),
        ([[np.inf, 0.0], [0.0, 1.0]], NonFinite),
    ],
)
def test_validate_errors(matrix, exc):
    with pytest.raises(exc):
        validate_exponent(matrix)


@pytest.mark.parametrize(
    "matrix, alphas, case",
    [
        (np.diag([0.5, 0.5]), (2.0, 2.0), "a"),
        ([[2 / 3, 0], [1, 2 / 3]], (1.5, 1.5), "b"),
        ([[0.5, -1], [1, 0.5]], (2.0, 2.0), "b"),
        (np.diag([0.5, 2 / 3, 1.0]), (2.0, 1.5, 1.0), "a"),
        (P_SHEAR @ np.diag([0.5, 2 / 3]) @ np.linalg.inv(P_SHEAR), (2.0, 1.5), "a"),
        ([[2 / 3, 0, 0], [1, 2 / 3, 0], [0, 1, 2 / 3]], (1.5, 1.5, 1.5), "d"),
        ([[0.5, -1, 0], [1, 0.5, 0], [0, 0, 1]], (2.0, 2.0, 1.0), "b"),
        ([[2 / 3, 1, 0], [0, 2 / 3, 0], [0, 0, 0.5]], (2.0, 1.5, 1.5), "c"),
        ([[0.5, 1, 0], [0, 0.5, 0], [0, 0, 2 / 3]], (2.0, 2.0, 1.5), "b"),
    ],
)
def test_analyze_examples(matrix, alphas, case):
    prof = analyze_matrix(matrix)
    np.testing.assert_allclose(prof.alphas, alphas, atol=1e-12)
    assert prof.case_label == case
    assert sum(b.size for b in prof.blocks) == prof.dim


def test_block_kinds():
    assert analyze_matrix([[2 / 3, 0], [1, 2 / 3]]).blocks[0].kind == NILPOTENT_JORDAN
    assert analyze_matrix([[0.5, -1], [1, 0.5]]).blocks[0].kind == COMPLEX_PAIR
    assert analyze_matrix(np.diag([0.5, 0.5])).blocks[0].kind == REAL_DIAGONALIZABLE


def test_blocks_sorted_by_real_part():
    prof = analyze_matrix(np.diag([1.0, 0.5, 2 / 3]))
    parts = [b.real_part for b in prof.blocks]
    assert parts == sorted(parts)


def test_high_dim_label():
    prof = analyze_matrix(np.diag([0.5, 0.6, 0.7, 0.8]))
    assert prof.case_label == "high-dim"
    assert len(prof.alphas) == 4


def test_near_tolerance_gap_is_reported_not_guessed():
    # a gap comparable to the merge tolerance cannot be classified honestly
    eps = 1e-8 * 2
    gap = 2.0 * np.sqrt(eps)
    with pytest.raises(DegenerateSpectrum):
        analyze_matrix(np.diag([0.5, 0.5 + gap]))


def test_tiny_perturbation_of_jordan_block_stays_defective():
    B = np.array([[2 / 3, 0.0], [1.0, 2 / 3 + 1e-13]])
    assert analyze_matrix(B).case_label == "b"


@given(st.permutations([0.5, 0.6, 0.9]))
def test_permutation_invariance(perm):
    assert analyze_matrix(np.diag(perm)).alphas == analyze_matrix(np.diag([0.5, 0.6, 0.9])).alphas


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-2, 2), min_size=9, max_size=9),
    st.floats(0.55, 1.5),
)
def test_root_residual(entries, shift):
    # diagonally shifted random matrices keep every real part >= 1/2 often enough
    B = np.array(entries).reshape(3, 3) * 0.1 + shift * np.eye(3)
    try:
        roots = eigenvalues(B)
    except InvalidSpectrum:
        return
    coeffs = char_poly(B)
    scale = 1 + np.abs(B).sum(axis=1).max()
    for z in roots:
        assert abs(np.polyval(coeffs, z)) < 1e-9 * scale


def test_eigenvalues_match_numpy():
    rng = np.random.default_rng(3)
    for _ in range(20):
        B = rng.normal(size=(3, 3)) * 0.2 + np.eye(3)
        ours = sorted(eigenvalues(B), key=lambda z: (z.real, z.imag))
        ref = sorted(np.linalg.eigvals(B), key=lambda z: (z.real, z.imag))
        np.testing.assert_allclose(ours, ref, atol=1e-9)


def test_alphas_sorted_and_bounded():
    rng = np.random.default_rng(11)
    for _ in range(50):
        B = np.diag(rng.uniform(0.5, 2.0, size=3))
        prof = analyze_matrix(B)
        assert list(prof.alphas) == sorted(prof.alphas, reverse=True)
        assert all(0 < a <= 2 for a in prof.alphas)


def test_analyze_exponent_accepts_validated():
    exp = validate_exponent([[0.5, 0], [0, 1.0]])
    assert analyze_exponent(exp).alphas == (2.0, 1.0)


def test_profile_round_trip():
    prof = analyze_matrix([[0.5, -1], [1, 0.5]])
    assert SpectralProfile.from_dict(prof.to_dict()) == prof


def test_profile_from_alphas_cases():
    assert profile_from_alphas((1.5, 1.5, 1.5), "d").case_label == "d"
    assert profile_from_alphas((2.0, 1.0), "a").gamma == pytest.approx(0.5)
    with pytest.raises(InvalidSpectrum):
        profile_from_alphas((2.0, 1.5), "b")  # block needs equal exponents
    with pytest.raises(InvalidSpectrum):
        profile_from_alphas((1.0, 2.0), "a")
    with pytest.raises(InvalidSpectrum):
        profile_from_alphas((2.0, 1.0), "c")
