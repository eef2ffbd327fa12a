from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from opstable.closedform import (
    EMPTY,
    INFINITE,
    DimensionReport,
    critical_beta,
    dim_double_points,
    exists_double_points,
    lemma_alpha_check,
)
from opstable.errors import DomainError, UnsupportedDim
from opstable.spectral import profile_from_alphas


def prof(alphas, case="a"):
    return profile_from_alphas(alphas, case)


@pytest.mark.parametrize(
    "alphas, dim",
    [
        ((2.0, 2.0), 2.0),
        ((2.0, 1.0), 1.0),
        ((2.0, 2.0, 2.0), 1.0),
        ((1.0, 1.0), 0.0),
    ],
)
def test_dimension_examples(alphas, dim):
    assert dim_double_points(prof(alphas)).dim_value == pytest.approx(dim, abs=1e-15)


def test_case_d_boundary_dimension_zero():
    rep = dim_double_points(prof((1.5, 1.5, 1.5), "d"))
    assert rep.dim_value == 0.0
    assert rep.exists is True


def test_four_dims_empty():
    rep = dim_double_points(prof((2.0, 2.0, 1.5, 1.2)))
    assert rep.dim_value == EMPTY and rep.is_empty
    assert rep.exists is False
    assert rep.raw_formula_value is None


def test_negative_raw_value_is_empty():
    rep = dim_double_points(prof((0.9, 0.8)))
    assert rep.raw_formula_value < 0
    assert rep.dim_value == EMPTY
    assert rep.critical_beta == INFINITE


def test_gamma_zero_d2():
    rep = dim_double_points(prof((1.0, 1.0)))
    assert rep.dim_value == 0.0
    assert rep.exists is False
    assert rep.critical_beta == INFINITE


def test_critical_beta_examples():
    assert critical_beta(prof((2.0, 1.0))) == pytest.approx(1.0)
    assert critical_beta(prof((2.0, 2.0, 2.0))) == pytest.approx(2.0)
    # exact rational evaluation of the two competing branches
    a1, a2 = Fraction(19, 10), Fraction(16, 10)
    ref = max(3 + a1 / a2 - 2 * a1, 2 + 2 * a2 / a1 - 2 * a2)
    assert ref == Fraction(46, 95)
    assert critical_beta(prof((1.9, 1.6))) == pytest.approx(float(ref), abs=1e-14)


def test_critical_beta_unsupported_dim():
    with pytest.raises(UnsupportedDim):
        critical_beta(prof((2.0, 2.0, 2.0, 2.0)))


@pytest.mark.parametrize(
    "alphas, case, expected",
    [
        ((2.0, 1.0), "a", True),
        ((1.5, 1.5, 1.5), "d", True),
        ((1.5, 1.5, 1.5), "a", False),
        ((1.4, 1.4, 1.4), "d", False),
        ((2.0, 2.0, 2.0, 2.0, 2.0), "a", False),
    ],
)
def test_existence_examples(alphas, case, expected):
    assert exists_double_points(prof(alphas, case)) is expected


def test_alpha_inequality_examples():
    assert lemma_alpha_check(2, 2, 2) is True
    assert lemma_alpha_check(2, 1.5, 1.2) is True
    with pytest.raises(DomainError):
        lemma_alpha_check(1.5, 1.6, 1.2)
    with pytest.raises(DomainError):
        lemma_alpha_check(2, 1.5, 1.0)


sorted2 = st.tuples(st.floats(0.55, 2.0), st.floats(0.55, 2.0)).map(lambda t: tuple(sorted(t, reverse=True)))
sorted3 = st.tuples(*[st.floats(0.55, 2.0)] * 3).map(lambda t: tuple(sorted(t, reverse=True)))


@given(st.one_of(sorted2, sorted3))
def test_duality_identity(alphas):
    rep = dim_double_points(prof(alphas))
    if rep.gamma <= 1e-12:
        assert rep.critical_beta == INFINITE
        return
    assert len(alphas) - rep.critical_beta == pytest.approx(rep.raw_formula_value, abs=1e-12)


@given(sorted2)
def test_existence_matches_positive_dimension_d2(alphas):
    rep = dim_double_points(prof(alphas))
    assert rep.exists == (rep.raw_formula_value > 1e-12)


@given(st.one_of(sorted2, sorted3), st.integers(0, 2), st.floats(0.0, 0.3))
def test_dimension_monotone(alphas, j, bump):
    j = min(j, len(alphas) - 1)
    hi = list(alphas)
    hi[j] = min(2.0, hi[j] + bump)
    hi = tuple(sorted(hi, reverse=True))
    lo_rep, hi_rep = dim_double_points(prof(alphas)), dim_double_points(prof(hi))
    if lo_rep.is_empty or hi_rep.is_empty:
        return
    assert hi_rep.dim_value >= lo_rep.dim_value - 1e-12


@given(st.one_of(sorted2, sorted3))
def test_dimension_range(alphas):
    rep = dim_double_points(prof(alphas))
    if not rep.is_empty:
        assert 0.0 <= rep.dim_value <= (2.0 if len(alphas) == 2 else 1.0) + 1e-12


def test_report_round_trip():
    rep = dim_double_points(prof((2.0, 1.0)))
    assert DimensionReport.from_dict(rep.to_dict()) == rep
