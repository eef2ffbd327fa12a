import numpy as np
import pytest

from opstable.closedform import critical_beta
from opstable.errors import BudgetExceeded, DomainError
from opstable.numlab import (
    CONVERGENT,
    DIVERGENT,
    dimension_search,
    mk_criterion_estimate,
)
from opstable.numlab.qmc import log_uniform, log_uniform_density
from opstable.psi import PsiModel, psi_model_for
from opstable.spectral import profile_from_alphas


def model(alphas, case="a"):
    return psi_model_for(profile_from_alphas(alphas, case))


def test_log_uniform_density_normalized():
    t = (np.arange(200_000) + 0.5) / 200_000
    z = log_uniform(t, 64.0)
    assert np.abs(z).max() <= 64.0
    # the empirical CDF of mapped midpoints matches the density's integral
    grid = np.linspace(-64, 64, 400_001)
    dens = log_uniform_density(grid[:, None], 64.0)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(grid))])
    assert cdf[-1] == pytest.approx(1.0, rel=1e-6)
    emp = np.searchsorted(np.sort(z), grid[::4000]) / len(z)
    np.testing.assert_allclose(emp, cdf[::4000], atol=1e-4)


@pytest.mark.parametrize(
    "m, k, verdict",
    [
        (model((2.0, 1.0)), 2, CONVERGENT),
        (model((1.0, 1.0)), 2, DIVERGENT),
        (PsiModel((2.0,), (0,)), 3, CONVERGENT),
        (model((2.0, 2.0, 2.0)), 2, CONVERGENT),
    ],
)
def test_mk_criterion(m, k, verdict):
    assert mk_criterion_estimate(m, k).verdict == verdict


def test_mk_budget_and_k():
    with pytest.raises(BudgetExceeded):
        mk_criterion_estimate(PsiModel((2.0,) * 4, (0,) * 4), 3)
    with pytest.raises(DomainError):
        mk_criterion_estimate(model((2.0, 1.0)), 1)


def test_seed_determinism():
    a = mk_criterion_estimate(model((2.0, 1.0)), seed=5)
    b = mk_criterion_estimate(model((2.0, 1.0)), seed=5, threads=4)
    c = mk_criterion_estimate(model((2.0, 1.0)), seed=6)
    assert a.block_sums == b.block_sums
    assert a.block_sums != c.block_sums


@pytest.mark.slow
@pytest.mark.parametrize("alphas", [(2.0, 1.0), (1.8, 1.2), (2.0, 2.0, 2.0)])
def test_dimension_search_tracks_closed_form(alphas):
    est = dimension_search(model(alphas))
    target = critical_beta(profile_from_alphas(alphas))
    assert abs(est.midpoint - target) <= 0.1
    assert est.trace_below.verdict == DIVERGENT
    assert est.trace_above.verdict == CONVERGENT


@pytest.mark.slow
def test_dimension_search_lower_edge():
    est = dimension_search(model((2.0, 2.0)))
    assert est.at_lower_edge
    assert est.beta_lo == 0.0


def test_dimension_search_rejects_high_dim():
    with pytest.raises(DomainError):
        dimension_search(PsiModel((2.0,), (0,)))
