from .trace import CONVERGENT, DIVERGENT, INCONCLUSIVE, CriterionEstimate, DyadicTrace, classify, fit_blocks
from .series import SeriesTerm, direct_sum, dyadic_series_sum, series_term_2d, series_term_3d
from .search import estimate_critical_beta_series, refine_critical_beta
from .integrals import (
    IbetaQuadrature,
    case_d_term,
    doubling_radii,
    dyadic_series_case_d,
    existence_integral_estimate,
    integral_growth_ibeta,
)
from .qmc import DimensionSampler, dimension_search, mk_criterion_estimate

__all__ = [
    "CONVERGENT",
    "DIVERGENT",
    "INCONCLUSIVE",
    "CriterionEstimate",
    "DyadicTrace",
    "classify",
    "fit_blocks",
    "SeriesTerm",
    "direct_sum",
    "dyadic_series_sum",
    "series_term_2d",
    "series_term_3d",
    "estimate_critical_beta_series",
    "refine_critical_beta",
    "IbetaQuadrature",
    "case_d_term",
    "doubling_radii",
    "dyadic_series_case_d",
    "existence_integral_estimate",
    "integral_growth_ibeta",
    "DimensionSampler",
    "dimension_search",
    "mk_criterion_estimate",
]
