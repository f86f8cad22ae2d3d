"""Bayesian bootstrap inference for dyadic and polyadic data."""

from .bootstrap import (
    BootstrapResult,
    CredibleInterval,
    DiscreteAtomSet,
    credible_interval,
    limiting_prior_atoms,
    run_bootstrap,
    run_marginal_prior,
)
from .counterfactual import (
    CounterfactualFn,
    PredictionDraws,
    propagate,
    ranking_match_fraction,
    register_counterfactual,
    resolve_counterfactual,
    summarize,
)
from .coverage import (
    CoverageConfig,
    CoverageReport,
    SyntheticDGP,
    generate_synthetic,
    mean_unit_effects_dgp,
    ols_unit_effects_dgp,
    pigeonhole_dgp_resample,
    run_coverage,
)
from .data_model import (
    EmpiricalDistribution,
    PolyadicSample,
    full_index_set,
    load_csv,
    validate,
    write_csv,
)
from .estimators import (
    EstimatorSpec,
    GmmWeightMatrix,
    MomentFunction,
    SolverSettings,
    acm_weight_matrix,
    build_moment,
    centered_weight_matrix,
    evaluate_estimator,
    gmm_iterated,
    gmm_one_step,
    gmm_two_step,
    linear_iv_moment,
    mean_moment,
    ols_moment,
    ppml_moment,
    solve_z,
    stacked_init,
    stacked_two_step_moment,
    weighted_mean,
    weighted_ols,
    weighted_ppml,
)
from .variance import (
    VarianceEstimate,
    delta_method_interval,
    graham_variance,
    naive_dyad_robust,
)
from .weights import (
    ObservationWeights,
    UnitDraw,
    draw_exponential_units,
    draw_gamma_units,
    draw_pigeonhole_counts,
    grouped_product_weights,
    multiway_weights,
    product_weights,
    uniform_weights,
    weights_for_draw,
)

__version__ = "0.1.0"
