"""Simulation and verification of first-passage functionals of strictly
stable processes with index in (1, 2]: exact samplers, a grid-skeleton
path engine, closed-form laws, and one runnable check per identity.
"""

from .estimators import (
    CensoringError,
    Estimate,
    conditional_lt_limit,
    f_lambda_density,
    joint_lt_lhs,
    joint_lt_rhs,
    limit_law_cdf,
    randomized_level_rhs,
)
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    VerificationReport,
    estimate_constants,
)
from .laws import (
    AsymptoticConstants,
    asymptotic_small_lambda,
    kx_pdf,
    kx_small_h_constant,
    overshoot_cdf,
    overshoot_pdf,
)
from .params import StableParams, make_params, rho_to_skewness, skewness_to_rho
from .paths import (
    AcceptanceFloorError,
    PassageBatch,
    PassageSample,
    SkeletonConfig,
    SupremumSample,
    conditioned_passage_batch,
    conditioned_passage_ladder,
    first_passage,
    first_passage_batch,
    sample_conditioned_passage,
    supremum_at,
    supremum_at_exp,
    supremum_exp_batch,
    supremum_fixed_batch,
)
from .reports import emit, load_report
from .rng import RngStream
from .samplers import (
    sample_beta,
    sample_exponential,
    sample_overshoot_exact,
    sample_stable_increment,
    standard_stable,
)
from .stats import (
    EmpiricalDistribution,
    bootstrap_ci,
    ecdf,
    ks_one_sample,
    ks_two_sample,
    loglog_fit,
    max_cdf_jump,
    mean_ci,
)

__version__ = "0.1.0"
