"""holderopt: universal first-order convex optimization driven by
gradient-variation online learning, with an experiment CLI."""

from .core_math import (
    AllSpace,
    Ball,
    Box,
    ConvexityError,
    DimensionMismatch,
    Domain,
    as_vector,
    axpy,
    bregman_divergence,
    inner,
    norm,
    project,
)
from .problems import (
    BudgetExhausted,
    GradientOracle,
    Objective,
    OnlineSequence,
    finite_difference_gradient,
    make_holder_power,
    make_nonsmooth,
    make_online_sequence,
    make_quadratic,
    verify_holder,
    verify_inexact_smoothness,
)
from .online_learners import (
    AdaGradSchedule,
    ConstantSchedule,
    OptimisticOGD,
    ProtocolError,
    StronglyConvexSchedule,
    one_step_update,
    run_online_convex,
    run_online_strongly_convex,
)
from .conversion import (
    ProjectedGradientLearner,
    WeightedRunningAverage,
    o2b_run,
    universal_convex_optimize,
    weighted_regret,
)
from .strongly_convex import (
    empirical_smoothness,
    grid_search_minimize,
    guess_check_run,
    minimize_known_smoothness,
    minimize_unknown_smoothness,
    minimize_with_safeguard,
    safeguard_ratio_floor,
)
from .metrics import (
    GeometricRateFit,
    RegretReport,
    VariationReport,
    geometric_rate,
    ghat_max,
    gradient_variation,
    loglog_slope,
    regret,
    regret_at,
    regret_series,
    suboptimality,
)

__version__ = "0.1.0"
