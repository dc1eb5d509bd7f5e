"""
Core module for pirls.
Contains the domain models, dense linear algebra, the p-IRLS solver and its correctness references.
"""
from .exceptions import (
    PirlsError,
    ConfigurationError,
    LinearAlgebraError,
    RankDeficient,
    NotPositiveDefinite,
    InfeasibleConstraints,
    DegenerateConstraint,
    NumericalError,
    NonFinite,
    BracketFailure,
    SolverError,
    IterationLimitExceeded,
    NoConvergence,
    InvariantViolation,
    InstanceError,
    InvalidInstance,
    NoUnlabeledVertices,
    ParseError,
    DimensionMismatch,
)
from .models import (
    GraphInstance,
    IterationState,
    OptimalityCertificate,
    ProblemInstance,
    ProgressCheckReport,
    SolveResult,
    SolverConfig,
    SweepSpec,
    TraceEntry,
)
from .linalg import (
    ConstrainedLeastSquares,
    SpdFactorization,
    cholesky,
    constrained_l2_min,
    quadratic_subproblem,
    weighted_gram,
)
from .solver import (
    approximation_ratio,
    iteration_state,
    line_search,
    lp_norm_pow,
    lp_objective,
    p_irls,
    progress_check,
    residual_value,
)
from .oracle import reference_solve, scalar_reference_solve, verify_first_order

__all__ = [
    "PirlsError",
    "ConfigurationError",
    "LinearAlgebraError",
    "RankDeficient",
    "NotPositiveDefinite",
    "InfeasibleConstraints",
    "DegenerateConstraint",
    "NumericalError",
    "NonFinite",
    "BracketFailure",
    "SolverError",
    "IterationLimitExceeded",
    "NoConvergence",
    "InvariantViolation",
    "InstanceError",
    "InvalidInstance",
    "NoUnlabeledVertices",
    "ParseError",
    "DimensionMismatch",
    "GraphInstance",
    "IterationState",
    "OptimalityCertificate",
    "ProblemInstance",
    "ProgressCheckReport",
    "SolveResult",
    "SolverConfig",
    "SweepSpec",
    "TraceEntry",
    "ConstrainedLeastSquares",
    "SpdFactorization",
    "cholesky",
    "constrained_l2_min",
    "quadratic_subproblem",
    "weighted_gram",
    "approximation_ratio",
    "iteration_state",
    "line_search",
    "lp_norm_pow",
    "lp_objective",
    "p_irls",
    "progress_check",
    "residual_value",
    "reference_solve",
    "scalar_reference_solve",
    "verify_first_order",
]
