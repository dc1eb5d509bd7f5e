"""
pirls - lp-norm regression by iteratively reweighted least squares.

A p-IRLS solver for min ||Ax - b||_p subject to Cx = d with random matrix
and k-NN graph p-Laplacian instance generators, a first-order verifier and
a command-line interface for solving, generating and sweeping.
"""

__version__ = "0.1.0"
__author__ = "ShazilK47"

from .config import settings
from .core import (
    GraphInstance,
    ProblemInstance,
    SolveResult,
    SolverConfig,
    constrained_l2_min,
    p_irls,
    reference_solve,
    verify_first_order,
)
from .instances import generator_registry, graph_to_regression
from .services import solve_service, sweep_service

__all__ = [
    "settings",
    "GraphInstance",
    "ProblemInstance",
    "SolveResult",
    "SolverConfig",
    "constrained_l2_min",
    "p_irls",
    "reference_solve",
    "verify_first_order",
    "generator_registry",
    "graph_to_regression",
    "solve_service",
    "sweep_service",
]
