"""
Custom exceptions for the application.
"""
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .models import SolveResult


class PirlsError(Exception):
    """Base exception for the application."""
    pass


class ConfigurationError(PirlsError):
    """Invalid configuration or command parameters."""
    pass


# Linear algebra

class LinearAlgebraError(PirlsError):
    """Linear-algebra related errors."""
    pass


class RankDeficient(LinearAlgebraError):
    """A normal-equation matrix such as A^T R' A is (numerically) singular."""
    pass


class NotPositiveDefinite(RankDeficient):
    """A Cholesky pivot fell below the pivot floor."""
    pass


class InfeasibleConstraints(LinearAlgebraError):
    """The constraint Schur system C (A^T A)^-1 C^T is not positive definite."""
    pass


class DegenerateConstraint(LinearAlgebraError):
    """g^T A lies in the row space of C, so g^T A dx = i/2 cannot hold with C dx = 0."""
    pass


# Numerics

class NumericalError(PirlsError):
    """Floating-point failures."""
    pass


class NonFinite(NumericalError):
    """A residual, weight or objective is NaN or infinite."""
    pass


class BracketFailure(NumericalError):
    """Line search could not bracket a minimizer."""
    pass


# Solvers

class SolverError(PirlsError):
    """Solver-related errors."""
    pass


class IterationLimitExceeded(SolverError):
    """The iteration cap was reached; ``result`` holds the best iterate so far."""

    def __init__(self, message: str, result: Optional["SolveResult"] = None):
        super().__init__(message)
        self.result = result


class NoConvergence(SolverError):
    """The reference solver did not reach its gradient tolerance."""
    pass


class InvariantViolation(SolverError):
    """A runtime invariant of the iteration was violated."""
    pass


# Instances

class InstanceError(PirlsError):
    """Instance construction and I/O errors."""
    pass


class InvalidInstance(InstanceError):
    """An instance failed validation."""
    pass


class NoUnlabeledVertices(InstanceError):
    """Every vertex of the graph carries a label; nothing to solve for."""
    pass


class ParseError(InstanceError):
    """An instance or solution file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        super().__init__(f"{message} ({', '.join(location)})" if location else message)
        self.line = line
        self.field = field


class DimensionMismatch(InstanceError):
    """Array sizes in an instance do not agree."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(f"{message} (field '{field}')" if field else message)
        self.field = field
