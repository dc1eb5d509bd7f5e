"""
Theoretical constants and bounds of p-IRLS.

Loop constants (lambda, the stopping factor), the iteration and halving
budgets implied by the convergence analysis, the coordinate-wise error
certificate, and an auditor that checks a finished solve against them.
"""
import math
from typing import Optional

import numpy as np
from scipy import linalg

from .models import ProblemInstance, SolveResult

# Initial residual norm at or below this (relative to 1 + ||b||_p) counts as an exact fit.
ABSOLUTE_ZERO_TOL = 1e-11

# Relative gap under which the dual lower bound no longer lowers i; rounding dominates there.
GAP_RESOLUTION = 1e-13

# Calibrated constant K of the iteration ceiling K p^3.5 m^((p-2)/(2(p-1))) ln(m/eps).
ITERATION_CEILING_CONSTANT = 1.0

HALVING_SLACK = 8
OBJECTIVE_SLACK = 1e-12
FEASIBILITY_TOL = 1e-8


def lambda_constant(p: float) -> float:
    """lambda = 16p; fixed by the analysis, never configurable."""
    return 16.0 * p


def stop_factor(p: float, epsilon: float) -> float:
    """The loop runs while stop_factor * objective < i."""
    return epsilon / (16.0 * p * (1.0 + epsilon))


def padding(i: float, p: float, m: int) -> float:
    """s = 1/2 i^((p-2)/p) m^(-(p-2)/p)."""
    exponent = (p - 2.0) / p
    return 0.5 * i**exponent * float(m) ** (-exponent)


def i_floor(p: float, m: int, epsilon: float, initial_objective: float) -> float:
    """Lower bound on i at every loop iteration."""
    return stop_factor(p, epsilon) * initial_objective * float(m) ** (-(p - 2.0) / 2.0)


def halving_budget(p: float, m: int, epsilon: float) -> int:
    return math.ceil(p * math.log2(m / epsilon)) + HALVING_SLACK


def iteration_ceiling(
    p: float, m: int, epsilon: float, constant: float = ITERATION_CEILING_CONSTANT
) -> float:
    return constant * p**3.5 * float(m) ** ((p - 2.0) / (2.0 * (p - 1.0))) * math.log(m / epsilon)


def default_max_iterations(p: float, m: int, epsilon: float, cap: int = 100000) -> int:
    """Ten times the practical bound, so the cap only trips on bugs."""
    log_ratio = math.log(m / epsilon)
    estimate = p**1.5 * float(m) ** ((p - 2.0) / (2.0 * (p - 1.0))) * log_ratio + p * math.log2(m / epsilon)
    return max(1, min(cap, math.ceil(10.0 * estimate)))


def coordinate_error_bound(
    A: Optional[np.ndarray],
    delta: float,
    opt_norm: float,
    sigma_min: Optional[float],
    p: float,
    m: Optional[int] = None,
) -> float:
    """
    Bound on ||x - x*||_inf for a (1 + delta)-approximate x:

        (2 m^(1/2) / sigma_min(A)) (2 delta / m)^(1/p) ||Ax* - b||_p

    ``sigma_min`` and ``m`` are taken from ``A`` when not given.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if sigma_min is None:
        if A is None:
            raise ValueError("need A or sigma_min")
        sigma_min = float(linalg.svdvals(A).min())
    if sigma_min <= 0:
        raise ValueError("sigma_min must be positive")
    if m is None:
        if A is None:
            raise ValueError("need A or m")
        m = A.shape[0]
    return 2.0 * math.sqrt(m) / sigma_min * (2.0 * delta / m) ** (1.0 / p) * opt_norm


def epsilon_for_coordinate_accuracy(target: float, sigma_min: float, m: int, p: float) -> float:
    """Objective accuracy delta = (target sigma_min / (4m))^p giving ||x - x*||_inf <= target ||Ax* - b||_p."""
    return (target * sigma_min / (4.0 * m)) ** p


def audit_result(
    result: SolveResult,
    instance: ProblemInstance,
    epsilon: float,
    ceiling_constant: float = ITERATION_CEILING_CONSTANT,
) -> list[str]:
    """Check a finished solve against the loop invariants; returns the violations found."""
    p, m = instance.p, instance.m
    violations: list[str] = []

    previous = result.initial_objective
    slack = OBJECTIVE_SLACK * result.initial_objective
    for entry in result.trace:
        if entry.objective > previous + slack:
            violations.append(f"objective increased at iteration {entry.iteration}: {previous} -> {entry.objective}")
        previous = entry.objective

    floor = i_floor(p, m, epsilon, result.initial_objective)
    previous_i = math.inf
    for entry in result.trace:
        if entry.i > previous_i * (1.0 + 1e-12):
            violations.append(f"i increased at iteration {entry.iteration}")
        if entry.i < floor * (1.0 - 1e-9):
            violations.append(f"i = {entry.i:.3e} below its floor {floor:.3e} at iteration {entry.iteration}")
        previous_i = entry.i

    if result.halvings > len(result.trace):
        violations.append("more halvings than iterations")
    if result.halvings > halving_budget(p, m, epsilon):
        violations.append(f"{result.halvings} halvings exceed the budget {halving_budget(p, m, epsilon)}")
    if result.iterations > iteration_ceiling(p, m, epsilon, ceiling_constant):
        violations.append(f"{result.iterations} iterations exceed the ceiling")

    if instance.has_constraints:
        violation = float(np.max(np.abs(instance.C @ result.x - instance.d)))
        if violation > FEASIBILITY_TOL * (1.0 + float(np.max(np.abs(instance.d)))):
            violations.append(f"constraint violation {violation:.3e}")

    return violations
