"""
Test the theoretical bounds and the result auditor.
"""
import math

import pytest

from .bounds import (
    audit_result,
    coordinate_error_bound,
    default_max_iterations,
    epsilon_for_coordinate_accuracy,
    halving_budget,
    i_floor,
    iteration_ceiling,
    lambda_constant,
    padding,
)
from .models import ProblemInstance, SolveResult, TraceEntry


def test_constants():
    assert lambda_constant(4.0) == 64.0
    assert padding(1.0 / 32.0, 2.0, 1) == 0.5
    assert halving_budget(2.0, 1000, 1e-8) == math.ceil(2 * math.log2(1e11)) + 8


def test_coordinate_error_bound_substitution():
    assert coordinate_error_bound(None, 1.0, 1.0, 1.0, 2.0, 2) == pytest.approx(2 * math.sqrt(2))


def test_coordinate_error_bound_power_law():
    base = coordinate_error_bound(None, 1e-6, 3.0, 0.5, 4.0, 100)
    doubled = coordinate_error_bound(None, 2e-6, 3.0, 0.5, 4.0, 100)
    assert doubled / base == pytest.approx(2 ** 0.25)
    assert coordinate_error_bound(None, 1e-300, 3.0, 0.5, 4.0, 100) < 1e-70


def test_coordinate_error_bound_from_matrix():
    import numpy as np

    A = np.diag([3.0, 2.0])
    assert coordinate_error_bound(A, 1.0, 1.0, None, 2.0) == pytest.approx(2 * math.sqrt(2) / 2.0)
    with pytest.raises(ValueError):
        coordinate_error_bound(None, 0.0, 1.0, 1.0, 2.0, 2)


def test_epsilon_for_coordinate_accuracy_inverts_bound():
    delta = epsilon_for_coordinate_accuracy(1e-3, 0.5, 100, 4.0)
    assert delta == pytest.approx((1e-3 * 0.5 / 400) ** 4)
    # (2 delta / m)^(1/p) 2 sqrt(m) / sigma stays below the target
    assert coordinate_error_bound(None, delta, 1.0, 0.5, 4.0, 100) <= 1e-3


def test_iteration_budgets_grow_with_accuracy():
    assert iteration_ceiling(8.0, 400, 1e-10) > iteration_ceiling(8.0, 400, 1e-4)
    assert default_max_iterations(8.0, 400, 1e-10) >= default_max_iterations(8.0, 400, 1e-4)
    assert default_max_iterations(50.0, 10**6, 1e-12, cap=500) == 500


def _result(objectives, i_values, halved, **extra):
    trace = tuple(
        TraceEntry(iteration=k + 1, objective=o, i=i, alpha=0.1, halved=h)
        for k, (o, i, h) in enumerate(zip(objectives, i_values, halved))
    )
    fields = dict(
        x=[0.5],
        objective=objectives[-1],
        iterations=len(trace),
        halvings=sum(halved),
        trace=trace,
        converged=True,
        final_i=i_values[-1] / 2,
        initial_objective=1.0,
    )
    fields.update(extra)
    return SolveResult(**fields)


def test_audit_flags_objective_increase_and_i_growth():
    instance = ProblemInstance(A=[[1.0], [1.0]], b=[0.0, 1.0], p=4.0)
    good = _result([0.9, 0.8], [1.0 / 64, 1.0 / 128], [True, True])
    assert audit_result(good, instance, 1e-2) == []

    bad = _result([0.9, 0.95], [1.0 / 128, 1.0 / 64], [False, False])
    violations = audit_result(bad, instance, 1e-2)
    assert any("objective increased" in message for message in violations)
    assert any("i increased" in message for message in violations)


def test_audit_flags_i_below_floor():
    instance = ProblemInstance(A=[[1.0], [1.0]], b=[0.0, 1.0], p=4.0)
    floor = i_floor(4.0, 2, 1e-2, 1.0)
    result = _result([0.9], [floor / 10], [True])
    assert any("below its floor" in message for message in audit_result(result, instance, 1e-2))
