"""
Test the dense linear algebra module.
"""
import numpy as np
import pytest

from .linalg import ConstrainedLeastSquares, cholesky, constrained_l2_min, quadratic_subproblem, weighted_gram
from .exceptions import (
    DegenerateConstraint,
    InfeasibleConstraints,
    LinearAlgebraError,
    NotPositiveDefinite,
    RankDeficient,
)


def test_cholesky_identity():
    factor = cholesky(np.eye(2))
    np.testing.assert_allclose(factor.solve(np.array([3.0, -1.0])), [3.0, -1.0])
    assert factor.size == 2


def test_cholesky_hand_example():
    factor = cholesky(np.array([[4.0, 2.0], [2.0, 3.0]]))
    np.testing.assert_allclose(factor.solve(np.array([2.0, 3.0])), [0.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(factor.lower, [[2.0, 0.0], [1.0, np.sqrt(2.0)]])


def test_cholesky_random_spd_multiply_back():
    rng = np.random.default_rng(7)
    for _ in range(20):
        G = rng.standard_normal((10, 10))
        M = G.T @ G + np.eye(10)
        y = rng.standard_normal(10)
        factor = cholesky(M)
        z = factor.solve(y)
        assert np.max(np.abs(M @ z - y)) / np.max(np.abs(y)) <= 1e-10
        np.testing.assert_allclose(factor.reconstruct(), M, rtol=1e-10, atol=1e-10 * np.max(np.abs(M)))


def test_cholesky_matrix_right_hand_side():
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    Y = np.eye(2)
    np.testing.assert_allclose(M @ cholesky(M).solve(Y), Y, atol=1e-14)


def test_cholesky_rejects_singular():
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.array([[1.0, 0.0], [0.0, 0.0]]))
    # NotPositiveDefinite is how rank deficiency of A^T R' A surfaces
    with pytest.raises(RankDeficient):
        cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_cholesky_rejects_asymmetric_and_non_square():
    with pytest.raises(LinearAlgebraError):
        cholesky(np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(LinearAlgebraError):
        cholesky(np.ones((2, 3)))


def test_pivot_floor_is_relative_to_largest_diagonal():
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.diag([1.0, 1e-13]))
    cholesky(np.diag([1.0, 1e-11]))
    cholesky(1e-200 * np.diag([1.0, 1e-11]))


def test_equilibrated_factorization_accepts_badly_scaled_columns():
    M = np.diag([1.0, 1e-13])
    M[0, 1] = M[1, 0] = 1e-7
    factor = cholesky(M, equilibrate=True)
    z = np.array([1.0, 2.0])
    np.testing.assert_allclose(factor.solve(M @ z), z, rtol=1e-8)
    np.testing.assert_allclose(factor.solve(np.column_stack([M @ z, M @ z])), np.column_stack([z, z]), rtol=1e-8)
    np.testing.assert_allclose(factor.reconstruct(), M, rtol=1e-12, atol=1e-25)


def test_pivot_floor_ignores_row_weights_when_equilibrated():
    rng = np.random.default_rng(3)
    A = rng.random((30, 5))
    column_scales = 10.0 ** np.arange(0, -20, -4)
    weights = 10.0 ** rng.uniform(-6, 0, size=30)
    cholesky((A * column_scales).T @ (weights[:, None] * (A * column_scales)), equilibrate=True)
    with pytest.raises(NotPositiveDefinite):
        cholesky((A * column_scales).T @ (A * column_scales))


def test_weighted_gram_sparse_and_dense_agree():
    rng = np.random.default_rng(4)
    incidence = np.zeros((60, 40))
    for row in range(60):
        u, v = rng.choice(40, size=2, replace=False)
        incidence[row, u], incidence[row, v] = 1.0, -1.0
    weights = rng.uniform(0.1, 2.0, size=60)
    np.testing.assert_allclose(
        weighted_gram(incidence, weights), incidence.T @ (weights[:, None] * incidence), atol=1e-14
    )
    np.testing.assert_allclose(weighted_gram(incidence), incidence.T @ incidence, atol=1e-14)


def test_constrained_least_squares_reuses_factorization():
    rng = np.random.default_rng(6)
    A = rng.standard_normal((15, 4))
    C = rng.standard_normal((2, 4))
    solver = ConstrainedLeastSquares(A, C)
    for _ in range(3):
        b, d = rng.standard_normal(15), rng.standard_normal(2)
        np.testing.assert_allclose(solver.solve(b, d), constrained_l2_min(A, b, C, d), atol=1e-12)

    y = rng.standard_normal(15)
    projected = solver.residual(y)
    multipliers = np.linalg.lstsq(C.T, A.T @ projected, rcond=None)[0]
    assert np.max(np.abs(A.T @ projected - C.T @ multipliers)) <= 1e-10
    assert np.max(np.abs(C @ solver.solve(y))) <= 1e-10


def test_least_squares_identity():
    np.testing.assert_allclose(constrained_l2_min(np.eye(3), np.array([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])


def test_constrained_feasible_optimum():
    x = constrained_l2_min(np.eye(2), np.array([1.0, 1.0]), np.array([[1.0, -1.0]]), np.array([0.0]))
    np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-14)


def test_constrained_hand_example():
    x = constrained_l2_min(np.eye(2), np.array([2.0, 0.0]), np.array([[1.0, 1.0]]), np.array([0.0]))
    np.testing.assert_allclose(x, [1.0, -1.0], atol=1e-14)


def test_constrained_postconditions_random():
    rng = np.random.default_rng(11)
    for _ in range(10):
        A = rng.standard_normal((15, 6))
        b = rng.standard_normal(15)
        C = rng.standard_normal((2, 6))
        d = rng.standard_normal(2)
        x = constrained_l2_min(A, b, C, d)
        assert np.max(np.abs(C @ x - d)) <= 1e-9 * (1 + np.max(np.abs(d)))

        gradient = A.T @ (A @ x - b)
        multipliers = np.linalg.lstsq(C.T, gradient, rcond=None)[0]
        projected = gradient - C.T @ multipliers
        assert np.max(np.abs(projected)) <= 1e-8 * (1 + np.max(np.abs(A.T @ b)))


def test_empty_constraints_match_unconstrained():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((8, 3))
    b = rng.standard_normal(8)
    np.testing.assert_array_equal(
        constrained_l2_min(A, b),
        constrained_l2_min(A, b, np.zeros((0, 3)), np.zeros(0)),
    )


def test_rank_deficient_design():
    A = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
    with pytest.raises(RankDeficient):
        constrained_l2_min(A, np.ones(3))


def test_inconsistent_constraints():
    C = np.array([[1.0, 1.0], [2.0, 2.0]])
    with pytest.raises(InfeasibleConstraints):
        constrained_l2_min(np.eye(2), np.ones(2), C, np.array([0.0, 1.0]))


def test_subproblem_hyperplane_projection():
    step = quadratic_subproblem(np.eye(2), np.ones(2), np.array([1.0, 0.0]), None, 2.0)
    np.testing.assert_allclose(step, [1.0, 0.0], atol=1e-14)


def test_subproblem_weighted():
    step = quadratic_subproblem(np.eye(2), np.array([1.0, 4.0]), np.array([1.0, 1.0]), None, 2.0)
    np.testing.assert_allclose(step, [0.8, 0.2], atol=1e-14)


def test_subproblem_with_constraint():
    step = quadratic_subproblem(np.eye(2), np.ones(2), np.array([1.0, 1.0]), np.array([[1.0, -1.0]]), 2.0)
    np.testing.assert_allclose(step, [0.5, 0.5], atol=1e-14)


def test_subproblem_constraints_and_optimality_random():
    rng = np.random.default_rng(2)
    for _ in range(10):
        n, c = rng.integers(2, 7), rng.integers(0, 2)
        c = min(c, n - 1)
        A = rng.standard_normal((12, n))
        weights = rng.uniform(0.1, 2.0, size=12)
        g = rng.standard_normal(12)
        C = rng.standard_normal((c, n)) if c else None
        i = 0.7
        step = quadratic_subproblem(A, weights, g, C, i)

        gA = A.T @ g
        assert abs(gA @ step - i / 2) <= 1e-8 * i
        if C is not None:
            assert np.max(np.abs(C @ step)) <= 1e-9

        # No feasible point has a smaller quadratic form.
        M = A.T @ (weights[:, None] * A)
        value = step @ M @ step
        rows = gA[None, :] if C is None else np.vstack([C, gA[None, :]])
        rhs = np.zeros(rows.shape[0])
        rhs[-1] = i / 2
        particular = np.linalg.lstsq(rows, rhs, rcond=None)[0]
        basis = np.linalg.svd(rows)[2][rows.shape[0]:].T
        for _ in range(1000):
            point = particular + basis @ rng.standard_normal(basis.shape[1])
            assert value <= (1 + 1e-6) * (point @ M @ point)


def test_subproblem_degenerate_gradient():
    with pytest.raises(DegenerateConstraint):
        quadratic_subproblem(np.eye(2), np.ones(2), np.zeros(2), None, 1.0)
    # g^T A parallel to the constraint row
    with pytest.raises(DegenerateConstraint):
        quadratic_subproblem(np.eye(2), np.ones(2), np.array([1.0, 1.0]), np.array([[1.0, 1.0]]), 1.0)
