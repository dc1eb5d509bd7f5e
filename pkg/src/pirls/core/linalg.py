"""
Dense linear algebra for the solver.

Cholesky factorization with rank detection, and the two equality-constrained
least-squares closed forms used by p-IRLS: the initial point
argmin_{Cx=d} ||Ax - b||_2 and the per-iteration step
argmin dx^T A^T R' A dx subject to g^T A dx = i/2, C dx = 0. Both are
solved by factoring the n x n normal matrix once and then the small
(c or c+1 square) Schur complement of the constraints. Normal matrices of
mostly-zero designs (graph incidences) are assembled through scipy.sparse
before the dense factorization.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg, sparse

from .exceptions import (
    DegenerateConstraint,
    InfeasibleConstraints,
    LinearAlgebraError,
    NonFinite,
    NotPositiveDefinite,
)

PIVOT_FLOOR = 1e-12
SYMMETRY_RTOL = 1e-12
# Designs with at most this fraction of nonzeros get a sparse Gram product.
SPARSE_DENSITY = 0.1


@dataclass(frozen=True)
class SpdFactorization:
    """
    Cholesky factor of a symmetric positive-definite M.

    With ``scaling`` set to D^-1/2 (D = diag M), ``lower`` factors the
    equilibrated D^-1/2 M D^-1/2 and solves undo the scaling.
    """

    lower: np.ndarray
    scaling: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return self.lower.shape[0]

    def solve(self, y: np.ndarray) -> np.ndarray:
        """Solve M z = y for a vector or a matrix of right-hand sides."""
        if self.scaling is None:
            return linalg.cho_solve((self.lower, True), y, check_finite=False)
        scaling = self.scaling if np.ndim(y) == 1 else self.scaling[:, None]
        return scaling * linalg.cho_solve((self.lower, True), scaling * y, check_finite=False)

    def reconstruct(self) -> np.ndarray:
        product = self.lower @ self.lower.T
        if self.scaling is None:
            return product
        inverse = 1.0 / self.scaling
        return inverse[:, None] * product * inverse[None, :]


def _symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def weighted_gram(A: np.ndarray, weights: Optional[np.ndarray] = None) -> np.ndarray:
    """A^T diag(weights) A as a dense symmetric array (A^T A without weights)."""
    if A.size and np.count_nonzero(A) <= SPARSE_DENSITY * A.size:
        design = sparse.csr_matrix(A)
        weighted = design if weights is None else sparse.diags(weights) @ design
        return _symmetrize((design.T @ weighted).toarray())
    weighted = A if weights is None else weights[:, None] * A
    return _symmetrize(A.T @ weighted)


def cholesky(matrix: np.ndarray, pivot_floor: float = PIVOT_FLOOR, equilibrate: bool = False) -> SpdFactorization:
    """
    Factor a symmetric positive-definite matrix.

    A pivot is rejected when it is at most ``pivot_floor`` times the
    largest diagonal entry. With ``equilibrate`` the matrix is first
    scaled to D^-1/2 M D^-1/2, whose diagonal is all ones, and the same
    rule is applied there; the solver factors this way so that the
    test does not depend on the diagonal row weights it applies.

    Raises:
        LinearAlgebraError: input not square or not symmetric
        NonFinite: input has NaN/inf entries
        NotPositiveDefinite: a pivot falls below the floor
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise LinearAlgebraError(f"Cholesky needs a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise NonFinite("Cholesky input has non-finite entries")
    if matrix.size == 0:
        return SpdFactorization(lower=np.zeros((0, 0)))

    scale = np.max(np.abs(matrix))
    if np.max(np.abs(matrix - matrix.T)) > SYMMETRY_RTOL * scale:
        raise LinearAlgebraError("Cholesky input is not symmetric")

    diagonal = np.diag(matrix)
    if np.any(diagonal <= 0):
        raise NotPositiveDefinite(f"non-positive diagonal entry {diagonal.min():.3e}")

    scaling = None
    if equilibrate:
        scaling = 1.0 / np.sqrt(diagonal)
        matrix = _symmetrize(scaling[:, None] * matrix * scaling[None, :])
        diagonal = np.diag(matrix)
    try:
        lower = linalg.cholesky(matrix, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"matrix is not positive definite: {exc}") from exc

    pivots = np.diag(lower) ** 2
    worst = int(np.argmin(pivots))
    threshold = pivot_floor * float(diagonal.max())
    if pivots[worst] <= threshold:
        raise NotPositiveDefinite(
            f"pivot {worst} is {pivots[worst]:.3e}, at most {pivot_floor:.0e} times the largest diagonal"
        )
    return SpdFactorization(lower=lower, scaling=scaling)


def _has_constraints(C: Optional[np.ndarray]) -> bool:
    return C is not None and C.shape[0] > 0


class ConstrainedLeastSquares:
    """
    argmin_{Cx = d} ||Ax - y||_2 for any number of right-hand sides.

    A^T A and the Schur complement C (A^T A)^-1 C^T are factored once,
    so each solve costs two products with A and a few triangular solves.

    Raises:
        RankDeficient: A lacks full column rank
        InfeasibleConstraints: the Schur system is not positive definite
    """

    def __init__(self, A: np.ndarray, C: Optional[np.ndarray] = None, pivot_floor: float = PIVOT_FLOOR):
        self.A = A
        self.C = C if _has_constraints(C) else None
        self._normal = cholesky(weighted_gram(A), pivot_floor, equilibrate=True)
        self._Y: Optional[np.ndarray] = None
        self._schur: Optional[SpdFactorization] = None
        if self.C is not None:
            self._Y = self._normal.solve(self.C.T)
            try:
                self._schur = cholesky(_symmetrize(self.C @ self._Y), pivot_floor, equilibrate=True)
            except NotPositiveDefinite as exc:
                raise InfeasibleConstraints(f"constraints are rank deficient or inconsistent: {exc}") from exc

    def solve(self, y: np.ndarray, d: Optional[np.ndarray] = None) -> np.ndarray:
        """The minimizer; ``d`` defaults to zero when constraints are present."""
        x = self._normal.solve(self.A.T @ y)
        if self.C is None:
            return x
        if d is None:
            d = np.zeros(self.C.shape[0])
        elif d.shape != (self.C.shape[0],):
            raise LinearAlgebraError("constraint right-hand side d does not match C")
        return x + self._Y @ self._schur.solve(d - self.C @ x)

    def residual(self, y: np.ndarray) -> np.ndarray:
        """y - A w for w = argmin_{Cw = 0} ||Aw - y||_2, so A^T of the result lies in range(C^T)."""
        return y - self.A @ self.solve(y)


def constrained_l2_min(
    A: np.ndarray,
    b: np.ndarray,
    C: Optional[np.ndarray] = None,
    d: Optional[np.ndarray] = None,
    pivot_floor: float = PIVOT_FLOOR,
) -> np.ndarray:
    """
    argmin_{Cx = d} ||Ax - b||_2 via the Lagrangian closed form

        x = (A^T A)^-1 (A^T b + C^T (C (A^T A)^-1 C^T)^-1 (d - C (A^T A)^-1 A^T b)).

    With C absent (or 0 x n) this is the ordinary least-squares solution.

    Raises:
        RankDeficient: A lacks full column rank
        InfeasibleConstraints: the Schur system is not positive definite
    """
    solver = ConstrainedLeastSquares(A, C, pivot_floor)
    if solver.C is not None and d is None:
        raise LinearAlgebraError("constraint right-hand side d does not match C")
    return solver.solve(b, d)


def quadratic_subproblem(
    A: np.ndarray,
    r_weights: np.ndarray,
    g: np.ndarray,
    C: Optional[np.ndarray],
    i: float,
    pivot_floor: float = PIVOT_FLOOR,
) -> np.ndarray:
    """
    argmin dx^T A^T R' A dx subject to g^T A dx = i/2 and C dx = 0.

    ``r_weights`` is the diagonal of R' = R + sI. The two constraints are
    stacked as C' = [C; g^T A], d' = [0; i/2] and the step is

        dx = (A^T R' A)^-1 C'^T (C' (A^T R' A)^-1 C'^T)^-1 d'.

    Raises:
        RankDeficient: A^T R' A is singular
        DegenerateConstraint: g^T A vanishes on the null space of C
    """
    if np.any(r_weights <= 0):
        raise LinearAlgebraError("subproblem weights must be positive")
    if i <= 0:
        raise LinearAlgebraError(f"refinement scale must be positive, got {i}")

    gA = A.T @ g
    if not np.any(gA):
        raise DegenerateConstraint("g^T A is identically zero")

    normal = cholesky(weighted_gram(A, r_weights), pivot_floor, equilibrate=True)
    if _has_constraints(C):
        stacked = np.vstack([C, gA[None, :]])
        rhs = np.zeros(C.shape[0] + 1)
    else:
        stacked = gA[None, :]
        rhs = np.zeros(1)
    rhs[-1] = 0.5 * i

    Y = normal.solve(stacked.T)
    try:
        schur = cholesky(_symmetrize(stacked @ Y), pivot_floor, equilibrate=True)
    except NotPositiveDefinite as exc:
        raise DegenerateConstraint(f"g^T A lies in the row space of C: {exc}") from exc

    step = Y @ schur.solve(rhs)
    if not np.all(np.isfinite(step)):
        raise DegenerateConstraint("subproblem step is not finite")
    return step
