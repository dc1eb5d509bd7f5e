"""
Correctness references for the solver.

A first-order optimality check and a slow damped-Newton reference solver
that shares nothing with p-IRLS beyond the objective itself. Both are for
tests and acceptance runs on small instances.
"""

import numpy as np
from scipy import linalg

from ..config.logging import get_logger
from .exceptions import InfeasibleConstraints, NoConvergence, RankDeficient
from .models import OptimalityCertificate, ProblemInstance
from .solver import lp_norm, lp_norm_pow

logger = get_logger(__name__)

MAX_NEWTON_STEPS = 10000
MIN_STEP = 2.0**-60
MAX_BISECTIONS = 200
RANK_RTOL = 1e-12


def _gradient(A: np.ndarray, residual: np.ndarray, p: float) -> np.ndarray:
    return A.T @ (p * np.abs(residual) ** (p - 2.0) * residual)


def verify_first_order(
    instance: ProblemInstance,
    x: np.ndarray,
    tol_g: float = 1e-8,
    tol_c: float = 1e-8,
) -> OptimalityCertificate:
    """
    Check that the gradient of ||Ax - b||_p^p vanishes on null(C) at x.

    The gradient is projected onto null(C) by subtracting its least-squares
    fit against C^T. Both reported norms are relative:
    ||proj grad||_inf / (1 + objective) and ||Cx - d||_inf / (1 + ||d||_inf).
    """
    x = np.asarray(x, dtype=np.float64)
    residual = instance.A @ x - instance.b
    objective = lp_norm_pow(residual, instance.p)
    gradient = _gradient(instance.A, residual, instance.p)

    violation = 0.0
    if instance.has_constraints:
        coefficients = linalg.lstsq(instance.C.T, gradient)[0]
        gradient = gradient - instance.C.T @ coefficients
        violation = float(np.max(np.abs(instance.C @ x - instance.d))) / (
            1.0 + float(np.max(np.abs(instance.d)))
        )

    projected = float(np.max(np.abs(gradient), initial=0.0)) / (1.0 + objective)
    return OptimalityCertificate(
        projected_gradient_norm=projected,
        constraint_violation=violation,
        objective=objective,
        passed=projected <= tol_g and violation <= tol_c,
        tol_g=tol_g,
        tol_c=tol_c,
    )


def _scalar_slope(a: np.ndarray, b: np.ndarray, z: float, p: float) -> float:
    # sign of d/dz sum |a z - b|^p, computed on residuals scaled to max 1
    residual = a * z - b
    peak = float(np.max(np.abs(residual), initial=0.0))
    if peak == 0.0:
        return 0.0
    u = residual / peak
    return float(np.sum(a * np.abs(u) ** (p - 2.0) * u))


def scalar_reference_solve(a: np.ndarray, b: np.ndarray, p: float) -> float:
    """
    argmin_z sum_j |a_j z - b_j|^p by bisection on the derivative.

    Every minimizer lies between the smallest and largest ratio b_j / a_j
    over a_j != 0, so that interval brackets the root.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    active = a != 0.0
    if not np.any(active):
        raise RankDeficient("scalar design vector is zero")
    ratios = b[active] / a[active]
    lo, hi = float(ratios.min()), float(ratios.max())

    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        slope = _scalar_slope(a, b, mid, p)
        if slope < 0.0:
            lo = mid
        elif slope > 0.0:
            hi = mid
        else:
            return mid
    return 0.5 * (lo + hi)


def _feasible_parametrization(instance: ProblemInstance) -> tuple[np.ndarray, np.ndarray]:
    """x_feas and an orthonormal basis N of null(C), so that {Cx = d} = {x_feas + N z}."""
    n = instance.n
    if not instance.has_constraints:
        return np.zeros(n), np.eye(n)

    C, d = instance.C, instance.d
    Q, R, _ = linalg.qr(C.T, pivoting=True)
    diagonal = np.abs(np.diag(R))
    rank = int(np.sum(diagonal > RANK_RTOL * diagonal[0])) if diagonal.size and diagonal[0] > 0 else 0
    x_feas = linalg.lstsq(C, d)[0]
    if np.max(np.abs(C @ x_feas - d)) > 1e-9 * (1.0 + np.max(np.abs(d))):
        raise InfeasibleConstraints("Cx = d has no solution")
    return x_feas, Q[:, rank:]


def reference_solve(
    instance: ProblemInstance,
    target_gradient_tol: float = 1e-9,
    max_steps: int = MAX_NEWTON_STEPS,
) -> np.ndarray:
    """
    Minimize ||Ax - b||_p^p over Cx = d by damped Newton.

    Works on the reduced problem in z with x = x_feas + N z. The Hessian
    p(p-1) A^T R A is regularized by mu I with mu starting at
    1e-6 trace(A^T A) / n and shrinking tenfold after every accepted step;
    steps are halved from 1 down to 2^-60 until the objective decreases.
    Stops once verify_first_order passes at ``target_gradient_tol`` and
    the gradient of the problem rescaled to unit starting objective is
    that small as well.

    Raises:
        NoConvergence: tolerance not reached within ``max_steps`` steps
        RankDeficient: A N lacks full column rank
    """
    p = instance.p
    x_feas, N = _feasible_parametrization(instance)
    if N.shape[1] == 0:
        return x_feas

    A_reduced = instance.A @ N
    b_reduced = instance.b - instance.A @ x_feas

    if N.shape[1] == 1:
        z = np.array([scalar_reference_solve(A_reduced[:, 0], b_reduced, p)])
        return x_feas + N @ z

    z = linalg.lstsq(A_reduced, b_reduced)[0]
    # Normalize so the starting objective is 1.
    scale = lp_norm(A_reduced @ z - b_reduced, p)
    if scale == 0.0:
        return x_feas + N @ z
    b_scaled = b_reduced / scale
    z = z / scale

    def certified(z_scaled: np.ndarray) -> bool:
        # gradient small both in caller units and on the problem scaled to unit objective
        residual = A_reduced @ z_scaled - b_scaled
        normalized = float(np.max(np.abs(_gradient(A_reduced, residual, p)))) / (1.0 + lp_norm_pow(residual, p))
        if normalized > target_gradient_tol:
            return False
        return verify_first_order(instance, x_feas + N @ (z_scaled * scale), target_gradient_tol, 1e-8).passed

    if certified(z):
        return x_feas + N @ (z * scale)

    gram = A_reduced.T @ A_reduced
    mu = 1e-6 * np.trace(gram) / gram.shape[0]
    mu_floor = 1e-30 * np.trace(gram)

    for step in range(max_steps):
        residual = A_reduced @ z - b_scaled
        objective = lp_norm_pow(residual, p)
        gradient = _gradient(A_reduced, residual, p)
        hessian = p * (p - 1.0) * A_reduced.T @ (np.abs(residual)[:, None] ** (p - 2.0) * A_reduced)

        accepted = False
        while not accepted:
            try:
                factor = linalg.cho_factor(hessian + mu * np.eye(hessian.shape[0]))
            except linalg.LinAlgError as exc:
                raise RankDeficient(f"reduced Hessian is singular: {exc}") from exc
            direction = -linalg.cho_solve(factor, gradient)

            t = 1.0
            while t >= MIN_STEP:
                candidate = z + t * direction
                candidate_residual = A_reduced @ candidate - b_scaled
                candidate_objective = lp_norm_pow(candidate_residual, p)
                if candidate_objective < objective or (
                    candidate_objective <= objective * (1.0 + 4.0 * np.finfo(float).eps)
                    and np.max(np.abs(_gradient(A_reduced, candidate_residual, p))) < np.max(np.abs(gradient))
                ):
                    accepted = True
                    break
                t *= 0.5

            if not accepted:
                if certified(z):
                    return x_feas + N @ (z * scale)
                mu *= 10.0
                if mu > 1e12 * np.trace(gram):
                    raise NoConvergence(f"no descent step after {step} Newton steps")

        z = candidate
        mu = max(mu * 0.1, mu_floor)
        if certified(z):
            logger.debug("Reference solve converged", steps=step + 1, objective=candidate_objective * scale**p)
            return x_feas + N @ (z * scale)

    raise NoConvergence(f"gradient tolerance {target_gradient_tol:.1e} not reached in {max_steps} Newton steps")
