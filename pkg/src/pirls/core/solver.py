"""
p-IRLS: iteratively reweighted least squares for lp regression.

Each iteration solves one weighted least-squares problem with padded
weights R + sI, line-searches along the resulting direction, and halves
the refinement scale i whenever the step fails the progress test. The
loop stops once i <= eps / (16p(1+eps)) ||Ax - b||_p^p, at which point
the objective is within a factor (1 + eps) of optimal.
"""
import math
from typing import Optional

import numpy as np

from ..config.logging import get_logger
from .bounds import (
    ABSOLUTE_ZERO_TOL,
    FEASIBILITY_TOL,
    GAP_RESOLUTION,
    default_max_iterations,
    i_floor,
    lambda_constant,
    padding,
    stop_factor,
)
from .exceptions import (
    BracketFailure,
    DegenerateConstraint,
    InvariantViolation,
    IterationLimitExceeded,
    NonFinite,
)
from .linalg import ConstrainedLeastSquares, quadratic_subproblem
from .models import IterationState, ProblemInstance, ProgressCheckReport, SolveResult, SolverConfig, TraceEntry

logger = get_logger(__name__)

MAX_DOUBLINGS = 200
MAX_BISECTIONS = 200


def lp_norm_pow(v: np.ndarray, p: float) -> float:
    """||v||_p^p as M^p sum (|v|/M)^p with M = max |v|."""
    magnitudes = np.abs(v)
    if not np.all(np.isfinite(magnitudes)):
        raise NonFinite("vector has non-finite entries")
    peak = float(magnitudes.max(initial=0.0))
    if peak == 0.0:
        return 0.0
    with np.errstate(over="ignore"):
        return float(np.float64(peak) ** p * np.sum((magnitudes / peak) ** p))


def lp_norm(v: np.ndarray, p: float) -> float:
    """||v||_p, finite whenever v is."""
    magnitudes = np.abs(v)
    if not np.all(np.isfinite(magnitudes)):
        raise NonFinite("vector has non-finite entries")
    peak = float(magnitudes.max(initial=0.0))
    if peak == 0.0:
        return 0.0
    return peak * float(np.sum((magnitudes / peak) ** p)) ** (1.0 / p)


def lp_objective(A: np.ndarray, b: np.ndarray, x: np.ndarray, p: float) -> float:
    """||Ax - b||_p^p."""
    return lp_norm_pow(A @ x - b, p)


def objective_lower_bound(residual: np.ndarray, projector: ConstrainedLeastSquares, p: float) -> float:
    """
    Lower bound on min_{Cx = d} ||Ax - b||_p^p from a feasible residual Ax - b.

    y = sign(r) |r|^(p-1) is moved to y' with A^T y' in range(C^T), so
    y'^T (Ax - b) takes the same value at every feasible x and Hoelder gives
    ||Ax - b||_p >= |y'^T r| / ||y'||_q with q = p / (p - 1). At the
    optimum y' = y and the bound is exact.
    """
    peak = float(np.abs(residual).max(initial=0.0))
    if peak == 0.0:
        return 0.0
    u = residual / peak
    y = projector.residual(np.abs(u) ** (p - 1.0) * np.sign(u))
    dual_norm = lp_norm(y, p / (p - 1.0))
    if dual_norm == 0.0:
        return 0.0
    with np.errstate(over="ignore"):
        return float(np.float64(abs(float(y @ residual)) / dual_norm) ** p)


def iteration_state(A: np.ndarray, b: np.ndarray, x: np.ndarray, i: float, p: float) -> IterationState:
    """Weights, gradient and padding at x for refinement scale i."""
    residual = A @ x - b
    if not np.all(np.isfinite(residual)):
        raise NonFinite("residual Ax - b has non-finite entries")
    r = np.abs(residual) ** (p - 2.0)
    return IterationState(
        x=x,
        i=i,
        residual=residual,
        r=r,
        s=padding(i, p, A.shape[0]),
        g=p * r * residual,
        objective=lp_norm_pow(residual, p),
    )


def residual_value(delta: np.ndarray, state: IterationState, A: np.ndarray, p: float) -> float:
    """g^T A dx - 2p^2 dx^T A^T R A dx - p^p ||A dx||_p^p with the unpadded R."""
    q = A @ delta
    return float(state.g @ q - 2.0 * p * p * np.sum(state.r * q * q) - lp_norm_pow(p * q, p))


def approximation_ratio(step: np.ndarray, state: IterationState, A: np.ndarray, p: float) -> float:
    """residual(step) / i, how much of the residual problem a step captures."""
    return residual_value(step, state, A, p) / state.i


def _slope(rho: np.ndarray, q: np.ndarray, p: float) -> float:
    # d/da sum |rho - a q|^p at a = 0, scaled by max |rho| to keep the sign exact
    peak = float(np.abs(rho).max(initial=0.0))
    if peak == 0.0:
        return 0.0
    u = rho / peak
    total = float(np.sum(np.abs(u) ** (p - 2.0) * u * q))
    if total == 0.0:
        return 0.0
    with np.errstate(over="ignore"):
        return float(-p * np.float64(peak) ** (p - 1.0) * total)


def line_search(
    A: np.ndarray,
    b: np.ndarray,
    x: np.ndarray,
    delta: np.ndarray,
    p: float,
    tol: float = 1e-12,
) -> float:
    """
    alpha >= 0 minimizing phi(alpha) = ||A(x - alpha dx) - b||_p^p.

    phi is convex, so phi' has one sign change: bracket it by doubling
    from alpha = 1, then bisect until the bracket is narrower than tol.
    Returns 0 when dx is not a descent direction or when rounding makes
    the bisection point worse than alpha = 0.

    Raises:
        BracketFailure: phi' still negative after 200 doublings
    """
    q = A @ delta
    rho0 = A @ x - b
    if not np.any(q):
        return 0.0
    slope0 = _slope(rho0, q, p)
    if not slope0 < 0.0:
        return 0.0

    lo, hi = 0.0, 1.0
    doublings = 0
    while _slope(rho0 - hi * q, q, p) < 0.0:
        lo, hi = hi, 2.0 * hi
        doublings += 1
        if doublings >= MAX_DOUBLINGS:
            raise BracketFailure(f"phi' still negative at alpha = {hi:.3e}")

    for _ in range(MAX_BISECTIONS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        slope = _slope(rho0 - mid * q, q, p)
        if slope < 0.0:
            lo = mid
        elif slope > 0.0:
            hi = mid
        else:
            lo = hi = mid
            break

    alpha = 0.5 * (lo + hi)
    if lp_norm_pow(rho0 - alpha * q, p) > lp_norm_pow(rho0, p):
        logger.debug("Line search clamped to zero", alpha=alpha)
        return 0.0
    return alpha


def progress_check(delta: np.ndarray, state: IterationState, A: np.ndarray, p: float) -> ProgressCheckReport:
    """
    Decide whether the step made too little progress for the current i.

    k and the quadratic form use the padded weights R + sI; the residual
    test at alpha0 uses the unpadded R.
    """
    lam = lambda_constant(p)
    q = A @ delta
    quad_form = float(np.sum((state.r + state.s) * q * q))
    if quad_form > 0.0:
        k = lp_norm_pow(p * q, p) / (2.0 * p * p * quad_form)
    else:
        k = 0.0

    alpha0 = 1.0 / (16.0 * lam)
    if k > 0.0:
        with np.errstate(over="ignore"):
            alpha0 = min(alpha0, float(np.float64(16.0 * lam * k) ** (-1.0 / (p - 1.0))))

    residual_at_alpha0 = residual_value(alpha0 * delta, state, A, p)
    insufficient = (
        alpha0 <= 0.0
        or residual_at_alpha0 < 0.25 * alpha0 * state.i
        or quad_form > lam * state.i / (p * p)
    )
    return ProgressCheckReport(
        k=k,
        alpha0=alpha0,
        residual_at_alpha0=residual_at_alpha0,
        quad_form=quad_form,
        insufficient=insufficient,
    )


def _feasibility_gap(C: Optional[np.ndarray], d: Optional[np.ndarray], x: np.ndarray) -> float:
    if C is None:
        return 0.0
    return float(np.max(np.abs(C @ x - d))) / (1.0 + float(np.max(np.abs(d))))


def _tightened(i: float, objective: float, lower_bound: float, p: float) -> float:
    # i >= (objective - OPT) / 16p still holds with OPT replaced by a lower bound
    gap = max(objective - lower_bound, GAP_RESOLUTION * objective)
    return min(i, gap / (16.0 * p))


def p_irls(instance: ProblemInstance, config: Optional[SolverConfig] = None) -> SolveResult:
    """
    Solve min_{Cx = d} ||Ax - b||_p to relative accuracy config.epsilon.

    Returns the final iterate with its objective and per-iteration trace,
    all in the caller's units. When the iteration cap is reached the best
    iterate is returned with ``converged=False`` (or IterationLimitExceeded
    is raised when ``config.raise_on_limit`` is set).

    Raises:
        RankDeficient: A lacks full column rank
        InfeasibleConstraints: Cx = d has no solution
        InvariantViolation: with ``config.check_invariants``, a loop invariant failed
    """
    config = config or SolverConfig()
    A, C, p = instance.A, instance.C, instance.p
    m = instance.m
    epsilon = config.epsilon
    max_iterations = config.max_iterations or default_max_iterations(p, m, epsilon, config.max_iterations_cap)

    projector = ConstrainedLeastSquares(A, C, config.linear_tol)
    x = projector.solve(instance.b, instance.d)
    initial_objective = lp_objective(A, instance.b, x, p)
    logger.info(
        "Starting p-IRLS",
        m=m,
        n=instance.n,
        constraints=instance.c,
        p=p,
        epsilon=epsilon,
        initial_objective=initial_objective,
    )

    initial_norm = lp_norm(A @ x - instance.b, p)
    if initial_norm <= ABSOLUTE_ZERO_TOL * (1.0 + lp_norm(instance.b, p)):
        logger.info("Least-squares start fits exactly; nothing to refine")
        return SolveResult(
            x=x,
            objective=initial_objective,
            iterations=0,
            halvings=0,
            converged=True,
            final_i=initial_objective / (16.0 * p),
            initial_objective=initial_objective,
        )

    # Work with b, d scaled so the starting objective is 1.
    scale = initial_norm if config.normalize else 1.0
    unit = scale**p
    b = instance.b / scale
    d = None if instance.d is None else instance.d / scale
    x = x / scale

    objective = lp_objective(A, b, x, p)
    lower_bound = objective_lower_bound(A @ x - b, projector, p)
    i = _tightened(objective / (16.0 * p), objective, lower_bound, p)
    threshold = stop_factor(p, epsilon)
    floor = i_floor(p, m, epsilon, objective)

    trace: list[TraceEntry] = []
    halvings = 0
    iterations = 0
    converged = True

    while threshold * objective < i:
        if iterations >= max_iterations:
            converged = False
            break
        iterations += 1

        state = iteration_state(A, b, x, i, p)
        alpha, quad_form, ratio = 0.0, 0.0, 0.0
        try:
            delta = quadratic_subproblem(A, state.r + state.s, state.g, C, i, config.linear_tol)
        except DegenerateConstraint as exc:
            # Gradient vanishes on the feasible subspace: x is stationary, only i can move.
            logger.debug("Degenerate subproblem", iteration=iterations, reason=str(exc))
            insufficient = True
        else:
            alpha = line_search(A, b, x, delta, p, config.line_search_tol)
            report = progress_check(delta, state, A, p)
            insufficient = report.insufficient
            quad_form = report.quad_form
            ratio = approximation_ratio(alpha * delta, state, A, p)
            if alpha > 0.0:
                candidate = x - alpha * delta
                candidate_objective = lp_objective(A, b, candidate, p)
                if candidate_objective <= objective:
                    x, objective = candidate, candidate_objective
                else:
                    alpha = 0.0

        if config.check_invariants:
            if state.i < floor * (1.0 - 1e-9):
                raise InvariantViolation(f"i = {state.i:.3e} fell below its floor {floor:.3e}")
            gap = _feasibility_gap(C, d, x)
            if gap > FEASIBILITY_TOL:
                raise InvariantViolation(f"iterate left the constraint set (gap {gap:.3e})")

        if insufficient:
            i /= 2.0
            halvings += 1
        if alpha > 0.0:
            lower_bound = max(lower_bound, objective_lower_bound(A @ x - b, projector, p))
        i = _tightened(i, objective, lower_bound, p)

        trace.append(
            TraceEntry(
                iteration=iterations,
                objective=objective * unit,
                i=state.i * unit,
                alpha=alpha,
                halved=insufficient,
                quad_form=quad_form,
                approximation_ratio=ratio,
                lower_bound=lower_bound * unit,
            )
        )
        logger.debug(
            "p-IRLS iteration",
            iteration=iterations,
            objective=objective * unit,
            lower_bound=lower_bound * unit,
            i=state.i * unit,
            alpha=alpha,
            halved=insufficient,
        )

    result = SolveResult(
        x=x * scale,
        objective=objective * unit,
        iterations=iterations,
        halvings=halvings,
        trace=tuple(trace),
        converged=converged,
        final_i=i * unit,
        initial_objective=initial_objective,
        scale=scale,
        lower_bound=lower_bound * unit,
    )

    if not converged:
        logger.warning("Iteration limit reached", iterations=iterations, objective=result.objective)
        if config.raise_on_limit:
            raise IterationLimitExceeded(f"no convergence within {max_iterations} iterations", result=result)
    else:
        logger.info(
            "Solve finished",
            iterations=iterations,
            halvings=halvings,
            objective=result.objective,
            relative_gap_bound=math.nan if objective == 0 else 16.0 * p * i / objective,
        )
    return result
