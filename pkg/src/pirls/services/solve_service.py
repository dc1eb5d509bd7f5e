"""
Solve service.
Runs the solver, the verifier and the generators on instance files.
"""
import csv
from pathlib import Path
from typing import Any, Dict, Optional, TextIO, Union

from ..config.settings import settings
from ..config.logging import get_logger
from ..core.models import GraphInstance, OptimalityCertificate, ProblemInstance, SolveResult, SolverConfig
from ..core.oracle import verify_first_order
from ..core.solver import p_irls
from ..core.exceptions import DimensionMismatch
from ..instances.graph import graph_to_regression
from ..instances.io import read_instance, read_solution, write_instance, write_solution
from ..instances.registry import generator_registry

logger = get_logger(__name__)

TRACE_COLUMNS = ["iter", "objective", "i", "alpha", "halved"]

PathLike = Union[str, Path]


def as_regression(instance: Union[ProblemInstance, GraphInstance], p: Optional[float] = None) -> ProblemInstance:
    """The regression form of a file instance, optionally with p replaced."""
    if isinstance(instance, GraphInstance):
        if p is not None:
            instance = GraphInstance(
                num_vertices=instance.num_vertices, edges=instance.edges, labels=instance.labels, p=p
            )
        return graph_to_regression(instance)
    if p is not None:
        instance = ProblemInstance(A=instance.A, b=instance.b, C=instance.C, d=instance.d, p=p)
    return instance


def write_trace(result: SolveResult, stream: TextIO) -> None:
    """Per-iteration CSV with header iter,objective,i,alpha,halved."""
    writer = csv.DictWriter(stream, fieldnames=TRACE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for entry in result.trace:
        writer.writerow(
            {
                "iter": entry.iteration,
                "objective": repr(entry.objective),
                "i": repr(entry.i),
                "alpha": repr(entry.alpha),
                "halved": int(entry.halved),
            }
        )


class SolveService:
    """File-level entry points for solving, verifying and generating instances."""

    def solve_file(
        self,
        instance_path: PathLike,
        p: Optional[float] = None,
        epsilon: Optional[float] = None,
        max_iterations: Optional[int] = None,
        trace_path: Optional[PathLike] = None,
        solution_path: Optional[PathLike] = None,
    ) -> SolveResult:
        """
        Solve the instance stored at ``instance_path``.

        Graph files are reduced to regression form first. Optional trace and
        solution files are written after the solve.
        """
        instance = as_regression(read_instance(instance_path), p)
        config = SolverConfig.from_settings(epsilon=epsilon, max_iterations=max_iterations)
        logger.info("Solving instance file", path=str(instance_path), m=instance.m, n=instance.n, p=instance.p)

        result = p_irls(instance, config)

        if trace_path is not None:
            with open(trace_path, "w", encoding="utf-8", newline="") as stream:
                write_trace(result, stream)
        if solution_path is not None:
            write_solution(result.x, result.objective, result.iterations, solution_path)
        return result

    def verify_files(
        self,
        instance_path: PathLike,
        solution_path: PathLike,
        tol: float = 1e-8,
    ) -> OptimalityCertificate:
        """First-order certificate for a solution file against its instance file."""
        instance = as_regression(read_instance(instance_path))
        solution = read_solution(solution_path)
        if len(solution.x) != instance.n:
            raise DimensionMismatch(f"solution has {len(solution.x)} entries, instance has n = {instance.n}", field="x")
        certificate = verify_first_order(instance, solution.x, tol_g=tol, tol_c=tol)
        logger.info("Verification finished", passed=certificate.passed)
        return certificate

    def generate_file(self, kind: str, seed: int, out_path: PathLike, **params) -> Union[ProblemInstance, GraphInstance]:
        """Generate an instance with a registered generator and write it."""
        generator = generator_registry.get_generator(kind)
        instance = generator.generate(seed, **params)
        write_instance(instance, out_path)
        logger.info("Instance generated", kind=kind, seed=seed, path=str(out_path))
        return instance

    def get_info(self) -> Dict[str, Any]:
        """Resolved configuration for `pirls info`."""
        return {
            "threads": settings.effective_threads,
            "epsilon": settings.epsilon,
            "line_search_tol": settings.line_search_tol,
            "linear_tol": settings.linear_tol,
            "normalize": settings.normalize,
            "max_iterations_cap": settings.max_iterations_cap,
            "log_level": settings.log_level,
            "environment": settings.environment,
            "generators": generator_registry.list_generators(),
        }


# Global service instance
solve_service = SolveService()
