"""
Sweep service.
Generates and solves one instance per (axis value, repetition) and records
iteration counts and timings as CSV.
"""
import csv
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Dict, List, Optional, TextIO

import numpy as np

from ..config.settings import settings
from ..config.logging import get_logger
from ..core.exceptions import ConfigurationError, PirlsError
from ..core.models import GraphInstance, ProblemInstance, SolverConfig, SweepSpec
from ..core.solver import p_irls
from ..instances.graph import graph_to_regression
from ..instances.registry import generator_registry

logger = get_logger(__name__)

SWEEP_COLUMNS = [
    "axis",
    "axis_value",
    "rep",
    "seed",
    "iterations",
    "halvings",
    "wall_ms",
    "objective",
    "converged",
    "error",
]
AGGREGATED = ["iterations", "halvings", "wall_ms", "objective"]


def format_value(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


class SweepService:
    """Parameter sweeps over generated instances."""

    def build_instance(self, spec: SweepSpec, value: float, seed: int) -> ProblemInstance:
        """The regression instance for one axis value and seed."""
        p = value if spec.axis == "p" else spec.p
        generator = generator_registry.get_generator(spec.kind)
        if spec.kind == "matrix":
            m, n = spec.m, spec.n
            if spec.axis == "size":
                # m x (m - offset) family
                m = int(value)
                n = m - (spec.m - spec.n)
                if n < 1:
                    raise ConfigurationError(f"size {m} leaves no columns (m - n = {spec.m - spec.n})")
            return generator.generate(seed, m=m, n=n, p=p)

        vertices = int(value) if spec.axis == "size" else spec.vertices
        graph: GraphInstance = generator.generate(
            seed, vertices=vertices, dim=spec.dim, k=spec.k, labels=spec.labels, p=p
        )
        return graph_to_regression(graph)

    def run_one(self, spec: SweepSpec, value: float, rep: int) -> Dict[str, Any]:
        """One CSV row; any failure lands in the error column instead of aborting the sweep."""
        seed = spec.seed_base + rep
        epsilon = value if spec.axis == "epsilon" else spec.epsilon
        row: Dict[str, Any] = {column: "" for column in SWEEP_COLUMNS}
        row.update(axis=spec.axis, axis_value=format_value(value), rep=rep, seed=seed)
        try:
            instance = self.build_instance(spec, value, seed)
            config = SolverConfig.from_settings(epsilon=epsilon)
            started = time.perf_counter()
            result = p_irls(instance, config)
            elapsed = time.perf_counter() - started
        except PirlsError as exc:
            logger.warning("Sweep point failed", axis_value=value, rep=rep, error=str(exc))
            row["error"] = f"{type(exc).__name__}: {exc}"
            return row
        except Exception as exc:
            logger.error("Sweep point crashed", axis_value=value, rep=rep, error=str(exc), exc_info=True)
            row["error"] = f"{type(exc).__name__}: {exc}"
            return row

        row.update(
            iterations=result.iterations,
            halvings=result.halvings,
            wall_ms=round(1000.0 * elapsed, 3),
            objective=repr(result.objective),
            converged=int(result.converged),
        )
        return row

    def aggregate(self, spec: SweepSpec, rows: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
        """mean and std rows per axis value over the successful repetitions."""
        summary = []
        for value in spec.values:
            label = format_value(value)
            ok = [row for row in rows if row["axis_value"] == label and not row["error"]]
            failed = sum(1 for row in rows if row["axis_value"] == label and row["error"])
            for statistic, reduce in (("mean", np.mean), ("std", np.std)):
                aggregate_row: Dict[str, Any] = {column: "" for column in SWEEP_COLUMNS}
                aggregate_row.update(axis=spec.axis, axis_value=label, rep=statistic)
                if ok:
                    for column in AGGREGATED:
                        aggregate_row[column] = repr(float(reduce([float(row[column]) for row in ok])))
                    aggregate_row["converged"] = repr(float(np.mean([float(row["converged"]) for row in ok])))
                if failed:
                    aggregate_row["error"] = f"{failed} failed"
                summary.append(aggregate_row)
        return summary

    def run(self, spec: SweepSpec, stream: TextIO, threads: Optional[int] = None) -> List[Dict[str, Any]]:
        """
        Run the sweep, writing rows to ``stream`` as repetitions finish.

        Repetitions run on a thread pool of ``threads`` workers (default:
        settings.effective_threads). Rows are written in completion order;
        the aggregate rows follow once every repetition is done.
        """
        workers = threads or settings.effective_threads
        if workers < 1:
            raise ConfigurationError(f"threads must be >= 1, got {workers}")

        writer = csv.DictWriter(stream, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        writer.writeheader()
        lock = threading.Lock()
        rows: List[Dict[str, Any]] = []

        tasks = [(value, rep) for value in spec.values for rep in range(spec.repetitions)]
        logger.info("Starting sweep", axis=spec.axis, kind=spec.kind, points=len(tasks), threads=workers)

        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(self.run_one, spec, value, rep) for value, rep in tasks]
            for future in as_completed(futures):
                row = future.result()
                with lock:
                    writer.writerow(row)
                    rows.append(row)

        summary = self.aggregate(spec, rows)
        with lock:
            writer.writerows(summary)
        stream.flush()
        logger.info("Sweep finished", rows=len(rows), failures=sum(1 for row in rows if row["error"]))
        return rows + summary


# Global service instance
sweep_service = SweepService()
