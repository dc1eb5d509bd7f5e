"""
Domain models.

Pydantic models for problem instances, solver configuration, iteration
state and results. Dense arrays are stored as read-only float64 numpy
arrays and serialize to plain JSON lists.
"""
import math
from typing import Annotated, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, model_validator

from ..config.settings import settings


def _as_readonly_array(value) -> np.ndarray:
    array = np.array(value, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


def _array_to_list(array: np.ndarray) -> list:
    return array.tolist()


Array = Annotated[
    np.ndarray,
    PlainValidator(_as_readonly_array),
    PlainSerializer(_array_to_list, return_type=list),
]
Matrix = Array
Vector = Array

RngSeed = Annotated[int, Field(ge=0, lt=2**64, description="64-bit unsigned generator seed")]


class _ArrayModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class ProblemInstance(_ArrayModel):
    """min ||Ax - b||_p subject to Cx = d."""

    A: Matrix = Field(..., description="m x n design matrix")
    b: Vector = Field(..., description="length-m target vector")
    C: Optional[Matrix] = Field(None, description="c x n constraint matrix")
    d: Optional[Vector] = Field(None, description="length-c constraint right-hand side")
    p: float = Field(..., ge=2.0, description="norm exponent")

    @model_validator(mode="after")
    def _check_shapes(self) -> "ProblemInstance":
        if self.A.ndim != 2:
            raise ValueError("A must be a 2-D matrix")
        m, n = self.A.shape
        if n < 1 or m < n:
            raise ValueError(f"A must satisfy m >= n >= 1, got {m} x {n}")
        if self.b.shape != (m,):
            raise ValueError(f"b must have {m} entries, got shape {self.b.shape}")
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.b))):
            raise ValueError("A and b must be finite")
        if not math.isfinite(self.p):
            raise ValueError("p must be finite")
        if (self.C is None) != (self.d is None):
            raise ValueError("C and d must be given together")
        if self.C is not None:
            if self.C.ndim != 2 or self.C.shape[1] != n or self.C.shape[0] < 1:
                raise ValueError(f"C must be c x {n} with c >= 1, got shape {self.C.shape}")
            if self.d.shape != (self.C.shape[0],):
                raise ValueError(f"d must have {self.C.shape[0]} entries, got shape {self.d.shape}")
            if not (np.all(np.isfinite(self.C)) and np.all(np.isfinite(self.d))):
                raise ValueError("C and d must be finite")
        return self

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def c(self) -> int:
        return 0 if self.C is None else self.C.shape[0]

    @property
    def has_constraints(self) -> bool:
        return self.C is not None


class GraphInstance(BaseModel):
    """Weighted graph with a few labeled vertices; its p-Laplacian is the objective."""

    model_config = ConfigDict(frozen=True)

    num_vertices: int = Field(..., ge=2, description="unlabeled plus labeled vertex count")
    edges: tuple[tuple[int, int, float], ...] = Field(..., description="(u, v, weight) triples")
    labels: dict[int, float] = Field(..., description="vertex id -> label value")
    p: float = Field(..., ge=2.0, description="norm exponent")

    @model_validator(mode="after")
    def _check_graph(self) -> "GraphInstance":
        seen: set[tuple[int, int]] = set()
        for index, (u, v, w) in enumerate(self.edges):
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge {index} references a vertex outside 0..{self.num_vertices - 1}")
            if u == v:
                raise ValueError(f"edge {index} is a self-loop on vertex {u}")
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"edge {index} has non-positive weight {w}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"edge {index} duplicates edge {key}")
            seen.add(key)
        for vertex, value in self.labels.items():
            if not 0 <= vertex < self.num_vertices:
                raise ValueError(f"label on vertex {vertex} outside 0..{self.num_vertices - 1}")
            if not math.isfinite(value):
                raise ValueError(f"label on vertex {vertex} is not finite")
        if not self.labels:
            raise ValueError("at least one vertex must be labeled")
        if len(self.labels) >= self.num_vertices:
            raise ValueError("at least one vertex must be unlabeled")
        return self

    @property
    def labeled_vertices(self) -> list[int]:
        return sorted(self.labels)

    @property
    def unlabeled_vertices(self) -> list[int]:
        return [v for v in range(self.num_vertices) if v not in self.labels]


class SolverConfig(BaseModel):
    """Per-solve configuration."""

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(default=1e-8, gt=0.0, le=1.0, description="relative accuracy")
    max_iterations: Optional[int] = Field(
        default=None, ge=1, description="iteration cap; None derives it from p, m and epsilon"
    )
    max_iterations_cap: int = Field(default=100000, ge=1, description="hard cap on the derived value")
    line_search_tol: float = Field(default=1e-12, gt=0.0, description="line-search bracket width")
    linear_tol: float = Field(default=1e-12, gt=0.0, description="relative Cholesky pivot floor")
    normalize: bool = Field(default=True, description="rescale b, d by the initial residual norm")
    check_invariants: bool = Field(default=False, description="assert loop invariants every iteration")
    raise_on_limit: bool = Field(default=False, description="raise instead of returning unconverged")

    @classmethod
    def from_settings(cls, **overrides) -> "SolverConfig":
        """Config seeded from the environment settings, with explicit overrides."""
        values = {
            "epsilon": settings.epsilon,
            "line_search_tol": settings.line_search_tol,
            "linear_tol": settings.linear_tol,
            "normalize": settings.normalize,
            "max_iterations_cap": settings.max_iterations_cap,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


class IterationState(_ArrayModel):
    """Quantities of one p-IRLS iteration, all evaluated at the current x."""

    x: Vector
    i: float = Field(..., gt=0.0, description="refinement scale")
    residual: Vector = Field(..., description="Ax - b")
    r: Vector = Field(..., description="unpadded weights |Ax - b|^(p-2)")
    s: float = Field(..., gt=0.0, description="padding")
    g: Vector = Field(..., description="p R (Ax - b)")
    objective: float = Field(..., ge=0.0, description="||Ax - b||_p^p")


class ProgressCheckReport(BaseModel):
    """Outcome of the insufficient-progress test."""

    model_config = ConfigDict(frozen=True)

    k: float
    alpha0: float
    residual_at_alpha0: float
    quad_form: float
    insufficient: bool


class TraceEntry(BaseModel):
    """One iteration of a solve, in the caller's (unnormalized) units."""

    iteration: int
    objective: float = Field(..., description="objective after the update")
    i: float = Field(..., description="refinement scale in effect during the iteration")
    alpha: float
    halved: bool
    quad_form: float = Field(0.0, description="dx^T A^T (R + sI) A dx (normalized units)")
    approximation_ratio: float = Field(0.0, description="residual(alpha dx) / i (normalized units)")
    lower_bound: float = Field(0.0, description="best certified lower bound on the optimum so far")


class SolveResult(_ArrayModel):
    """Final iterate and per-iteration trace of a p-IRLS solve."""

    x: Vector
    objective: float
    iterations: int
    halvings: int
    trace: tuple[TraceEntry, ...] = ()
    converged: bool
    final_i: float = 0.0
    initial_objective: float = 0.0
    scale: float = 1.0
    lower_bound: float = 0.0


class OptimalityCertificate(BaseModel):
    """First-order optimality report for a candidate solution."""

    model_config = ConfigDict(frozen=True)

    projected_gradient_norm: float
    constraint_violation: float
    objective: float
    passed: bool
    tol_g: float
    tol_c: float


class SweepSpec(BaseModel):
    """A one-axis parameter sweep over generated instances."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["matrix", "graph"] = "matrix"
    axis: Literal["size", "p", "epsilon"]
    values: tuple[float, ...]
    m: int = Field(default=400, ge=1)
    n: int = Field(default=300, ge=1)
    vertices: int = Field(default=1000, ge=3)
    dim: int = Field(default=10, ge=1)
    k: int = Field(default=10, ge=2)
    labels: int = Field(default=10, ge=1)
    p: float = Field(default=8.0, ge=2.0)
    epsilon: float = Field(default=1e-8, gt=0.0, le=1.0)
    repetitions: int = Field(default=1, ge=1)
    seed_base: RngSeed = 0

    @model_validator(mode="after")
    def _check_values(self) -> "SweepSpec":
        if not self.values:
            raise ValueError("sweep values must be non-empty")
        # epsilon gets harder as it shrinks, so every axis runs from easy to hard
        if self.axis == "epsilon":
            if any(b >= a for a, b in zip(self.values, self.values[1:])):
                raise ValueError("epsilon values must be strictly decreasing")
        elif any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        if self.axis == "p" and self.values[0] < 2:
            raise ValueError("p values must be >= 2")
        if self.axis == "epsilon" and not all(0 < v <= 1 for v in self.values):
            raise ValueError("epsilon values must lie in (0, 1]")
        if self.axis == "size" and self.values[0] < 1:
            raise ValueError("size values must be >= 1")
        return self
