"""
Pydantic schemas for instance and solution files.

These models define the on-disk JSON layout. Matrices are stored row-major
as flat number lists; all numbers are written in shortest round-trip form.
"""
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

FORMAT_VERSION = 1


class MatrixInstanceFile(BaseModel):
    """Dense instance min ||Ax - b||_p subject to Cx = d."""

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "format_version": 1,
                "type": "matrix",
                "m": 2,
                "n": 1,
                "p": 4,
                "A": [1.0, 1.0],
                "b": [0.0, 1.0],
            }
        },
    )

    format_version: Literal[1] = Field(..., description="File format version")
    type: Literal["matrix"] = Field(..., description="Instance kind")
    m: int = Field(..., ge=1, description="Number of rows of A")
    n: int = Field(..., ge=1, description="Number of columns of A")
    p: float = Field(..., ge=2.0, description="Norm exponent")
    A: List[float] = Field(..., description="A in row-major order (m * n numbers)")
    b: List[float] = Field(..., description="Target vector (m numbers)")
    C: Optional[List[float]] = Field(None, description="Constraint matrix in row-major order (c * n numbers)")
    d: Optional[List[float]] = Field(None, description="Constraint right-hand side (c numbers)")


class GraphInstanceFile(BaseModel):
    """Weighted graph with labeled vertices."""

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "format_version": 1,
                "type": "graph",
                "vertices": 3,
                "p": 2,
                "edges": [[0, 1, 1.0], [1, 2, 1.0]],
                "labels": {"0": 0.0, "2": 1.0},
            }
        },
    )

    format_version: Literal[1] = Field(..., description="File format version")
    type: Literal["graph"] = Field(..., description="Instance kind")
    vertices: int = Field(..., ge=2, description="Total vertex count")
    p: float = Field(..., ge=2.0, description="Norm exponent")
    edges: List[tuple[int, int, float]] = Field(..., description="(u, v, weight) triples")
    labels: Dict[str, float] = Field(..., description="Vertex id -> label value")


class SolutionFile(BaseModel):
    """Solver output consumed by `pirls verify`."""

    model_config = ConfigDict(extra="forbid")

    x: List[float] = Field(..., description="Solution vector")
    objective: float = Field(..., description="||Ax - b||_p^p at x")
    iterations: int = Field(..., ge=0, description="p-IRLS iterations taken")
