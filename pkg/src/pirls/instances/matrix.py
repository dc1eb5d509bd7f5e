"""
Random dense lp-regression instances.
"""
from typing import Any, Dict

from pydantic import ValidationError

from .base import InstanceGenerator, make_rng
from ..core.exceptions import InvalidInstance
from ..core.models import ProblemInstance
from ..config.logging import get_logger

logger = get_logger(__name__)


def generate_random_matrix_instance(m: int, n: int, p: float, seed: int) -> ProblemInstance:
    """A (m x n) and b with i.i.d. entries uniform on [0, 1); no constraints."""
    if not m >= n >= 1:
        raise InvalidInstance(f"need m >= n >= 1, got m={m}, n={n}")
    rng = make_rng(seed)
    A = rng.random((m, n))
    b = rng.random(m)
    try:
        return ProblemInstance(A=A, b=b, p=p)
    except ValidationError as exc:
        raise InvalidInstance(str(exc)) from exc


def rescale_to_unit_optimum(instance: ProblemInstance, optimum: float) -> ProblemInstance:
    """
    Scale b and d so the optimal objective becomes 1.

    Scaling (b, d) by t scales every feasible x, and hence the optimum, by
    t and t^p respectively, so t = optimum^(-1/p).
    """
    if not optimum > 0:
        raise InvalidInstance(f"cannot rescale an instance with optimum {optimum}")
    factor = optimum ** (-1.0 / instance.p)
    return ProblemInstance(
        A=instance.A,
        b=instance.b * factor,
        C=instance.C,
        d=None if instance.d is None else instance.d * factor,
        p=instance.p,
    )


class MatrixInstanceGenerator(InstanceGenerator):
    """Uniform random matrix instances."""

    def __init__(self):
        super().__init__(
            name="matrix",
            description="m x n matrix A and vector b with entries uniform on [0, 1)",
        )

    @property
    def parameters(self) -> Dict[str, Any]:
        return {"m": 400, "n": 300, "p": 8.0}

    def generate(self, seed: int, **kwargs) -> ProblemInstance:
        params = self.resolve_parameters(**kwargs)
        logger.debug("Generating matrix instance", seed=seed, **params)
        return generate_random_matrix_instance(int(params["m"]), int(params["n"]), float(params["p"]), seed)


# Create generator instance
matrix_generator = MatrixInstanceGenerator()
