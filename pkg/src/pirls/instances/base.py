"""
Base classes and interfaces for instance generators.
"""
from abc import ABC, abstractmethod
from typing import Any, Dict, Union

import numpy as np

from ..core.models import GraphInstance, ProblemInstance

# Counter-based 64-bit generator; streams are identical across platforms for a given seed.
RNG_NAME = f"numpy.random.Philox (numpy {np.__version__})"


def make_rng(seed: int) -> np.random.Generator:
    """Deterministic generator for an instance seed."""
    return np.random.Generator(np.random.Philox(seed))


class InstanceGenerator(ABC):
    """Base class for all instance generators."""

    def __init__(self, name: str, description: str):
        self._name = name
        self._description = description

    @property
    def name(self) -> str:
        """Generator name (must be unique)"""
        return self._name

    @property
    def description(self) -> str:
        """What this generator produces"""
        return self._description

    @property
    @abstractmethod
    def parameters(self) -> Dict[str, Any]:
        """Parameter names with their default values"""
        pass

    @abstractmethod
    def generate(self, seed: int, **kwargs) -> Union[ProblemInstance, GraphInstance]:
        """Generate an instance; identical arguments give an identical instance."""
        pass

    def resolve_parameters(self, **kwargs) -> Dict[str, Any]:
        """Defaults overridden by the given (non-None) keyword arguments."""
        unknown = set(kwargs) - set(self.parameters)
        if unknown:
            raise ValueError(f"Unknown parameters for '{self.name}': {sorted(unknown)}")
        resolved = dict(self.parameters)
        resolved.update({key: value for key, value in kwargs.items() if value is not None})
        return resolved

    def __str__(self) -> str:
        return f"{self.__class__.__name__}(name='{self.name}')"

    def __repr__(self) -> str:
        return self.__str__()
