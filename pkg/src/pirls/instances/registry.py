"""
Generator registry for managing the available instance generators.
"""
from typing import Dict, List

from .base import InstanceGenerator
from .matrix import matrix_generator
from .graph import graph_generator
from ..core.exceptions import ConfigurationError
from ..config.logging import get_logger

logger = get_logger(__name__)


class GeneratorRegistry:
    """Registry for managing all available instance generators."""

    def __init__(self):
        self._generators: Dict[str, InstanceGenerator] = {}
        self._initialized = False

    def _register_default_generators(self):
        """Register the default generators."""
        if self._initialized:
            return
        self._initialized = True
        self.register_generator(matrix_generator)
        self.register_generator(graph_generator)
        logger.debug("Default generators registered", generator_count=len(self._generators))

    def register_generator(self, generator: InstanceGenerator):
        """Register a new generator."""
        self._generators[generator.name] = generator
        logger.debug("Generator registered", generator_name=generator.name)

    def get_generator(self, name: str) -> InstanceGenerator:
        """Get a generator by name."""
        self._register_default_generators()
        if name not in self._generators:
            raise ConfigurationError(
                f"Generator '{name}' not found. Available generators: {list(self._generators.keys())}"
            )
        return self._generators[name]

    def list_generators(self) -> List[str]:
        """List all available generator names."""
        self._register_default_generators()
        return list(self._generators.keys())


# Create global registry instance
generator_registry = GeneratorRegistry()
