"""
Instances module for pirls.
Contains the random instance generators, the graph p-Laplacian reduction and file I/O.
"""
from .base import InstanceGenerator, RNG_NAME, make_rng
from .matrix import generate_random_matrix_instance, rescale_to_unit_optimum, matrix_generator
from .graph import (
    expand_graph_solution,
    generate_knn_graph_instance,
    graph_generator,
    graph_to_regression,
    p_laplacian_energy,
)
from .registry import GeneratorRegistry, generator_registry
from .io import read_instance, read_solution, write_instance, write_solution

__all__ = [
    "InstanceGenerator",
    "RNG_NAME",
    "make_rng",
    "generate_random_matrix_instance",
    "rescale_to_unit_optimum",
    "matrix_generator",
    "expand_graph_solution",
    "generate_knn_graph_instance",
    "graph_generator",
    "graph_to_regression",
    "p_laplacian_energy",
    "GeneratorRegistry",
    "generator_registry",
    "read_instance",
    "read_solution",
    "write_instance",
    "write_solution",
]
