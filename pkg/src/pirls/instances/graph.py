"""
Graph p-Laplacian instances.

Semi-supervised learning on a weighted graph: minimize
sum_edges w_uv |x_u - x_v|^p over the unlabeled values with the labeled
values fixed. graph_to_regression turns this into min ||Ax - b||_p.
"""
from typing import Any, Dict

import numpy as np
from pydantic import ValidationError
from scipy import spatial

from .base import InstanceGenerator, make_rng
from ..core.exceptions import InvalidInstance, NoUnlabeledVertices
from ..core.models import GraphInstance, ProblemInstance
from ..config.logging import get_logger

logger = get_logger(__name__)


def _incidence(graph: GraphInstance) -> tuple[np.ndarray, int]:
    """Edge-vertex incidence over columns (unlabeled..., labeled...) and the unlabeled count."""
    unlabeled = graph.unlabeled_vertices
    if not unlabeled:
        raise NoUnlabeledVertices("every vertex is labeled")
    column = {vertex: j for j, vertex in enumerate(unlabeled + graph.labeled_vertices)}

    B = np.zeros((len(graph.edges), graph.num_vertices))
    for row, (u, v, _) in enumerate(graph.edges):
        first, second = sorted((column[u], column[v]))
        B[row, first] = 1.0
        B[row, second] = -1.0
    return B, len(unlabeled)


def graph_to_regression(graph: GraphInstance) -> ProblemInstance:
    """
    A = W^(1/p) B_unlabeled and b = -W^(1/p) B_labeled g.

    Unlabeled vertices take columns 0..n-1 in id order, labeled ones the
    trailing columns. Each incidence row has +1 at its lower column and -1
    at the higher, so ||Ax - b||_p^p is the p-Laplacian with labels fixed.

    Raises:
        NoUnlabeledVertices: nothing to solve for
        InvalidInstance: fewer edges than unlabeled vertices
    """
    B, n = _incidence(graph)
    p = graph.p
    scale = np.array([w for _, _, w in graph.edges]) ** (1.0 / p)
    g = np.array([graph.labels[v] for v in graph.labeled_vertices])

    A = scale[:, None] * B[:, :n]
    b = -scale * (B[:, n:] @ g)
    try:
        return ProblemInstance(A=A, b=b, p=p)
    except ValidationError as exc:
        raise InvalidInstance(f"graph does not reduce to a valid regression: {exc}") from exc


def expand_graph_solution(graph: GraphInstance, x: np.ndarray) -> np.ndarray:
    """Per-vertex values: x on the unlabeled vertices, the labels elsewhere."""
    unlabeled = graph.unlabeled_vertices
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (len(unlabeled),):
        raise InvalidInstance(f"expected {len(unlabeled)} unlabeled values, got shape {x.shape}")
    values = np.empty(graph.num_vertices)
    values[unlabeled] = x
    for vertex, label in graph.labels.items():
        values[vertex] = label
    return values


def p_laplacian_energy(graph: GraphInstance, values: np.ndarray) -> float:
    """sum_edges w_uv |y_u - y_v|^p by direct summation."""
    edges = np.array([(u, v) for u, v, _ in graph.edges], dtype=np.intp)
    weights = np.array([w for _, _, w in graph.edges])
    values = np.asarray(values, dtype=np.float64)
    return float(np.sum(weights * np.abs(values[edges[:, 0]] - values[edges[:, 1]]) ** graph.p))


def generate_knn_graph_instance(
    n_vertices: int,
    dim: int = 10,
    k: int = 10,
    n_labels: int = 10,
    p: float = 8.0,
    seed: int = 0,
) -> GraphInstance:
    """
    k-nearest-neighbour graph on uniform points in [0, 1]^dim.

    As in the usual kNN search, a point counts as its own nearest
    neighbour, so each vertex links to its k - 1 closest other points;
    edge (u, v) exists when either end picks the other. Weights are
    exp(-|x_u - x_v|^2 / sigma^2) with sigma the mean distance to the
    farthest kept neighbour. n_labels random vertices get labels uniform
    on [0, 1). Distance ties go to the lower vertex id, decided among the
    k + 1 candidates the KD-tree returns for each point.
    """
    if not n_vertices > n_labels >= 1:
        raise InvalidInstance(f"need n_vertices > n_labels >= 1, got {n_vertices}, {n_labels}")
    if not 2 <= k <= n_vertices:
        raise InvalidInstance(f"need 2 <= k <= n_vertices, got k={k}")
    if dim < 1:
        raise InvalidInstance(f"need dim >= 1, got {dim}")

    rng = make_rng(seed)
    points = rng.random((n_vertices, dim))
    distances, neighbours = spatial.cKDTree(points).query(points, k=min(k + 1, n_vertices))

    nearest = np.empty((n_vertices, k - 1), dtype=np.intp)
    kth_distance = np.empty(n_vertices)
    for vertex in range(n_vertices):
        order = np.lexsort((neighbours[vertex], distances[vertex]))
        keep = [j for j in order if neighbours[vertex, j] != vertex][: k - 1]
        nearest[vertex] = neighbours[vertex, keep]
        kth_distance[vertex] = distances[vertex, keep[-1]]

    sigma = float(kth_distance.mean())
    if sigma <= 0:
        raise InvalidInstance("all sampled points coincide")

    pairs = {
        (min(u, int(v)), max(u, int(v)))
        for u in range(n_vertices)
        for v in nearest[u]
    }
    edges = []
    for u, v in sorted(pairs):
        gap = points[u] - points[v]
        edges.append((u, v, float(np.exp(-float(gap @ gap) / sigma**2))))

    labeled = rng.choice(n_vertices, size=n_labels, replace=False)
    values = rng.random(n_labels)
    labels = {int(vertex): float(value) for vertex, value in zip(labeled, values)}

    logger.debug("Generated k-NN graph", vertices=n_vertices, edges=len(edges), sigma=sigma)
    try:
        return GraphInstance(num_vertices=n_vertices, edges=tuple(edges), labels=labels, p=p)
    except ValidationError as exc:
        raise InvalidInstance(str(exc)) from exc


class KnnGraphInstanceGenerator(InstanceGenerator):
    """k-NN graphs with Gaussian edge weights."""

    def __init__(self):
        super().__init__(
            name="graph",
            description="k-nearest-neighbour graph on uniform points with a few labeled vertices",
        )

    @property
    def parameters(self) -> Dict[str, Any]:
        return {"vertices": 1000, "dim": 10, "k": 10, "labels": 10, "p": 8.0}

    def generate(self, seed: int, **kwargs) -> GraphInstance:
        params = self.resolve_parameters(**kwargs)
        logger.debug("Generating graph instance", seed=seed, **params)
        return generate_knn_graph_instance(
            n_vertices=int(params["vertices"]),
            dim=int(params["dim"]),
            k=int(params["k"]),
            n_labels=int(params["labels"]),
            p=float(params["p"]),
            seed=seed,
        )


# Create generator instance
graph_generator = KnnGraphInstanceGenerator()
