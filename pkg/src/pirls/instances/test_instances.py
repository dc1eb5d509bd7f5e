"""
Test the instances module.
"""
import json

import numpy as np
import pytest

from .graph import (
    _incidence,
    expand_graph_solution,
    generate_knn_graph_instance,
    graph_to_regression,
    p_laplacian_energy,
)
from .io import read_instance, read_solution, write_instance, write_solution
from .matrix import generate_random_matrix_instance, rescale_to_unit_optimum
from .registry import generator_registry
from ..core.exceptions import ConfigurationError, DimensionMismatch, InvalidInstance, ParseError
from ..core.models import GraphInstance, ProblemInstance
from ..core.oracle import reference_solve
from ..core.solver import lp_objective, p_irls


def _random_graph(rng: np.random.Generator, vertices: int, labels: int, p: float) -> GraphInstance:
    pairs = {(int(u), int(v)) for u, v in rng.integers(0, vertices, size=(3 * vertices, 2)) if u < v}
    # a path keeps every vertex on at least one edge
    pairs |= {(v, v + 1) for v in range(vertices - 1)}
    edges = tuple((u, v, float(rng.uniform(0.1, 2.0))) for u, v in sorted(pairs))
    labeled = rng.choice(vertices, size=labels, replace=False)
    return GraphInstance(
        num_vertices=vertices,
        edges=edges,
        labels={int(v): float(rng.random()) for v in labeled},
        p=p,
    )


def test_matrix_generator_is_deterministic():
    first = generate_random_matrix_instance(3, 2, 4.0, seed=42)
    second = generate_random_matrix_instance(3, 2, 4.0, seed=42)
    assert first.A.tobytes() == second.A.tobytes()
    assert first.b.tobytes() == second.b.tobytes()
    other = generate_random_matrix_instance(3, 2, 4.0, seed=43)
    assert first.A.tobytes() != other.A.tobytes()


def test_matrix_generator_range_and_mean():
    instance = generate_random_matrix_instance(10000, 100, 4.0, seed=1)
    assert instance.A.min() >= 0.0 and instance.A.max() < 1.0
    assert instance.b.min() >= 0.0 and instance.b.max() < 1.0
    assert abs(instance.A.mean() - 0.5) <= 0.002


def test_matrix_generator_rejects_wide_shapes():
    with pytest.raises(InvalidInstance):
        generate_random_matrix_instance(2, 3, 4.0, seed=0)


def test_single_edge_reduction():
    graph = GraphInstance(num_vertices=2, edges=((0, 1, 1.0),), labels={1: 1.0}, p=3.0)
    instance = graph_to_regression(graph)
    np.testing.assert_array_equal(instance.A, [[1.0]])
    np.testing.assert_array_equal(instance.b, [1.0])
    for x in (-1.0, 0.3, 2.5):
        assert lp_objective(instance.A, instance.b, np.array([x]), 3.0) == pytest.approx(abs(x - 1.0) ** 3)


def test_path_midpoint():
    graph = GraphInstance(num_vertices=3, edges=((0, 1, 1.0), (1, 2, 1.0)), labels={0: 0.0, 2: 1.0}, p=2.0)
    result = p_irls(graph_to_regression(graph))
    assert result.x[0] == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(expand_graph_solution(graph, result.x), [0.0, 0.5, 1.0], atol=1e-12)


def test_reduction_matches_p_laplacian():
    rng = np.random.default_rng(30)
    graph = _random_graph(rng, 30, 5, 6.0)
    instance = graph_to_regression(graph)
    assert instance.n == 25
    for _ in range(100):
        x = rng.standard_normal(25)
        direct = p_laplacian_energy(graph, expand_graph_solution(graph, x))
        reduced = lp_objective(instance.A, instance.b, x, 6.0)
        assert abs(reduced - direct) <= 1e-12 * direct


def test_incidence_rows_have_one_plus_one_minus():
    rng = np.random.default_rng(31)
    graph = _random_graph(rng, 12, 3, 4.0)
    B, n = _incidence(graph)
    assert B.shape == (len(graph.edges), 12)
    assert n == 9
    for row in B:
        assert np.count_nonzero(row == 1.0) == 1
        assert np.count_nonzero(row == -1.0) == 1
        assert np.count_nonzero(row) == 2
        assert np.argmax(row) < np.argmin(row)
    # some rows reach into the labeled columns
    assert np.any(B[:, n:])

    instance = graph_to_regression(graph)
    weights = np.array([w for _, _, w in graph.edges]) ** (1.0 / 4.0)
    np.testing.assert_allclose(instance.A, weights[:, None] * B[:, :n])


def test_graph_validation():
    with pytest.raises(ValueError):
        GraphInstance(num_vertices=2, edges=((0, 0, 1.0),), labels={1: 1.0}, p=2.0)
    with pytest.raises(ValueError):
        GraphInstance(num_vertices=2, edges=((0, 1, 0.0),), labels={1: 1.0}, p=2.0)
    with pytest.raises(ValueError):
        GraphInstance(num_vertices=2, edges=((0, 1, 1.0),), labels={0: 1.0, 1: 1.0}, p=2.0)
    with pytest.raises(ValueError):
        GraphInstance(num_vertices=2, edges=((0, 1, 1.0),), labels={}, p=2.0)


def test_knn_complete_graph():
    graph = generate_knn_graph_instance(20, dim=3, k=20, n_labels=2, p=4.0, seed=5)
    assert len(graph.edges) == 190
    assert all(w > 0 for _, _, w in graph.edges)


def test_knn_counts_the_vertex_itself():
    # k = 2: one other point per vertex, so at most n edges
    graph = generate_knn_graph_instance(30, dim=2, k=2, n_labels=2, p=4.0, seed=6)
    assert 15 <= len(graph.edges) <= 30
    assert all(u != v for u, v, _ in graph.edges)


def test_knn_edge_count_and_degree():
    graph = generate_knn_graph_instance(1000, dim=10, k=10, n_labels=10, p=8.0, seed=0)
    assert 5000 <= len(graph.edges) <= 6100
    degree = np.zeros(1000, dtype=int)
    for u, v, _ in graph.edges:
        degree[u] += 1
        degree[v] += 1
    assert degree.min() >= 9
    assert len(graph.labels) == 10
    assert all(0.0 <= value < 1.0 for value in graph.labels.values())


def test_knn_is_deterministic():
    first = generate_knn_graph_instance(200, seed=9)
    second = generate_knn_graph_instance(200, seed=9)
    assert first.edges == second.edges
    assert first.labels == second.labels


def test_knn_rejects_bad_parameters():
    with pytest.raises(InvalidInstance):
        generate_knn_graph_instance(10, k=11, n_labels=2)
    with pytest.raises(InvalidInstance):
        generate_knn_graph_instance(10, k=1, n_labels=2)
    with pytest.raises(InvalidInstance):
        generate_knn_graph_instance(10, k=3, n_labels=10)


def test_rescale_to_unit_optimum():
    instance = generate_random_matrix_instance(30, 5, 4.0, seed=3)
    optimum = lp_objective(instance.A, instance.b, reference_solve(instance), 4.0)
    rescaled = rescale_to_unit_optimum(instance, optimum)
    assert lp_objective(rescaled.A, rescaled.b, reference_solve(rescaled), 4.0) == pytest.approx(1.0, rel=1e-9)


def test_registry_lists_generators():
    assert set(generator_registry.list_generators()) == {"matrix", "graph"}
    instance = generator_registry.get_generator("matrix").generate(7, m=6, n=3)
    assert isinstance(instance, ProblemInstance) and instance.A.shape == (6, 3)
    with pytest.raises(ConfigurationError):
        generator_registry.get_generator("sparse")
    with pytest.raises(ValueError):
        generator_registry.get_generator("matrix").generate(0, vertices=3)


def test_matrix_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    instance = ProblemInstance(
        A=rng.standard_normal((3, 2)),
        b=rng.standard_normal(3),
        C=rng.standard_normal((1, 2)),
        d=rng.standard_normal(1),
        p=4.5,
    )
    path = tmp_path / "instance.json"
    write_instance(instance, path)
    loaded = read_instance(path)
    for field in ("A", "b", "C", "d"):
        assert getattr(loaded, field).tobytes() == getattr(instance, field).tobytes()
    assert loaded.p == instance.p
    assert json.loads(path.read_text())["format_version"] == 1


def test_graph_round_trip(tmp_path):
    graph = generate_knn_graph_instance(50, k=5, n_labels=3, p=6.0, seed=4)
    path = tmp_path / "graph.json"
    write_instance(graph, path)
    assert read_instance(path) == graph


def test_writes_are_byte_identical(tmp_path):
    write_instance(generate_random_matrix_instance(4, 3, 3.0, seed=8), tmp_path / "a.json")
    write_instance(generate_random_matrix_instance(4, 3, 3.0, seed=8), tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_malformed_header_names_the_field(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"format_version": 1, "type": "matrix", "m": "three", "n": 1, "p": 2, "A": [1], "b": [1]}))
    with pytest.raises(ParseError) as excinfo:
        read_instance(path)
    assert excinfo.value.field == "m"

    path.write_text(json.dumps({"format_version": 2, "type": "matrix"}))
    with pytest.raises(ParseError) as excinfo:
        read_instance(path)
    assert excinfo.value.field == "format_version"


def test_invalid_json_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "format_version": 1,\n  "type": \n}')
    with pytest.raises(ParseError) as excinfo:
        read_instance(path)
    assert excinfo.value.line == 4


def test_dimension_mismatch(tmp_path):
    path = tmp_path / "short.json"
    path.write_text(json.dumps({"format_version": 1, "type": "matrix", "m": 2, "n": 2, "p": 2, "A": [1, 0, 0], "b": [1, 1]}))
    with pytest.raises(DimensionMismatch) as excinfo:
        read_instance(path)
    assert excinfo.value.field == "A"


def test_duplicate_edge_is_a_parse_error(tmp_path):
    path = tmp_path / "dup.json"
    path.write_text(json.dumps({
        "format_version": 1,
        "type": "graph",
        "vertices": 3,
        "p": 2,
        "edges": [[0, 1, 1.0], [1, 2, 1.0], [1, 0, 2.0]],
        "labels": {"0": 0.0},
    }))
    with pytest.raises(ParseError) as excinfo:
        read_instance(path)
    assert excinfo.value.field == "edges.2"


def test_solution_round_trip(tmp_path):
    path = tmp_path / "solution.json"
    write_solution(np.array([0.25, -1.5]), 0.125, 7, path)
    solution = read_solution(path)
    assert solution.x == [0.25, -1.5]
    assert solution.objective == 0.125
    assert solution.iterations == 7


@pytest.mark.parametrize("key", ["00", "+1", "-1", " 1", "x"])
def test_label_keys_must_be_canonical_vertex_ids(tmp_path, key):
    path = tmp_path / "labels.json"
    path.write_text(json.dumps({
        "format_version": 1,
        "type": "graph",
        "vertices": 3,
        "p": 2,
        "edges": [[0, 1, 1.0], [1, 2, 1.0]],
        "labels": {"0": 0.0, key: 5.0},
    }))
    with pytest.raises(ParseError) as excinfo:
        read_instance(path)
    assert excinfo.value.field == f"labels.{key}"


def test_label_keys_that_alias_a_vertex_are_rejected(tmp_path):
    path = tmp_path / "alias.json"
    path.write_text('{"format_version": 1, "type": "graph", "vertices": 3, "p": 2, '
                    '"edges": [[0, 1, 1.0], [1, 2, 1.0]], "labels": {"0": 0.0, "00": 5.0, "2": 1.0}}')
    with pytest.raises(ParseError):
        read_instance(path)
