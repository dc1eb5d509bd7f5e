"""
Instance and solution file I/O.

Files are UTF-8 JSON. Floats are written with repr, which round-trips
float64 exactly, so read(write(x)) reproduces every array bit for bit.
"""
import json
from pathlib import Path
from typing import Type, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from .schemas import FORMAT_VERSION, GraphInstanceFile, MatrixInstanceFile, SolutionFile
from ..core.exceptions import DimensionMismatch, InvalidInstance, ParseError
from ..core.models import GraphInstance, ProblemInstance
from ..config.logging import get_logger

logger = get_logger(__name__)

FileModel = TypeVar("FileModel", bound=BaseModel)
PathLike = Union[str, Path]


def _reject_duplicate_keys(pairs: list[tuple[str, object]]) -> dict:
    result = {}
    for key, value in pairs:
        if key in result:
            raise ParseError("duplicate key", field=key)
        result[key] = value
    return result


def _load_json(path: PathLike) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise ParseError("top-level value must be a JSON object")
    return data


def _validate(model: Type[FileModel], data: dict) -> FileModel:
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        field = ".".join(str(part) for part in error["loc"]) or None
        raise ParseError(error["msg"], field=field) from exc


def _write_json(payload: dict, path: PathLike) -> None:
    Path(path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


def _matrix_from_file(document: MatrixInstanceFile) -> ProblemInstance:
    m, n = document.m, document.n
    if len(document.A) != m * n:
        raise DimensionMismatch(f"A has {len(document.A)} entries, expected m * n = {m * n}", field="A")
    if len(document.b) != m:
        raise DimensionMismatch(f"b has {len(document.b)} entries, expected m = {m}", field="b")

    C = d = None
    if (document.C is None) != (document.d is None):
        raise ParseError("C and d must be given together", field="C" if document.C is None else "d")
    if document.C is not None:
        c = len(document.d)
        if c == 0 or len(document.C) != c * n:
            raise DimensionMismatch(f"C has {len(document.C)} entries, expected len(d) * n = {c * n}", field="C")
        C = np.array(document.C).reshape(c, n)
        d = np.array(document.d)

    try:
        return ProblemInstance(A=np.array(document.A).reshape(m, n), b=np.array(document.b), C=C, d=d, p=document.p)
    except ValidationError as exc:
        raise InvalidInstance(str(exc)) from exc


def _graph_from_file(document: GraphInstanceFile) -> GraphInstance:
    seen: set[tuple[int, int]] = set()
    for index, (u, v, _) in enumerate(document.edges):
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"duplicate edge {key}", field=f"edges.{index}")
        seen.add(key)

    # keys must be canonical decimal ids so that "7" and "07" cannot name one vertex twice
    labels = {}
    for key, value in document.labels.items():
        if not (key.isascii() and key.isdigit()) or str(int(key)) != key:
            raise ParseError(f"label key {key!r} is not a canonical vertex id", field=f"labels.{key}")
        labels[int(key)] = value

    try:
        return GraphInstance(
            num_vertices=document.vertices,
            edges=tuple(document.edges),
            labels=labels,
            p=document.p,
        )
    except ValidationError as exc:
        raise InvalidInstance(str(exc)) from exc


def read_instance(path: PathLike) -> Union[ProblemInstance, GraphInstance]:
    """
    Load a matrix or graph instance file.

    Raises:
        ParseError: malformed JSON, unknown type/version, wrong field types, duplicate edges
        DimensionMismatch: array lengths disagree with m, n or d
        InvalidInstance: the values violate the instance invariants
        OSError: the file cannot be read
    """
    data = _load_json(path)
    if data.get("format_version") != FORMAT_VERSION:
        raise ParseError(f"unsupported format version {data.get('format_version')!r}", field="format_version")

    kind = data.get("type")
    if kind == "matrix":
        instance = _matrix_from_file(_validate(MatrixInstanceFile, data))
    elif kind == "graph":
        instance = _graph_from_file(_validate(GraphInstanceFile, data))
    else:
        raise ParseError(f"unknown instance type {kind!r}", field="type")
    logger.debug("Instance loaded", path=str(path), type=kind)
    return instance


def write_instance(instance: Union[ProblemInstance, GraphInstance], path: PathLike) -> None:
    """Write an instance in the versioned JSON format."""
    if isinstance(instance, GraphInstance):
        document = GraphInstanceFile(
            format_version=FORMAT_VERSION,
            type="graph",
            vertices=instance.num_vertices,
            p=instance.p,
            edges=list(instance.edges),
            labels={str(vertex): instance.labels[vertex] for vertex in sorted(instance.labels)},
        )
    else:
        document = MatrixInstanceFile(
            format_version=FORMAT_VERSION,
            type="matrix",
            m=instance.m,
            n=instance.n,
            p=instance.p,
            A=instance.A.ravel().tolist(),
            b=instance.b.tolist(),
            C=None if instance.C is None else instance.C.ravel().tolist(),
            d=None if instance.d is None else instance.d.tolist(),
        )
    _write_json(document.model_dump(exclude_none=True), path)
    logger.debug("Instance written", path=str(path), type=document.type)


def read_solution(path: PathLike) -> SolutionFile:
    """Load a solution file {"x": [...], "objective": number, "iterations": int}."""
    return _validate(SolutionFile, _load_json(path))


def write_solution(x: np.ndarray, objective: float, iterations: int, path: PathLike) -> None:
    document = SolutionFile(x=np.asarray(x, dtype=np.float64).tolist(), objective=objective, iterations=iterations)
    _write_json(document.model_dump(), path)
