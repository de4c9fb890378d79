"""
Serialization - JSON Documents

Every value travels as a document {kind, schema_version, payload}. Rationals
are "p/q" strings and are never parsed through floating point.

Features:
- parse/emit for graphs, metric graphs, divisors, rational functions,
  morphisms, trigonal types and reports
- schema violations reported with the offending field path or source line
- file helpers used by the command-line interface
"""

import json
import os
from dataclasses import dataclass
from typing import Any, Dict, Optional

from loguru import logger

from .divisor_theory import Divisor, RationalFn, normalize_divisor, rational_fn
from .errors import DocumentError, TropigonError
from .graph_core import WeightedGraph
from .harmonic_morphism import IndexedMorphism
from .metric_graph import MetricGraph, as_fraction, parse_point
from .moduli_cells import TrigonalType

SCHEMA_VERSION = 1
KINDS = ("graph", "metric_graph", "divisor", "rational_fn", "morphism", "trigonal_type", "report")


@dataclass(frozen=True)
class Document:
    """
    A parsed JSON document before its payload is turned into a value.

    Attributes:
        kind (str): One of KINDS
        schema_version (int): Format version of the payload
        payload (Dict[str, Any]): Kind-specific content
    """

    kind: str
    schema_version: int
    payload: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "schema_version": self.schema_version, "payload": self.payload}


# ============= Field checks =============


def _require(data: Dict[str, Any], key: str, path: str, kind: type = object) -> Any:
    if not isinstance(data, dict) or key not in data:
        raise DocumentError("missing field", field=f"{path}.{key}")
    value = data[key]
    if kind is not object and not isinstance(value, kind):
        raise DocumentError(
            f"expected {kind.__name__}, got {type(value).__name__}", f"{path}.{key}"
        )
    return value


def _check_graph(data: Dict[str, Any], path: str, metric: bool) -> None:
    vertices = _require(data, "vertices", path, list)
    for i, item in enumerate(vertices):
        _require(item, "id", f"{path}.vertices[{i}]")
        weight = item.get("weight", 0) if isinstance(item, dict) else None
        if not isinstance(weight, int) or isinstance(weight, bool) or weight < 0:
            raise DocumentError(f"invalid weight {weight!r}", f"{path}.vertices[{i}].weight")
    edges = _require(data, "edges", path, list)
    for i, item in enumerate(edges):
        where = f"{path}.edges[{i}]"
        _require(item, "id", where)
        ends = _require(item, "ends", where, list)
        if len(ends) != 2:
            raise DocumentError("an edge needs exactly two ends", f"{where}.ends")
        if metric:
            length = _require(item, "length", where)
            if not isinstance(length, (str, int)) or isinstance(length, bool):
                raise DocumentError(
                    f"length must be a 'p/q' string, got {length!r}", f"{where}.length"
                )
            try:
                as_fraction(length)
            except TropigonError as e:
                raise DocumentError(str(e), f"{where}.length") from e


def _check_chips(data: Dict[str, Any], path: str) -> None:
    for i, item in enumerate(_require(data, "chips", path, list)):
        where = f"{path}.chips[{i}]"
        point = _require(item, "point", where, str)
        coefficient = _require(item, "coefficient", where)
        if not isinstance(coefficient, int) or isinstance(coefficient, bool):
            raise DocumentError(f"coefficient must be an integer, got {coefficient!r}", where)
        try:
            parse_point(point)
        except TropigonError as e:
            raise DocumentError(str(e), f"{where}.point") from e


# ============= Documents =============


def parse_document(text: str) -> Document:
    """
    Splits document text into kind, version and payload.

    Raises:
        DocumentError: On invalid JSON or a malformed envelope
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(e.msg, field=f"line {e.lineno} column {e.colno}") from e
    if not isinstance(data, dict):
        raise DocumentError("a document must be a JSON object")
    kind = _require(data, "kind", "document", str)
    if kind not in KINDS:
        raise DocumentError(f"unknown kind {kind!r}", field="document.kind")
    version = _require(data, "schema_version", "document", int)
    if version != SCHEMA_VERSION:
        raise DocumentError(
            f"unsupported schema version {version}", field="document.schema_version"
        )
    payload = _require(data, "payload", "document", dict)
    return Document(kind=kind, schema_version=version, payload=payload)


def _value(doc: Document, graph: Optional[MetricGraph]) -> Any:
    payload = doc.payload
    if doc.kind == "graph":
        _check_graph(payload, "payload", metric=False)
        return WeightedGraph.from_dict(payload)
    if doc.kind == "metric_graph":
        _check_graph(payload, "payload", metric=True)
        return MetricGraph.from_dict(payload)
    if doc.kind == "divisor":
        _check_chips(payload, "payload")
        d = Divisor.from_dict(payload)
        if "graph" in payload:
            _check_graph(payload["graph"], "payload.graph", metric=True)
            graph = MetricGraph.from_dict(payload["graph"])
        return normalize_divisor(graph, d) if graph is not None else d
    if doc.kind == "rational_fn":
        ambient = _require(payload, "graph", "payload", dict)
        _check_graph(ambient, "payload.graph", metric=True)
        m = MetricGraph.from_dict(ambient)
        breakpoints = _require(payload, "breakpoints", "payload", list)
        values = {
            parse_point(_require(item, "point", f"payload.breakpoints[{i}]", str)): as_fraction(
                _require(item, "value", f"payload.breakpoints[{i}]")
            )
            for i, item in enumerate(breakpoints)
        }
        return rational_fn(m, values)
    if doc.kind == "morphism":
        for side in ("source", "target"):
            _check_graph(_require(payload, side, "payload", dict), f"payload.{side}", metric=False)
        for key in ("vertex_map", "edge_map", "indices"):
            _require(payload, key, "payload", dict)
        return IndexedMorphism.from_dict(payload)
    if doc.kind == "trigonal_type":
        morphism = _require(payload, "morphism", "payload", dict)
        return TrigonalType.of(_value(Document("morphism", SCHEMA_VERSION, morphism), None))
    return payload


def parse(text: str, graph: Optional[MetricGraph] = None) -> Any:
    """
    Turns document text into the value it describes.

    Args:
        text: The document
        graph: Metric graph to validate divisor points against, when the
            document does not embed one

    Returns:
        Any: WeightedGraph, MetricGraph, Divisor, RationalFn, IndexedMorphism,
            TrigonalType, or a plain dict for reports

    Raises:
        DocumentError: On any schema or value violation
    """
    doc = parse_document(text)
    try:
        return _value(doc, graph)
    except DocumentError:
        raise
    except (TropigonError, KeyError, TypeError, ValueError) as e:
        raise DocumentError(str(e), field="payload") from e


def to_document(value: Any, graph: Optional[MetricGraph] = None) -> Document:
    """Wraps a value in a document; `graph` is embedded with divisors when given."""
    if isinstance(value, MetricGraph):
        return Document("metric_graph", SCHEMA_VERSION, value.to_dict())
    if isinstance(value, WeightedGraph):
        return Document("graph", SCHEMA_VERSION, value.to_dict())
    if isinstance(value, Divisor):
        payload = value.to_dict()
        if graph is not None:
            payload["graph"] = graph.to_dict()
        return Document("divisor", SCHEMA_VERSION, payload)
    if isinstance(value, RationalFn):
        return Document(
            "rational_fn", SCHEMA_VERSION, {"graph": value.ambient.to_dict(), **value.to_dict()}
        )
    if isinstance(value, IndexedMorphism):
        return Document("morphism", SCHEMA_VERSION, value.to_dict())
    if isinstance(value, TrigonalType):
        return Document("trigonal_type", SCHEMA_VERSION, value.to_dict())
    if isinstance(value, dict):
        return Document("report", SCHEMA_VERSION, value)
    if hasattr(value, "to_dict"):
        return Document("report", SCHEMA_VERSION, value.to_dict())
    raise DocumentError(f"cannot serialize {type(value).__name__}")


def emit(value: Any, graph: Optional[MetricGraph] = None) -> str:
    """Document text for a value: sorted keys, two-space indent, trailing newline."""
    return json.dumps(to_document(value, graph).to_dict(), indent=2, sort_keys=True) + "\n"


def normalize_text(text: str) -> str:
    """One normalization pass: parse and emit again."""
    doc = parse_document(text)
    graph = None
    if doc.kind == "divisor" and "graph" in doc.payload:
        graph = MetricGraph.from_dict(doc.payload["graph"])
    return emit(parse(text), graph)


# ============= Files =============


def read_document(path: str, graph: Optional[MetricGraph] = None) -> Any:
    """
    Reads and parses a UTF-8 document file.

    Raises:
        DocumentError: If the file is missing or the document is invalid
    """
    if not os.path.exists(path):
        raise DocumentError(f"no such file: {path}")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        return parse(text, graph)
    except DocumentError as e:
        raise DocumentError(f"{path}: {str(e)}") from e


def write_document(path: str, value: Any, graph: Optional[MetricGraph] = None) -> str:
    """Writes a value as a document file and returns the path."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(emit(value, graph))
    logger.debug(f"Wrote {path}")
    return path

