"""
Tests for JSON documents
"""

import json

import pytest

from tropigon import gallery
from tropigon.divisor_theory import Divisor, divisor_of, point_divisor, tent_function
from tropigon.errors import DocumentError
from tropigon.harmonic_morphism import check_morphism
from tropigon.metric_graph import MetricGraph, Point
from tropigon.moduli_cells import (
    TrigonalType,
    are_isomorphic_types,
    build_3_ladders,
    enumerate_trees,
    ladder_type,
)
from tropigon.serialization import (
    emit,
    normalize_text,
    parse,
    parse_document,
    read_document,
    write_document,
)


def document(kind, payload, version=1):
    return json.dumps({"kind": kind, "schema_version": version, "payload": payload})


def test_metric_graph_document(theta):
    text = emit(theta)
    data = json.loads(text)
    assert data["kind"] == "metric_graph"
    assert data["schema_version"] == 1
    assert data["payload"]["edges"][0] == {"id": "e0", "ends": ["x", "y"], "length": "1/1"}
    assert text.endswith("\n")
    assert parse(text) == theta


def test_metric_graph_needs_every_length():
    text = document(
        "metric_graph",
        {
            "vertices": [{"id": "x"}, {"id": "y"}],
            "edges": [
                {"id": "a", "ends": ["x", "y"], "length": "1/3"},
                {"id": "b", "ends": ["x", "y"], "length": 2},
                {"id": "c", "ends": ["x", "y"]},
            ],
        },
    )
    with pytest.raises(DocumentError) as info:
        parse(text)
    assert info.value.field == "payload.edges[2].length"


def test_float_lengths_are_rejected():
    text = document(
        "metric_graph",
        {"vertices": [{"id": "x"}], "edges": [{"id": "a", "ends": ["x", "x"], "length": 0.5}]},
    )
    with pytest.raises(DocumentError) as info:
        parse(text)
    assert info.value.field == "payload.edges[0].length"


def test_envelope_errors():
    with pytest.raises(DocumentError) as info:
        parse_document("{not json")
    assert info.value.field.startswith("line 1")
    with pytest.raises(DocumentError) as info:
        parse(document("banana", {}))
    assert info.value.field == "document.kind"
    with pytest.raises(DocumentError) as info:
        parse(document("graph", {}, version=2))
    assert info.value.field == "document.schema_version"
    with pytest.raises(DocumentError):
        parse("[]")


def test_graph_field_errors():
    with pytest.raises(DocumentError) as info:
        parse(document("graph", {"vertices": [{"id": "a", "weight": -1}], "edges": []}))
    assert info.value.field == "payload.vertices[0].weight"
    one_end = {"vertices": [{"id": "a"}], "edges": [{"id": "e", "ends": ["a"]}]}
    with pytest.raises(DocumentError) as info:
        parse(document("graph", one_end))
    assert info.value.field == "payload.edges[0].ends"
    dangling = {"vertices": [{"id": "a"}], "edges": [{"id": "e", "ends": ["a", "b"]}]}
    with pytest.raises(DocumentError):
        parse(document("graph", dangling))


def test_divisor_documents(prism):
    m, d = prism
    assert parse(emit(d, m)) == d
    assert parse(emit(d), m) == d
    with pytest.raises(DocumentError):
        parse(emit(point_divisor(Point(vertex="nowhere"))), m)
    bad = document("divisor", {"chips": [{"point": "v:a0", "coefficient": "2"}]})
    with pytest.raises(DocumentError) as info:
        parse(bad)
    assert info.value.field == "payload.chips[0]"


def test_rational_function_document(theta):
    f = tent_function(theta, "e1", "1/4", "3/4", slope=2)
    g = parse(emit(f))
    assert g.ambient == theta
    assert divisor_of(g) == divisor_of(f)


def test_morphism_document():
    phi = gallery.contracting_cover()
    assert parse(emit(phi)) == phi


def test_trigonal_type_document():
    (path,) = enumerate_trees(3)
    tt = ladder_type(build_3_ladders(path)[0])
    back = parse(emit(tt))
    assert isinstance(back, TrigonalType)
    assert are_isomorphic_types(back, tt)


def test_report_document():
    report = check_morphism(gallery.degree_two_morphism())
    data = parse(emit(report))
    assert data["harmonic"] is True
    assert data["degree"] == 2


def test_normalize_text_is_stable(looped):
    m, d = looped
    for text in (emit(m), emit(d, m), emit(gallery.degree_two_morphism())):
        assert normalize_text(text) == text


def test_files(tmp_path, theta):
    path = write_document(str(tmp_path / "nested" / "theta.json"), theta)
    assert read_document(path) == theta
    with pytest.raises(DocumentError):
        read_document(str(tmp_path / "missing.json"))


def test_unknown_values_cannot_be_emitted():
    with pytest.raises(DocumentError):
        emit(3)


def test_embedded_graph_wins_over_argument(theta, k4):
    d = Divisor.of([Point(vertex="x")])
    assert parse(emit(d, theta), MetricGraph.from_dict(k4.to_dict())) == d
