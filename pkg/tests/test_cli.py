"""
Tests for the command-line interface
"""

import json

import pytest

from tropigon import gallery
from tropigon.cli import EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE, main
from tropigon.divisor_theory import point_divisor
from tropigon.metric_graph import MetricGraph, Point
from tropigon.serialization import read_document, write_document


@pytest.fixture
def docs(tmp_path):
    """Gallery documents written to a temporary directory"""

    def write(name, value, graph=None):
        return write_document(str(tmp_path / name), value, graph)

    m, d = gallery.uneven_prism()
    k4 = gallery.k4()
    d1, d2 = gallery.k4_divisors()
    degree_two = gallery.degree_two_morphism()
    return {
        "dir": tmp_path,
        "prism": write("prism.json", m),
        "prism_d": write("prism-d.json", d, m),
        "theta": write("theta.json", gallery.theta()),
        "k4": write("k4.json", k4),
        "k4_d1": write("k4-d1.json", d1, k4),
        "k4_d2": write("k4-d2.json", d2, k4),
        "degree_two": write("degree-two.json", degree_two),
        "non_harmonic": write("non-harmonic.json", gallery.non_harmonic_morphism()),
        "contracting": write("contracting.json", gallery.contracting_cover()),
        "target_a": write(
            "target-a.json", point_divisor(Point(vertex="a")), degree_two.target_metric
        ),
    }


def read_json(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def test_gallery_and_rank(tmp_path, capsys):
    graph, divisor = str(tmp_path / "g.json"), str(tmp_path / "d.json")
    assert main(["gallery", "prism", "-o", graph]) == EXIT_OK
    assert main(["gallery", "prism", "--divisor", "-o", divisor]) == EXIT_OK
    capsys.readouterr()
    assert main(["rank", graph, divisor]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "1"


def test_info(docs, capsys):
    assert main(["info", docs["theta"]]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)["payload"]
    assert report["genus"] == 2
    assert report["edge_connectivity"] == 3
    assert report["total_length"] == "3/1"


def test_equiv(docs, capsys):
    assert main(["equiv", docs["k4"], docs["k4_d1"], docs["k4_d1"]]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "true"
    assert main(["equiv", docs["k4"], docs["k4_d1"], docs["k4_d2"]]) == EXIT_NEGATIVE
    assert capsys.readouterr().out.strip() == "false"


def test_reduce(docs):
    out = str(docs["dir"] / "reduced.json")
    assert main(["reduce", docs["k4"], docs["k4_d1"], "--base", "v:v4", "-o", out]) == EXIT_OK
    assert read_document(out) == point_divisor(Point(vertex="v4"), 3)
    assert main(["reduce", docs["k4"], docs["k4_d1"], "--base", "v:nowhere"]) == EXIT_USAGE
    assert main(["reduce", docs["k4"], docs["k4_d1"], "--base", "garbage"]) == EXIT_USAGE


def test_check_morphism(docs, capsys):
    assert main(["check-morphism", docs["degree_two"]]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["payload"]["degree"] == 2
    assert main(["check-morphism", docs["non_harmonic"]]) == EXIT_NEGATIVE


def test_pullback(docs):
    out = str(docs["dir"] / "pulled.json")
    assert main(["pullback", docs["degree_two"], docs["target_a"], "-o", out]) == EXIT_OK
    assert read_document(out).degree == 2


def test_remove_contractions(docs):
    out = str(docs["dir"] / "folded.json")
    assert main(["remove-contractions", docs["contracting"], "-o", out]) == EXIT_OK
    assert read_document(out).contracted_edges() == []
    assert main(["remove-contractions", docs["non_harmonic"]]) == EXIT_USAGE


def test_trigonal_cover(docs):
    out, dot = str(docs["dir"] / "cover.json"), str(docs["dir"] / "cover.dot")
    args = ["trigonal-cover", docs["prism"], docs["prism_d"], "-o", out, "--dot", dot]
    assert main(args) == EXIT_OK
    assert read_json(out)["kind"] == "morphism"
    with open(dot, encoding="utf-8") as f:
        assert f.read().startswith('graph "cover" {')


def test_trigonal_cover_without_divisor(docs):
    assert main(["trigonal-cover", docs["theta"], "-o", str(docs["dir"] / "c.json")]) == EXIT_OK


def test_trigonal_cover_of_graph_with_bridge(tmp_path):
    m = MetricGraph.from_edge_list([("a", "a", 1), ("a", "b", 1), ("b", "b", 1)])
    graph = write_document(str(tmp_path / "bridge.json"), m)
    divisor = write_document(str(tmp_path / "3a.json"), point_divisor(Point(vertex="a"), 3), m)
    assert main(["trigonal-cover", graph, divisor]) == EXIT_NEGATIVE


def test_find_divisor(docs):
    out = str(docs["dir"] / "found.json")
    assert main(["find-divisor", docs["k4"], "--embed", "-o", out]) == EXIT_OK
    payload = read_json(out)["payload"]
    assert "graph" in payload
    assert sum(chip["coefficient"] for chip in payload["chips"]) == 3


def test_ladders(capsys):
    assert main(["ladders", "--max-genus", "3"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)["payload"]
    assert sorted(report) == ["2", "3"]
    assert report["3"]["vertices"] == [9]
    assert report["3"]["edges"] == [11]
    assert report["3"]["classes"] == [7]


def test_moduli(capsys, mock_env_vars):
    assert main(["moduli", "--genus", "3"]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)["payload"]
    assert summary["cells"] == 1
    assert summary["dimensions"] == [6]
    assert summary["connected"] is True
    assert main(["moduli", "--genus", "2"]) == EXIT_USAGE


def test_to_dot(docs, capsys):
    assert main(["to-dot", docs["prism"], "--divisor", docs["prism_d"], "--name", "P"]) == EXIT_OK
    assert capsys.readouterr().out.startswith('graph "P" {')
    assert main(["to-dot", docs["prism_d"]]) == EXIT_USAGE
    assert main(["to-dot", docs["degree_two"], "--divisor", docs["prism_d"]]) == EXIT_USAGE


def test_usage_errors(docs, tmp_path):
    assert main([]) == EXIT_USAGE
    assert main(["gallery", "unicorn"]) == EXIT_USAGE
    assert main(["info", str(tmp_path / "missing.json")]) == EXIT_USAGE
    assert main(["info", docs["prism_d"]]) == EXIT_USAGE
