"""
Tests for DOT export
"""

import pytest

from tropigon import gallery
from tropigon.divisor_theory import Divisor
from tropigon.dot_export import PALETTE, DotOptions, to_dot
from tropigon.errors import TropigonError
from tropigon.moduli_cells import build_3_ladders, enumerate_trees, ladder_type
from tropigon.trigonal_builder import trigonal_cover


def test_metric_graph_dot(theta):
    text = to_dot(theta)
    lines = text.splitlines()
    assert lines[0] == 'graph "G" {'
    assert lines[-1] == "}"
    assert '  "x" [label="x"];' in lines
    assert '  "x" -- "y" [label="e0 l=1/1"];' in lines


def test_weights_and_chips(looped):
    m, d = looped
    text = to_dot(m, DotOptions(name="looped", divisor=d, show_lengths=False))
    assert 'graph "looped" {' in text
    assert '"x" [label="x [2]"]' in text
    assert '"x" -- "x" [label="c"]' in text


def test_chips_on_edges(prism):
    m, d = prism
    text = to_dot(m, DotOptions(divisor=d))
    assert 'label="middle l=2/1 1@1/1"' in text


def test_cover_dot_colors_fibres(prism):
    m, d = prism
    text = to_dot(trigonal_cover(m, d), DotOptions(name="cover"))
    assert "subgraph cluster_source" in text
    assert "subgraph cluster_target" in text
    assert '"t:t0"' in text
    assert "μ=1" in text
    assert f'color="{PALETTE[0]}"' in text


def test_trigonal_type_dot():
    (path,) = enumerate_trees(3)
    tt = ladder_type(build_3_ladders(path)[0])
    text = to_dot(tt)
    assert "μ=0" in text
    assert " l=1/1" not in text


def test_output_is_deterministic():
    phi = gallery.contracting_cover()
    assert to_dot(phi) == to_dot(gallery.contracting_cover())


def test_quotes_are_escaped():
    text = to_dot(gallery.theta(), DotOptions(name='say "hi"'))
    assert text.startswith('graph "say \\"hi\\"" {')


def test_unrenderable_value():
    with pytest.raises(TropigonError):
        to_dot(Divisor())
