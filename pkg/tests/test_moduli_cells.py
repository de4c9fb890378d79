"""
Tests for trigonal types, 3-ladders and maximal cells
"""

from dataclasses import replace

import pytest

from tropigon import gallery
from tropigon.errors import ModuliError
from tropigon.graph_core import WeightedGraph, genus, is_k_edge_connected, valence
from tropigon.harmonic_morphism import check_morphism
from tropigon.moduli_cells import (
    TrigonalType,
    admissible_modification,
    are_isomorphic_types,
    build_3_ladders,
    certify_admissible,
    cone_descriptor,
    edge_relation,
    enumerate_trees,
    expected_dimension,
    facets,
    ladder_type,
    maximal_cells,
    moduli_summary,
    phi_contract,
)


@pytest.fixture
def path_ladders():
    (path,) = enumerate_trees(3)
    return build_3_ladders(path)


@pytest.mark.parametrize("n, count", [(2, 1), (3, 1), (4, 2), (5, 2)])
def test_enumerate_trees(n, count):
    """Trees with valences at most 3; the star on five vertices is left out"""
    assert len(enumerate_trees(n)) == count


def test_enumerate_trees_needs_two_vertices():
    with pytest.raises(ModuliError):
        enumerate_trees(1)


def test_star_tree_has_three_ladders():
    """Four ways to place the leaf middles, two of them isomorphic"""
    (star,) = [t for t in enumerate_trees(4) if any(valence(t, v) == 3 for v in t.vertices)]
    assert len(build_3_ladders(star)) == 3


def test_ladders_reject_high_valence():
    star = WeightedGraph.from_edge_list([("c", "1"), ("c", "2"), ("c", "3"), ("c", "4")])
    with pytest.raises(ModuliError):
        build_3_ladders(star)


@pytest.mark.parametrize(
    "n",
    [
        2,
        3,
        4,
        5,
        pytest.param(6, marks=pytest.mark.slow),
        pytest.param(7, marks=pytest.mark.slow),
    ],
)
def test_ladder_shape(n):
    """A ladder over n tree vertices has 3n vertices, 4n - 1 edges, genus n and 2n + 1 classes"""
    for tree in enumerate_trees(n):
        for ladder in build_3_ladders(tree):
            assert len(ladder.graph.vertices) == 3 * n
            assert len(ladder.graph.edges) == 4 * n - 1
            assert genus(ladder.graph) == n
            tt = ladder_type(ladder)
            assert len(edge_relation(tt).classes) == 2 * n + 1
            assert tt.validate() == []
            assert check_morphism(ladder.morphism).degree == 3


def test_ladder_types_are_3_edge_connected(path_ladders):
    for ladder in path_ladders:
        tt = ladder_type(ladder)
        assert tt.genus == 3
        assert is_k_edge_connected(tt.stable, 3)
        assert are_isomorphic_types(tt, ladder_type(ladder))


def test_cone_dimension_in_genus_three(path_ladders):
    dims = {cone_descriptor(ladder_type(ladder)).dimension for ladder in path_ladders}
    assert max(dims) == expected_dimension(3) == 6


def test_expected_dimension():
    assert expected_dimension(3) == 6
    assert expected_dimension(4) == 9
    assert expected_dimension(5) == 11


def test_edge_relation_constraints(path_ladders):
    tt = ladder_type(path_ladders[0])
    relation = edge_relation(tt)
    horizontal = [c for c, v in zip(relation.classes, relation.vertical) if not v]
    assert len(horizontal) == 2
    assert all(len(c) == 3 for c in horizontal)
    assert len(relation.constraints(tt.morphism)) == 4


# ============= φ-contractions =============


def test_phi_contract_empty_selection(path_ladders):
    tt = ladder_type(path_ladders[0])
    assert phi_contract(tt, []) is tt


def test_phi_contract_tree_edge_drops_one_dimension(path_ladders):
    tt = ladder_type(path_ladders[0])
    relation = edge_relation(tt)
    first = relation.classes[0]
    contracted = phi_contract(tt, first)
    assert contracted.genus == tt.genus
    assert len(contracted.tree.edges) == len(tt.tree.edges) - 1
    assert cone_descriptor(contracted).dimension == cone_descriptor(tt).dimension - 1


def test_phi_contract_rejects_partial_class(path_ladders):
    tt = ladder_type(path_ladders[0])
    first = sorted(edge_relation(tt).classes[0])
    with pytest.raises(ModuliError):
        phi_contract(tt, first[:1])
    with pytest.raises(ModuliError):
        phi_contract(tt, ["missing"])


def test_facets_have_codimension_one(path_ladders):
    tt = ladder_type(path_ladders[0])
    found = facets(tt)
    assert found
    for facet in found:
        assert cone_descriptor(facet).dimension == cone_descriptor(tt).dimension - 1
        assert facet.validate() == []


# ============= Admissible modifications =============


def test_modified_ladders_are_certified(path_ladders):
    for ladder in path_ladders:
        modified = admissible_modification(ladder, tree_lengths={"e0": 2})
        assert modified.morphism.contracted_edges() == []
        assert certify_admissible(modified)


def test_certification_rejects_contractions_and_non_harmonic_maps(path_ladders):
    assert not certify_admissible(ladder_type(path_ladders[0]))
    assert not certify_admissible(TrigonalType.of(gallery.non_harmonic_morphism()))


def test_certification_rejects_any_index_two(path_ladders):
    """Raising a single index to 2 breaks harmonicity or the Riemann–Hurwitz balance"""
    for ladder in path_ladders:
        phi = admissible_modification(ladder).morphism
        for e in sorted(phi.source.edges):
            bumped = replace(phi, indices={**phi.indices, e: 2})
            assert not certify_admissible(TrigonalType.of(bumped)), e


@pytest.mark.parametrize(
    "g",
    [3, 4, pytest.param(5, marks=pytest.mark.slow), pytest.param(6, marks=pytest.mark.slow)],
)
def test_every_modified_ladder_is_certified(g):
    for tree in enumerate_trees(g):
        for ladder in build_3_ladders(tree):
            assert certify_admissible(admissible_modification(ladder)), ladder.to_dict()


# ============= Maximal cells =============


def test_genus_three_has_one_cell(mock_env_vars):
    """Every ladder in genus 3 stabilizes to K4"""
    cells = maximal_cells(3)
    assert len(cells) == 1
    assert len(cells[0].graph.vertices) == 4
    assert cells[0].dimension == 6
    summary = moduli_summary(3)
    assert summary.connected
    assert summary.expected_dimension == 6
    assert summary.notes == []


def test_genus_bounds(mock_env_vars):
    with pytest.raises(ModuliError):
        maximal_cells(2)
    with pytest.raises(ModuliError):
        maximal_cells(7)


@pytest.mark.slow
def test_genus_four_cells(mock_env_vars):
    summary = moduli_summary(4)
    assert summary.cells >= 1
    assert all(d == expected_dimension(4) for d in summary.dimensions)
    assert summary.connected


@pytest.mark.slow
def test_parallel_enumeration_matches(mock_env_vars):
    serial = maximal_cells(5, jobs=1)
    parallel = maximal_cells(5, jobs=2)
    assert len(serial) == len(parallel)
    assert sorted(c.dimension for c in serial) == sorted(c.dimension for c in parallel)


@pytest.mark.slow
@pytest.mark.parametrize("g", [5, 6])
def test_cells_have_dimension_2g_plus_1(g, mock_env_vars):
    cells = maximal_cells(g)
    assert cells
    assert [cell.dimension for cell in cells] == [2 * g + 1] * len(cells)


@pytest.mark.slow
def test_genus_five_cells_are_connected(mock_env_vars):
    summary = moduli_summary(5)
    assert summary.dimensions == [11] * summary.cells
    assert summary.connected
    assert summary.notes == []
