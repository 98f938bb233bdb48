#!/usr/bin/env python3
"""
Tests for reductions, the per-case extensions and the recursive colouring
"""
import pytest

from tnsd.colouring import TotalColouring, is_tnsd
from tnsd.configurations import SEARCH_ORDER, ConfigurationKind, ConfigurationOccurrence, detect, find_any_reducible
from tnsd.errors import DomainError, StaleOccurrenceError
from tnsd.generators import named_graph, planted_instance, random_sparse_graphs, random_tree
from tnsd.graph_core import Graph
from tnsd.prover import (
    ExtensionCase,
    colour_edgeless,
    extend,
    extend_with_strategy,
    recolour_3minus,
    recursive_colour,
    reduce,
)


def _c1_on_path() -> ConfigurationOccurrence:
    return ConfigurationOccurrence(kind="C1", anchor=0, roles={"v": 0, "u": 1}, k=8)


# ------------------------------------------------------------ reduce

def test_reduce_c1():
    g = named_graph("P3")
    red = reduce(g, _c1_on_path())
    assert red.removed_edges == [(0, 1)]
    assert red.uncoloured_vertices == [0]
    assert red.extension_case == ExtensionCase.CASE1
    assert red.reduced.edges == ((1, 2),)
    assert red.to_record()["case"] == "1"


def test_reduce_lemma8_removes_every_low_edge():
    g = named_graph("K1,8")
    occ = find_any_reducible(g, 8)
    red = reduce(g, occ)
    assert red.extension_case == ExtensionCase.LEMMA8
    assert red.reduced.edge_count == 0
    assert sorted(red.uncoloured_vertices) == list(range(1, 9))


def test_reduce_c8_uncolours_anchor_and_low_neighbours():
    g = named_graph("K1,8")
    occ = detect(g, 8, ConfigurationKind.C8)[0]
    red = reduce(g, occ)
    assert red.removed_edges == [(0, x) for x in range(1, 8)]
    assert red.uncoloured_vertices == [0, 1, 2, 3, 4, 5, 6, 7]
    assert red.reduced.edges == ((0, 8),)


def test_reduce_rejects_stale_occurrences():
    g = named_graph("P3")
    with pytest.raises(StaleOccurrenceError):
        reduce(g, ConfigurationOccurrence(kind="C1", anchor=0, roles={"v": 0, "u": 2}, k=8))
    with pytest.raises(StaleOccurrenceError):
        reduce(g.without_edges([(0, 1)]), _c1_on_path())


def test_reduce_rejects_c4_with_adjacent_spokes():
    edges = [(0, x) for x in range(1, 6)]
    edges += [(1, 2), (1, 6), (1, 7), (2, 6), (2, 7), (3, 6), (3, 7), (3, 8)]
    g = Graph(9, edges)
    occ = ConfigurationOccurrence(kind="C4", anchor=0, roles={"v": 0, "v1": 1, "v2": 2, "v3": 3}, k=8)
    with pytest.raises(StaleOccurrenceError):
        reduce(g, occ)


def test_corollary_occurrences_are_not_reduced():
    occ = ConfigurationOccurrence(kind="CorollaryViolation", anchor=0, roles={"v": 0}, k=8)
    with pytest.raises(DomainError):
        reduce(named_graph("K1,7"), occ)


# ------------------------------------------------------------ recolouring

def test_recolour_3minus_picks_the_smallest_safe_colour():
    g = named_graph("P3")
    c = TotalColouring(11, {0: 2, 1: 1, 2: 3}, {(0, 1): 3, (1, 2): 2})
    assert recolour_3minus(g, c, 0) == 2
    assert is_tnsd(g, c)


def test_recolour_3minus_preconditions():
    g = named_graph("P3")
    with pytest.raises(DomainError):
        recolour_3minus(g, TotalColouring(10, {0: 2, 1: 1, 2: 3}, {(0, 1): 3, (1, 2): 2}), 0)
    with pytest.raises(DomainError):
        recolour_3minus(g, TotalColouring(11, {0: 2, 1: 1, 2: 3}, {(1, 2): 2}), 0)
    with pytest.raises(DomainError):
        recolour_3minus(named_graph("K1,4"), TotalColouring(11), 0)


# ------------------------------------------------------------ extend

def test_extend_case1_by_hand():
    g = named_graph("P3")
    red = reduce(g, _c1_on_path())
    base = TotalColouring(11, {0: 1, 1: 1, 2: 2}, {(1, 2): 3})
    colouring, strategy = extend_with_strategy(g, red, base, 8)
    assert colouring == TotalColouring(11, {0: 3, 1: 1, 2: 2}, {(0, 1): 2, (1, 2): 3})
    assert "greedy" in strategy


def test_extend_rejects_bad_bases():
    g = named_graph("P3")
    red = reduce(g, _c1_on_path())
    with pytest.raises(DomainError):
        extend(g, red, TotalColouring(11, {0: 1, 1: 1, 2: 1}, {(1, 2): 3}), 8)
    with pytest.raises(DomainError):
        extend(g, red, TotalColouring(12, {0: 1, 1: 1, 2: 12}, {(1, 2): 3}), 8)
    with pytest.raises(DomainError):
        extend(g, red, TotalColouring(11, {0: 1, 1: 1, 2: 2}, {(1, 2): 3}), 7)
    with pytest.raises(StaleOccurrenceError):
        extend(named_graph("C5"), red, TotalColouring(11, {0: 1, 1: 1, 2: 2}, {(1, 2): 3}), 8)


def _extend_planted(kind, seed: int) -> None:
    planted = planted_instance(kind, seed)
    red = reduce(planted.graph, planted.occurrence)
    base = recursive_colour(red.reduced, 8).colouring
    colouring = extend(planted.graph, red, base, 8)
    assert is_tnsd(planted.graph, colouring)
    assert colouring.colours_used <= 11


@pytest.mark.parametrize("kind", list(SEARCH_ORDER))
@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_extension_on_planted_configurations(kind, seed):
    _extend_planted(kind, seed)


@pytest.mark.slow
@pytest.mark.parametrize("kind", list(SEARCH_ORDER))
def test_extension_on_many_planted_configurations(kind):
    for seed in range(100):
        _extend_planted(kind, seed)


@pytest.mark.parametrize("k", [9, 10])
@pytest.mark.parametrize("seed", range(6))
def test_case8_below_the_palette_bound(k, seed):
    # planted with Δ = 8, extended with a larger k so that Δ <= k - 1
    planted = planted_instance(ConfigurationKind.C8, seed)
    assert planted.graph.max_degree == 8
    red = reduce(planted.graph, planted.occurrence)
    base = recursive_colour(red.reduced, k).colouring
    colouring, strategy = extend_with_strategy(planted.graph, red, base, k)
    assert is_tnsd(planted.graph, colouring)
    assert colouring.colours_used <= k + 3
    assert strategy.startswith("case 8")
    assert "fallback on vv1" not in strategy


# ------------------------------------------------------------ recursion

def test_colour_edgeless():
    c = colour_edgeless(Graph(3), 11)
    assert c.vertex_colours == {0: 1, 1: 1, 2: 1}
    with pytest.raises(DomainError):
        colour_edgeless(named_graph("K2"), 11)


def test_recursive_colour_on_a_star():
    g = named_graph("K1,8")
    result = recursive_colour(g, 8)
    assert result.status == "coloured"
    assert result.hypothesis_met
    assert [step.case for step in result.steps] == ["Lemma8"]
    assert is_tnsd(g, result.colouring)
    assert result.colouring.colours_used <= 11


@pytest.mark.parametrize("seed", range(5))
def test_recursive_colour_on_trees(seed):
    g = random_tree(30, seed)
    result = recursive_colour(g, 8)
    assert result.status == "coloured"
    assert is_tnsd(g, result.colouring)
    assert result.colouring.colours_used <= 11


def test_recursive_colour_on_sparse_random_graphs():
    for g in random_sparse_graphs(10, seed=3, min_n=8, max_n=30):
        result = recursive_colour(g, 8)
        assert is_tnsd(g, result.colouring), g
        assert result.colouring.colours_used <= 11


@pytest.mark.slow
def test_recursive_colour_on_many_sparse_graphs():
    for g in random_sparse_graphs(50, seed=17, min_n=10, max_n=40):
        result = recursive_colour(g, 8)
        assert result.status == "coloured", g
        assert is_tnsd(g, result.colouring), g
        assert result.colouring.colours_used <= 11


def test_recursive_colour_respects_a_larger_k():
    g = named_graph("K1,10")
    result = recursive_colour(g, 10)
    assert is_tnsd(g, result.colouring)
    assert result.colouring.colours_used <= 13


def test_dense_graphs_do_not_meet_the_hypothesis():
    result = recursive_colour(named_graph("K6"), 8, fallback=False)
    assert result.status == "hypothesis-not-met"
    assert not result.hypothesis_met
    assert result.colouring is None

    result = recursive_colour(named_graph("K6"), 8)
    assert result.fallback == "found"
    assert is_tnsd(named_graph("K6"), result.colouring)


def test_recursive_colour_preconditions():
    with pytest.raises(DomainError):
        recursive_colour(named_graph("P3"), 7)
    with pytest.raises(DomainError):
        recursive_colour(named_graph("K1,9"), 8)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
