#!/usr/bin/env python3
"""
Tests for configuration detection and the neighbourhood inequalities
"""
import pytest
from hypothesis import given, settings, strategies as st

from tnsd.configurations import (
    SEARCH_ORDER,
    ConfigurationKind,
    ConfigurationOccurrence,
    c1_threshold,
    check_corollary,
    check_lemma8,
    detect,
    detect_all,
    find_any_reducible,
    occurrence_holds,
)
from tnsd.discharging import apply_rules, verify_ghost_conditions
from tnsd.errors import DomainError
from tnsd.generators import connected_graphs_up_to, named_graph, planted_instance, random_sparse_graphs
from tnsd.graph_core import MAD_THRESHOLD, Graph, max_average_degree


def test_lemma8_fails_everywhere_on_k4():
    g = named_graph("K4")
    check = check_lemma8(g, 8, 0)
    assert (check.n_2minus, check.n_3minus, check.n_4plus) == (0, 3, 0)
    assert check.required == 16
    assert not check.holds
    occ = find_any_reducible(g, 8)
    assert occ.kind == ConfigurationKind.LEMMA8
    assert occ.anchor == 0
    assert occ.group("w") == [1, 2, 3]
    assert occ.group("u") == []


def test_lemma8_holds_on_k5():
    g = named_graph("K5")
    assert all(check_lemma8(g, 8, v).holds for v in g.vertices)
    assert detect(g, 8, ConfigurationKind.LEMMA8) == []


def test_k5_reduces_through_c2():
    g = named_graph("K5")
    occurrences = detect(g, 8, ConfigurationKind.C2)
    assert len(occurrences) == 10
    assert all(occ.anchor < occ.role("u") for occ in occurrences)
    first = find_any_reducible(g, 8)
    assert first.kind == ConfigurationKind.C2
    assert first.roles == {"v": 0, "u": 1}


def test_star_on_eight_leaves():
    g = named_graph("K1,8")
    assert detect(g, 8, ConfigurationKind.C1) == []
    c8 = detect(g, 8, ConfigurationKind.C8)
    assert len(c8) == 1
    assert c8[0].group("v") == [1, 2, 3, 4, 5, 6]
    assert (c8[0].role("u"), c8[0].role("w")) == (7, 8)
    c7 = detect(g, 8, ConfigurationKind.C7)
    assert c7[0].group("v") == [1]
    assert find_any_reducible(g, 8).kind == ConfigurationKind.LEMMA8


def test_c1_on_a_short_path():
    g = named_graph("P3")
    found = detect(g, 8, ConfigurationKind.C1)
    assert [(o.anchor, o.role("u")) for o in found] == [(0, 1), (1, 0), (1, 2), (2, 1)]
    assert c1_threshold(8) == 5
    assert c1_threshold(9) == 5


def test_c1_respects_the_degree_threshold():
    # leaf 1 hangs off vertex 0 of degree 6
    g = Graph(7, [(0, x) for x in range(1, 7)])
    assert [o.anchor for o in detect(g, 8, ConfigurationKind.C1)] == []
    assert [o.anchor for o in detect(g, 12, ConfigurationKind.C1)] == list(range(1, 7))


def test_corollary_on_a_star():
    check = check_corollary(named_graph("K1,7"), 0)
    assert check.applicable and not check.holds
    assert check.bound == 2
    assert not check_corollary(named_graph("K1,6"), 0).applicable
    found = detect(named_graph("K1,7"), 8, ConfigurationKind.COROLLARY)
    assert [o.anchor for o in found] == [0]


@st.composite
def hub_graphs(draw):
    # vertex 0 has degree at least 7, the rest is random
    n = draw(st.integers(8, 14))
    hub = [(0, x) for x in range(1, draw(st.integers(7, n - 1)) + 1)]
    pairs = [(u, v) for v in range(1, n) for u in range(1, v)]
    return Graph(n, hub + draw(st.lists(st.sampled_from(pairs), unique=True, max_size=20)))


@settings(max_examples=150, deadline=None)
@given(hub_graphs())
def test_lemma8_implies_the_corollary(g):
    k = max(8, g.max_degree)
    for v in g.vertices:
        if g.degree(v) >= 7 and check_lemma8(g, k, v).holds:
            assert check_corollary(g, v).holds, (g, v)


def test_lemma8_implies_the_corollary_on_sparse_graphs():
    for g in random_sparse_graphs(100, seed=5, min_n=10, max_n=40):
        k = max(8, g.max_degree)
        for v in g.vertices:
            if g.degree(v) >= 7 and check_lemma8(g, k, v).holds:
                assert check_corollary(g, v).holds, (g, v)


@settings(max_examples=60, deadline=None)
@given(hub_graphs())
def test_detection_is_deterministic(g):
    k = max(8, g.max_degree)
    first = detect_all(g, k)
    assert detect_all(g, k) == first
    assert detect_all(Graph(g.vertex_count, reversed(g.edges)), k) == first


def test_occurrence_roles_and_record():
    occ = ConfigurationOccurrence(kind="C8", anchor=0, roles={"v": 0, "v1": 3, "v2": 4, "u": 5, "w": 6}, k=8)
    assert occ.group("v") == [3, 4]
    assert occ.witnesses == [3, 4, 5, 6]
    assert occ.to_record()["kind"] == "C8"
    with pytest.raises(DomainError):
        occ.role("y")


def test_occurrence_holds_rejects_stale_witnesses():
    g = named_graph("P3")
    good = ConfigurationOccurrence(kind="C1", anchor=0, roles={"v": 0, "u": 1}, k=8)
    assert occurrence_holds(g, good)
    assert not occurrence_holds(g, ConfigurationOccurrence(kind="C1", anchor=0, roles={"v": 0, "u": 2}, k=8))
    assert not occurrence_holds(g.without_edges([(0, 1)]), good)
    assert not occurrence_holds(g, ConfigurationOccurrence(kind="C1", anchor=5, roles={"v": 5, "u": 1}, k=8))


def test_k_must_be_large_enough():
    with pytest.raises(DomainError):
        find_any_reducible(named_graph("P3"), 7)
    with pytest.raises(DomainError):
        find_any_reducible(named_graph("K1,9"), 8)
    with pytest.raises(DomainError):
        detect(named_graph("K1,9"), 8, ConfigurationKind.LEMMA8)


def test_detection_is_sorted_and_complete():
    g = named_graph("petersen")
    everything = detect_all(g, 8)
    for kind in SEARCH_ORDER:
        found = [o for o in everything if o.kind == kind]
        assert found == sorted(found, key=ConfigurationOccurrence.sort_key)
        assert all(occurrence_holds(g, o) for o in found)


def test_edgeless_graph_has_nothing_to_reduce():
    assert find_any_reducible(Graph(4), 8) is None


@pytest.mark.parametrize("kind", [kind for kind in SEARCH_ORDER])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_planted_configurations_are_detected(kind, seed):
    planted = planted_instance(kind, seed)
    assert occurrence_holds(planted.graph, planted.occurrence)
    found = detect(planted.graph, 8, kind)
    if kind == ConfigurationKind.C2:
        # reported once per edge, at the smaller end
        pair = {planted.occurrence.anchor, planted.occurrence.role("u")}
        assert pair in [{o.anchor, o.role("u")} for o in found]
    else:
        assert planted.occurrence.anchor in {o.anchor for o in found}


def _assert_reducible_or_dense(g: Graph) -> None:
    if not g.edge_count or find_any_reducible(g, 8) is not None:
        return
    assert max_average_degree(g).value >= MAD_THRESHOLD, g
    assert verify_ghost_conditions(g, apply_rules(g)).conclusion == "implied", g


@pytest.mark.slow
def test_every_small_connected_graph_is_reducible_or_dense():
    for g in connected_graphs_up_to(8):
        _assert_reducible_or_dense(g)


@pytest.mark.slow
def test_random_sparse_graphs_always_carry_a_configuration():
    for g in random_sparse_graphs(500, seed=11, min_n=5, max_n=60):
        assert find_any_reducible(g, 8) is not None, g


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
