#!/usr/bin/env python3
"""
Tests for the discharging ledger, the ghost-vertex conditions and the case audit
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tnsd.configurations import find_any_reducible
from tnsd.discharging import (
    apply_rules,
    classify_vertex,
    degree_case_audit,
    fraction_text,
    ghost_partition,
    initial_charges,
    verify_ghost_conditions,
)
from tnsd.errors import DomainError
from tnsd.generators import named_graph, random_sparse_graphs
from tnsd.graph_core import MAD_THRESHOLD, Graph, max_average_degree


def _five_with_three_fours() -> Graph:
    # 0 has degree 5; 1, 2, 3 have degree 4; 6, 7, 8 have degree 3; 4, 5 are leaves
    edges = [(0, x) for x in range(1, 6)]
    edges += [(x, y) for x in (1, 2, 3) for y in (6, 7, 8)]
    return Graph(9, edges)


def test_initial_charge_is_degree_minus_threshold():
    ledger = initial_charges(named_graph("P3"))
    assert ledger.initial == {0: Fraction(-11, 3), 1: Fraction(-8, 3), 2: Fraction(-11, 3)}
    assert ledger.transfers == []


def test_star_on_six_leaves():
    ledger = apply_rules(named_graph("K1,6"))
    assert [t.rule for t in ledger.transfers] == ["R1"] * 6
    assert ledger.final[0] == Fraction(-14, 3)
    assert all(ledger.final[x] == Fraction(-8, 3) for x in range(1, 7))
    assert ledger.conserved


def test_rules_r2_and_r3():
    # 0 has degree 6 and feeds a 3-vertex and a 4-vertex
    edges = [(0, x) for x in range(1, 7)] + [(1, 7), (1, 8), (2, 7), (2, 8), (2, 9)]
    g = Graph(10, edges)
    ledger = apply_rules(g)
    rules = {(t.giver, t.receiver): t.rule for t in ledger.transfers}
    assert rules[(0, 1)] == "R2"
    assert rules[(0, 2)] == "R3"
    assert ledger.final[1] == 3 - Fraction(14, 3) + Fraction(5, 9)
    assert ledger.final[2] == 4 - Fraction(14, 3) + Fraction(1, 6)


def test_five_vertex_with_three_four_neighbours():
    g = _five_with_three_fours()
    ledger = apply_rules(g)
    assert ledger.final[0] == Fraction(-1, 6)
    assert ledger.final[1] == Fraction(-1, 2)
    case, bound, caps = classify_vertex(g, 0)
    assert case == "degree 5"
    assert bound == 0
    assert caps["at most two 4-neighbours"] is False


def test_low_vertices_fed_by_big_neighbours():
    # 0 and 1 have degree 8, 4 has degree 6; 2 and 3 only see 6⁺-vertices
    edges = [(0, x) for x in range(5, 10)] + [(1, x) for x in range(10, 15)]
    edges += [(0, 2), (1, 2), (0, 3), (1, 3), (3, 4)]
    edges += [(4, x) for x in range(15, 20)] + [(0, 1)]
    g = Graph(20, edges)
    assert [g.degree(v) for v in range(5)] == [8, 8, 2, 3, 6]
    final = apply_rules(g).final
    assert final[2] == Fraction(-2, 3)
    assert final[3] == 0
    assert final[5] == Fraction(-8, 3)


def test_final_charges_in_the_balanced_cases():
    assert apply_rules(named_graph("K6")).final[0] == Fraction(1, 3)
    assert apply_rules(named_graph("K5")).final[0] == Fraction(-2, 3)
    # a 6-vertex surrounded by 4-vertices gives away 1
    edges = [(0, x) for x in range(1, 7)] + [(x, y) for x in range(1, 7) for y in (7, 8, 9)]
    assert apply_rules(Graph(10, edges)).final[0] == Fraction(1, 3)


def test_fraction_text():
    assert fraction_text(Fraction(3)) == "3/1"
    assert fraction_text(Fraction(-1, 6)) == "-1/6"


@st.composite
def graphs(draw, max_n=10):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for v in range(n) for u in range(v)]
    if not pairs:
        return Graph(n)
    return Graph(n, draw(st.lists(st.sampled_from(pairs), unique=True)))


@settings(max_examples=100, deadline=None)
@given(graphs())
def test_charge_is_conserved(g):
    ledger = apply_rules(g)
    assert ledger.conserved
    assert ledger.total_initial == 2 * g.edge_count - Fraction(14, 3) * g.vertex_count
    given_away = {v: sum((t.amount for t in ledger.transfers if t.giver == v), Fraction(0)) for v in g.vertices}
    assert all(given_away[v] == 0 or g.degree(v) >= 5 for v in g.vertices)


# ------------------------------------------------------------ ghost vertices

def test_ghost_partition():
    partition = ghost_partition(named_graph("K1,6"))
    assert partition.v1 == frozenset({0})
    assert partition.d_v1[1] == 1
    assert partition.d_v1[0] == 0


def test_ghost_conditions_on_a_dense_graph():
    g = named_graph("K6")
    report = verify_ghost_conditions(g, apply_rules(g))
    assert report.all_passed
    assert report.conclusion == "implied"


def test_ghost_conditions_fail_on_a_star():
    g = named_graph("K1,6")
    report = verify_ghost_conditions(g, apply_rules(g))
    assert report.conclusion == "not-established"
    failing = [check.vertex for check in report.vertices if not check.passed]
    assert failing == [0]


def test_ghost_conditions_are_vacuous_without_3plus_vertices():
    g = named_graph("P3")
    assert verify_ghost_conditions(g, apply_rules(g)).conclusion == "vacuous"


def test_ghost_conditions_reject_a_foreign_ledger():
    with pytest.raises(DomainError):
        verify_ghost_conditions(named_graph("P3"), apply_rules(named_graph("C5")))
    with pytest.raises(DomainError):
        verify_ghost_conditions(named_graph("P3"), apply_rules(Graph(3, [(0, 1)])))


def _assert_ghost_accounting(g: Graph) -> None:
    report = verify_ghost_conditions(g, apply_rules(g))
    if find_any_reducible(g, max(8, g.max_degree)) is None:
        assert report.all_passed, g
    if report.conclusion == "implied":
        assert max_average_degree(g).value >= MAD_THRESHOLD, g


@settings(max_examples=200, deadline=None)
@given(graphs(max_n=14))
def test_configuration_free_graphs_pass_the_ghost_conditions(g):
    _assert_ghost_accounting(g)


def test_ghost_accounting_on_sparse_graphs():
    for g in random_sparse_graphs(60, seed=23, min_n=8, max_n=40):
        _assert_ghost_accounting(g)
        assert verify_ghost_conditions(g, apply_rules(g)).conclusion != "implied", g


# ------------------------------------------------------------ audit

def test_audit_of_a_configuration_free_graph():
    report = degree_case_audit(named_graph("K6"), 8)
    assert report.blocked_by is None
    assert report.ok
    assert {entry.case for entry in report.vertices} == {"degree 5"}


def test_audit_is_blocked_by_a_configuration():
    report = degree_case_audit(named_graph("K1,8"), 8)
    assert report.blocked_by["kind"] == "Lemma8Violation"
    assert not report.ok
    assert report.vertices == []


def test_high_degree_subcases():
    # 0 has degree 8 with one leaf, three 3-neighbours and four 6-neighbours
    edges = [(0, x) for x in range(1, 9)]
    edges += [(x, 9 + i) for i, x in enumerate((2, 2, 3, 3, 4, 4))]
    for x in range(5, 9):
        edges += [(x, y) for y in range(15, 20)]
    g = Graph(20, edges)
    case, bound, caps = classify_vertex(g, 0)
    assert case.startswith("degree >= 7, n_2⁻ = d-7")
    assert bound == 8 - Fraction(14, 3) - 1 - 3 * Fraction(5, 9) - 4 * Fraction(1, 6)
    assert caps["at most three 3-neighbours"]


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
