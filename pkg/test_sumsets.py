#!/usr/bin/env python3
"""
Tests for sums of distinct representatives
"""
import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from tnsd.errors import DomainError
from tnsd.sumsets import ListSystem, distinct_sums, exhaustive_lemma_check, lemma_lower_bound, verify_lemma


def test_single_list_is_its_own_sumset():
    assert distinct_sums(ListSystem.of({4, 7})) == {4, 7}


def test_equal_lists_force_distinct_choices():
    assert distinct_sums(ListSystem.of({1, 2}, {1, 2})) == {3}


def test_disjoint_lists_give_every_sum():
    assert distinct_sums(ListSystem.of({1, 2}, {3, 4})) == {4, 5, 6}


@pytest.mark.parametrize(
    "lists, bound",
    [
        (({1, 2}, {3, 4}), 1),
        (({1, 2}, {1, 2}), 1),
        (({1, 2, 3}, {1, 2, 3}, {1, 2, 3}), 1),
        (({1, 2, 5}, {1, 2, 5}), 3),
    ],
)
def test_lower_bound_formula(lists, bound):
    assert lemma_lower_bound(ListSystem.of(*lists)) == bound


def test_tight_systems():
    system = ListSystem.of({1, 2}, {1, 2})
    assert verify_lemma(system)
    assert len(distinct_sums(system)) == lemma_lower_bound(system)

    system = ListSystem.of({1, 2, 5}, {1, 2, 5})
    assert distinct_sums(system) == {3, 6, 7}
    assert len(distinct_sums(system)) == lemma_lower_bound(system)


def test_short_list_is_not_admissible():
    system = ListSystem.of({1}, {1, 2})
    assert not system.admissible
    with pytest.raises(DomainError):
        lemma_lower_bound(system)


def test_empty_lists_are_rejected():
    with pytest.raises(ValidationError):
        ListSystem(lists=[])
    with pytest.raises(ValidationError):
        ListSystem(lists=[[1, 2], []])


def test_exhaustive_check_over_small_values():
    report = exhaustive_lemma_check(3, range(1, 7))
    assert report.ok
    assert report.violations == []
    assert report.tight > 0
    assert report.systems > 0
    assert len(report.tight_example) >= 1


def test_exhaustive_check_needs_positive_t():
    with pytest.raises(DomainError):
        exhaustive_lemma_check(0)


@st.composite
def admissible_systems(draw):
    t = draw(st.integers(1, 4))
    lists = [draw(st.sets(st.integers(-3, 9), min_size=t, max_size=t + 3)) for _ in range(t)]
    return ListSystem(lists=lists)


@settings(max_examples=150, deadline=None)
@given(admissible_systems())
def test_bound_holds_on_random_systems(system):
    assert verify_lemma(system)


@settings(max_examples=100, deadline=None)
@given(admissible_systems(), st.randoms(use_true_random=False), st.integers(-5, 5))
def test_sums_ignore_list_order_and_follow_a_shift(system, rng, c):
    sums = distinct_sums(system)
    shuffled = list(system.lists)
    rng.shuffle(shuffled)
    assert distinct_sums(ListSystem(lists=shuffled)) == sums
    shifted = ListSystem(lists=[[x + c for x in items] for items in system.lists])
    assert distinct_sums(shifted) == {s + system.t * c for s in sums}


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
