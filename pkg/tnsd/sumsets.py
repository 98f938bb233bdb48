"""
Sums of distinct representatives and the lower bound on how many there are
"""
from itertools import combinations, combinations_with_replacement
from typing import Iterable, List, Set, Tuple

from pydantic import BaseModel, ConfigDict, field_validator

from tnsd.errors import DomainError


class ListSystem(BaseModel):
    """Lists L_1..L_t of integers"""

    model_config = ConfigDict(frozen=True)

    lists: Tuple[Tuple[int, ...], ...]

    @field_validator("lists", mode="before")
    @classmethod
    def _normalise(cls, value):
        lists = tuple(tuple(sorted(set(items))) for items in value)
        if not lists:
            raise ValueError("a list system needs at least one list")
        if any(not items for items in lists):
            raise ValueError("every list must be non-empty")
        return lists

    @classmethod
    def of(cls, *lists: Iterable[int]) -> "ListSystem":
        return cls(lists=lists)

    @property
    def t(self) -> int:
        return len(self.lists)

    @property
    def admissible(self) -> bool:
        return all(len(items) >= self.t for items in self.lists)


def distinct_sums(s: ListSystem) -> Set[int]:
    """All x_1+..+x_t with x_i in L_i and the x_i pairwise distinct"""
    # smallest lists first keeps the branching low near the root
    lists = sorted(s.lists, key=len)
    found: Set[int] = set()
    used: Set[int] = set()

    def walk(i: int, total: int) -> None:
        if i == len(lists):
            found.add(total)
            return
        for x in lists[i]:
            if x not in used:
                used.add(x)
                walk(i + 1, total + x)
                used.discard(x)

    walk(0, 0)
    return found


def lemma_lower_bound(s: ListSystem) -> int:
    if not s.admissible:
        raise DomainError(f"every list needs at least t={s.t} elements")
    return sum(len(items) for items in s.lists) - s.t * s.t + 1


def verify_lemma(s: ListSystem) -> bool:
    return len(distinct_sums(s)) >= lemma_lower_bound(s)


class LemmaReport(BaseModel):
    max_t: int
    values: List[int]
    systems: int
    violations: List[List[List[int]]]
    tight: int
    tight_example: List[List[int]] = []

    @property
    def ok(self) -> bool:
        return not self.violations


def exhaustive_lemma_check(max_t: int = 3, values: Iterable[int] = range(1, 7)) -> LemmaReport:
    """Every admissible system with t <= max_t over `values`.

    Systems are enumerated as multisets of lists: distinct_sums does not
    depend on the order of the lists.
    """
    values = sorted(set(values))
    if max_t < 1:
        raise DomainError("max_t must be at least 1")
    systems = 0
    tight = 0
    tight_example: List[List[int]] = []
    violations: List[List[List[int]]] = []
    for t in range(1, max_t + 1):
        candidates = [subset for size in range(t, len(values) + 1) for subset in combinations(values, size)]
        for lists in combinations_with_replacement(candidates, t):
            system = ListSystem(lists=lists)
            systems += 1
            achieved = len(distinct_sums(system))
            bound = lemma_lower_bound(system)
            if achieved < bound:
                violations.append([list(items) for items in system.lists])
            elif achieved == bound:
                tight += 1
                if not tight_example or (t > 1 and len(tight_example) == 1):
                    tight_example = [list(items) for items in system.lists]
    return LemmaReport(
        max_t=max_t,
        values=values,
        systems=systems,
        violations=violations,
        tight=tight,
        tight_example=tight_example,
    )
