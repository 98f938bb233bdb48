"""
Detection of reducible configurations (C1)-(C8) and of the Lemma 8 and
corollary neighbourhood inequalities
"""
from enum import Enum
from itertools import combinations
from typing import Dict, Iterator, List, Optional

from pydantic import BaseModel, ConfigDict

from tnsd.errors import DomainError
from tnsd.graph_core import Graph, neighbour_degree_counts

MIN_PALETTE_PARAMETER = 8


class ConfigurationKind(str, Enum):
    LEMMA8 = "Lemma8Violation"
    COROLLARY = "CorollaryViolation"
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    C5 = "C5"
    C6 = "C6"
    C7 = "C7"
    C8 = "C8"


# find_any_reducible tries the kinds in this order
SEARCH_ORDER = (
    ConfigurationKind.LEMMA8,
    ConfigurationKind.C1,
    ConfigurationKind.C2,
    ConfigurationKind.C3,
    ConfigurationKind.C4,
    ConfigurationKind.C5,
    ConfigurationKind.C6,
    ConfigurationKind.C7,
    ConfigurationKind.C8,
)


class ConfigurationOccurrence(BaseModel):
    """A kind at an anchor vertex with role-labelled witnesses.

    Roles: `v` is the anchor; single witnesses are `u`, `w`, `y`; numbered
    groups are `v1..`, `u1..`, `w1..`.
    """

    model_config = ConfigDict(frozen=True)

    kind: ConfigurationKind
    anchor: int
    roles: Dict[str, int]
    k: int

    def role(self, name: str) -> int:
        try:
            return self.roles[name]
        except KeyError:
            raise DomainError(f"{self.kind.value} occurrence has no role {name!r}")

    def group(self, prefix: str) -> List[int]:
        """Vertices of a numbered role group, in index order"""
        found = []
        index = 1
        while f"{prefix}{index}" in self.roles:
            found.append(self.roles[f"{prefix}{index}"])
            index += 1
        return found

    @property
    def witnesses(self) -> List[int]:
        return [vertex for name, vertex in self.roles.items() if name != "v"]

    def sort_key(self):
        return (self.anchor, tuple(self.roles.values()))

    def to_record(self) -> dict:
        return {"kind": self.kind.value, "anchor": self.anchor, "roles": dict(self.roles), "k": self.k}


def _numbered(prefix: str, vertices) -> Dict[str, int]:
    return {f"{prefix}{i}": vertex for i, vertex in enumerate(vertices, start=1)}


def _check_k(k: int) -> None:
    if k < MIN_PALETTE_PARAMETER:
        raise DomainError(f"k must be at least {MIN_PALETTE_PARAMETER}, got {k}")


def c1_threshold(k: int) -> int:
    """Largest degree counted as a (k/2+1)⁻-vertex"""
    return k // 2 + 1


# ------------------------------------------------------------ Lemma 8

class Lemma8Check(BaseModel):
    vertex: int
    k: int
    degree: int
    n_2minus: int
    n_3minus: int
    n_4plus: int
    required: int
    holds: bool


def check_lemma8(g: Graph, k: int, v: int) -> Lemma8Check:
    """n_{4+}(v) >= n_{2-}(v) + 1 + n_{3-}(v) * (k - d(v))"""
    if k < g.max_degree:
        raise DomainError(f"k={k} is below the maximum degree {g.max_degree}")
    profile = neighbour_degree_counts(g, v)
    n2, n3, n4 = profile.at_most(2), profile.at_most(3), profile.at_least(4)
    required = n2 + 1 + n3 * (k - profile.degree)
    return Lemma8Check(
        vertex=v, k=k, degree=profile.degree, n_2minus=n2, n_3minus=n3, n_4plus=n4,
        required=required, holds=n4 >= required,
    )


class CorollaryCheck(BaseModel):
    vertex: int
    degree: int
    applicable: bool
    n_2minus: int
    bound: Optional[int]
    holds: Optional[bool]


def check_corollary(g: Graph, v: int) -> CorollaryCheck:
    """n_{2-}(v) <= d(v) - 5 for d(v) >= 7; not applicable below degree 7"""
    profile = neighbour_degree_counts(g, v)
    n2 = profile.at_most(2)
    if profile.degree < 7:
        return CorollaryCheck(vertex=v, degree=profile.degree, applicable=False, n_2minus=n2, bound=None, holds=None)
    bound = profile.degree - 5
    return CorollaryCheck(vertex=v, degree=profile.degree, applicable=True, n_2minus=n2, bound=bound, holds=n2 <= bound)


# ------------------------------------------------------------ detectors

def _low(g: Graph, v: int, limit: int) -> List[int]:
    return [x for x in g.sorted_neighbours(v) if g.degree(x) <= limit]


def _exactly(g: Graph, v: int, degree: int) -> List[int]:
    return [x for x in g.sorted_neighbours(v) if g.degree(x) == degree]


def _lemma8(g: Graph, k: int) -> Iterator[ConfigurationOccurrence]:
    for v in g.vertices:
        if g.degree(v) == 0:
            continue
        if not check_lemma8(g, k, v).holds:
            roles = {"v": v}
            roles.update(_numbered("u", _low(g, v, 2)))
            roles.update(_numbered("w", _exactly(g, v, 3)))
            yield ConfigurationOccurrence(kind=ConfigurationKind.LEMMA8, anchor=v, roles=roles, k=k)


def _corollary(g: Graph, k: int) -> Iterator[ConfigurationOccurrence]:
    for v in g.vertices:
        check = check_corollary(g, v)
        if check.applicable and not check.holds:
            roles = {"v": v}
            roles.update(_numbered("v", _low(g, v, 2)))
            yield ConfigurationOccurrence(kind=ConfigurationKind.COROLLARY, anchor=v, roles=roles, k=k)


def _c1(g: Graph, k: int) -> Iterator[ConfigurationOccurrence]:
    for v in g.vertices:
        if 1 <= g.degree(v) <= 2:
            for u in _low(g, v, c1_threshold(k)):
                yield ConfigurationOccurrence(kind=ConfigurationKind.C1, anchor=v, roles={"v": v, "u": u}, k=k)


def _c2(g: Graph, k: int) -> Iterator[ConfigurationOccurrence]:
    for v in g.vertices:
        if g.degree(v) <= 4:
            for u in _low(g, v, 4):
                if v < u:
                    yield ConfigurationOccurrence(kind=ConfigurationKind.C2, anchor=v, roles={"v": v, "u": u}, k=k)


def _c3(g: Graph, k: int) -> Iterator[ConfigurationOccurrence]:
    for v in g.vertices:
        if g.degree(v) <= 3:
            for u in _low(g, v, 5):
                yield ConfigurationOccurrence(kind=ConfigurationKind.C3, anchor=v, roles={"v": v, "u": u}, k=k)


def _c4(g: Graph, k: int) -> Iterator[ConfigurationOccurrence]:
    for v in g.vertices:
        if g.degree(v) == 5:
            for spokes in combinations(_exactly(g, v, 4), 3):
                roles = {"v": v}
                roles.update(_numbered("v", spokes))
                yield ConfigurationOccurrence(kind=ConfigurationKind.C4, anchor=v, roles=roles, k=k)


def _c5(g: Graph, k: int) -> Iterator[ConfigurationOccurrence]:
    for v in g.vertices:
        if g.degree(v) == 6:
            fours = _low(g, v, 4)
            for u in _low(g, v, 3):
                for w in fours:
                    if w != u:
                        yield ConfigurationOccurrence(
                            kind=ConfigurationKind.C5, anchor=v, roles={"v": v, "u": u, "w": w}, k=k
                        )


def _c6(g: Graph, k: int) -> Iterator[ConfigurationOccurrence]:
    for v in g.vertices:
        if g.degree(v) == 7:
            threes, fours = _low(g, v, 3), _low(g, v, 4)
            for u in _low(g, v, 2):
                for w in threes:
                    for y in fours:
                        if len({u, w, y}) == 3:
                            yield ConfigurationOccurrence(
                                kind=ConfigurationKind.C6, anchor=v, roles={"v": v, "u": u, "w": w, "y": y}, k=k
                            )


def _c7(g: Graph, k: int) -> Iterator[ConfigurationOccurrence]:
    for v in g.vertices:
        d = g.degree(v)
        if d < 8:
            continue
        twos = _low(g, v, 2)[: d - 7]
        if len(twos) < d - 7:
            continue
        threes = [x for x in _low(g, v, 3) if x not in twos][:2]
        if len(threes) < 2:
            continue
        fours = [x for x in _low(g, v, 4) if x not in twos and x not in threes][:1]
        if not fours:
            continue
        roles = {"v": v}
        roles.update(_numbered("v", twos))
        roles.update({"u1": threes[0], "u2": threes[1], "w": fours[0]})
        yield ConfigurationOccurrence(kind=ConfigurationKind.C7, anchor=v, roles=roles, k=k)


def _c8(g: Graph, k: int) -> Iterator[ConfigurationOccurrence]:
    top = g.max_degree
    if top < 3:
        return
    for v in g.vertices:
        if g.degree(v) != top:
            continue
        threes = _low(g, v, 3)[: top - 2]
        if len(threes) < top - 2:
            continue
        fours = [x for x in _low(g, v, 4) if x not in threes][:1]
        if not fours:
            continue
        rest = [x for x in g.sorted_neighbours(v) if x not in threes and x != fours[0]]
        roles = {"v": v}
        roles.update(_numbered("v", threes))
        roles.update({"u": fours[0], "w": rest[0]})
        yield ConfigurationOccurrence(kind=ConfigurationKind.C8, anchor=v, roles=roles, k=k)


_DETECTORS = {
    ConfigurationKind.LEMMA8: _lemma8,
    ConfigurationKind.COROLLARY: _corollary,
    ConfigurationKind.C1: _c1,
    ConfigurationKind.C2: _c2,
    ConfigurationKind.C3: _c3,
    ConfigurationKind.C4: _c4,
    ConfigurationKind.C5: _c5,
    ConfigurationKind.C6: _c6,
    ConfigurationKind.C7: _c7,
    ConfigurationKind.C8: _c8,
}


def detect(g: Graph, k: int, kind: ConfigurationKind) -> List[ConfigurationOccurrence]:
    """All occurrences of one kind, sorted by anchor then witnesses"""
    _check_k(k)
    kind = ConfigurationKind(kind)
    if kind == ConfigurationKind.LEMMA8 and k < g.max_degree:
        raise DomainError(f"k={k} is below the maximum degree {g.max_degree}")
    return sorted(_DETECTORS[kind](g, k), key=ConfigurationOccurrence.sort_key)


def detect_all(g: Graph, k: int) -> List[ConfigurationOccurrence]:
    kinds = list(SEARCH_ORDER) + [ConfigurationKind.COROLLARY]
    return [occ for kind in kinds for occ in detect(g, k, kind)]


def find_any_reducible(g: Graph, k: int) -> Optional[ConfigurationOccurrence]:
    _check_k(k)
    if k < g.max_degree:
        raise DomainError(f"k={k} is below the maximum degree {g.max_degree}")
    for kind in SEARCH_ORDER:
        found = detect(g, k, kind)
        if found:
            return found[0]
    return None


# ------------------------------------------------------------ re-checking

def _all_adjacent(g: Graph, v: int, vertices: List[int]) -> bool:
    return all(g.has_edge(v, x) for x in vertices)


def occurrence_holds(g: Graph, occ: ConfigurationOccurrence) -> bool:
    """Independent re-check of a witness against its kind's degree constraints"""
    if not 0 <= occ.anchor < g.vertex_count or occ.roles.get("v") != occ.anchor:
        return False
    witnesses = occ.witnesses
    if any(not 0 <= x < g.vertex_count for x in witnesses):
        return False
    if len(set(witnesses)) != len(witnesses) or occ.anchor in witnesses:
        return False
    if not _all_adjacent(g, occ.anchor, witnesses):
        return False
    v, k = occ.anchor, occ.k
    d = g.degree(v)
    deg = g.degree
    kind = occ.kind

    if kind == ConfigurationKind.LEMMA8:
        us, ws = occ.group("u"), occ.group("w")
        if sorted(us) != _low(g, v, 2) or sorted(ws) != _exactly(g, v, 3):
            return False
        return d >= 1 and k >= g.max_degree and not check_lemma8(g, k, v).holds
    if kind == ConfigurationKind.COROLLARY:
        check = check_corollary(g, v)
        return bool(check.applicable and not check.holds)
    if kind == ConfigurationKind.C1:
        return 1 <= d <= 2 and deg(occ.role("u")) <= c1_threshold(k)
    if kind == ConfigurationKind.C2:
        return d <= 4 and deg(occ.role("u")) <= 4
    if kind == ConfigurationKind.C3:
        return d <= 3 and deg(occ.role("u")) <= 5
    if kind == ConfigurationKind.C4:
        spokes = occ.group("v")
        return d == 5 and len(spokes) == 3 and all(deg(x) == 4 for x in spokes)
    if kind == ConfigurationKind.C5:
        return d == 6 and deg(occ.role("u")) <= 3 and deg(occ.role("w")) <= 4
    if kind == ConfigurationKind.C6:
        return d == 7 and deg(occ.role("u")) <= 2 and deg(occ.role("w")) <= 3 and deg(occ.role("y")) <= 4
    if kind == ConfigurationKind.C7:
        twos = occ.group("v")
        return (
            d >= 8
            and len(twos) == d - 7
            and all(deg(x) <= 2 for x in twos)
            and deg(occ.role("u1")) <= 3
            and deg(occ.role("u2")) <= 3
            and deg(occ.role("w")) <= 4
        )
    if kind == ConfigurationKind.C8:
        threes = occ.group("v")
        return (
            d == g.max_degree
            and d >= 3
            and len(threes) == d - 2
            and all(deg(x) <= 3 for x in threes)
            and deg(occ.role("u")) <= 4
            and occ.role("w") in g.neighbours(v)
            and len(witnesses) == d
        )
    return False
