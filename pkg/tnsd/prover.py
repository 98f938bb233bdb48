"""
Constructive colouring from reducible configurations: reduce a graph at an
occurrence, colour the smaller graph, and extend the colouring back
"""
import sys
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from pydantic import BaseModel, ConfigDict

from tnsd.certificates import (
    CnSystem,
    edge_pair_system,
    five_vertex_system,
    large_vertex_system,
    seven_vertex_system,
    six_vertex_system,
    verified_coefficient,
)
from tnsd.colouring import SearchBudget, TotalColouring, find_tnsd, is_tnsd, vertex_sums
from tnsd.config import verbose_enabled
from tnsd.configurations import (
    MIN_PALETTE_PARAMETER,
    ConfigurationKind,
    ConfigurationOccurrence,
    find_any_reducible,
    occurrence_holds,
)
from tnsd.errors import DomainError, InternalInconsistencyError, StaleOccurrenceError
from tnsd.graph_core import MAD_THRESHOLD, Edge, Graph, edge_key, max_average_degree, serialize_graph6
from tnsd.polynomial import cn_nonzero_substitution
from tnsd.sumsets import ListSystem, lemma_lower_bound

# colours available beyond k
PALETTE_EXTRA = 3
OBSERVATION_PALETTE = 11


class ExtensionCase(str, Enum):
    CASE1 = "1"
    CASE2_3 = "2;3"
    CASE4 = "4"
    CASE5 = "5"
    CASE6 = "6"
    CASE7 = "7"
    CASE8 = "8"
    LEMMA8 = "Lemma8"


_CASE_OF_KIND = {
    ConfigurationKind.C1: ExtensionCase.CASE1,
    ConfigurationKind.C2: ExtensionCase.CASE2_3,
    ConfigurationKind.C3: ExtensionCase.CASE2_3,
    ConfigurationKind.C4: ExtensionCase.CASE4,
    ConfigurationKind.C5: ExtensionCase.CASE5,
    ConfigurationKind.C6: ExtensionCase.CASE6,
    ConfigurationKind.C7: ExtensionCase.CASE7,
    ConfigurationKind.C8: ExtensionCase.CASE8,
    ConfigurationKind.LEMMA8: ExtensionCase.LEMMA8,
}


class Reduction(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    occurrence: ConfigurationOccurrence
    removed_edges: List[Edge]
    uncoloured_vertices: List[int]
    extension_case: ExtensionCase
    reduced: Graph

    def to_record(self) -> dict:
        return {
            "case": self.extension_case.value,
            "occurrence": self.occurrence.to_record(),
            "removed": [list(e) for e in self.removed_edges],
            "uncoloured": list(self.uncoloured_vertices),
        }


def _context(g: Graph, **extra) -> dict:
    record = {"graph6": serialize_graph6(g).decode("ascii")}
    record.update(extra)
    return record


def reduce(g: Graph, occ: ConfigurationOccurrence) -> Reduction:
    """The prescribed edge deletions and uncolour list for an occurrence"""
    if occ.kind == ConfigurationKind.COROLLARY:
        raise DomainError("corollary violations are implied by Lemma 8 violations and are not reduced directly")
    if not occurrence_holds(g, occ):
        raise StaleOccurrenceError(f"{occ.kind.value} occurrence at {occ.anchor} does not hold on this graph")
    v = occ.anchor
    kind = occ.kind
    if kind == ConfigurationKind.C1:
        u = occ.role("u")
        removed, uncoloured = [(v, u)], [v]
    elif kind in (ConfigurationKind.C2, ConfigurationKind.C3):
        u = occ.role("u")
        removed, uncoloured = [(v, u)], [u, v]
    elif kind == ConfigurationKind.C4:
        spokes = occ.group("v")
        if any(g.has_edge(a, b) for i, a in enumerate(spokes) for b in spokes[i + 1:]):
            raise StaleOccurrenceError(f"C4 at {v}: two of the 4-neighbours are adjacent")
        removed, uncoloured = [(v, x) for x in spokes], [v] + spokes
    elif kind == ConfigurationKind.C5:
        u, w = occ.role("u"), occ.role("w")
        if g.has_edge(u, w):
            raise StaleOccurrenceError(f"C5 at {v}: witnesses {u} and {w} are adjacent")
        removed, uncoloured = [(v, u), (v, w)], [u, v, w]
    elif kind == ConfigurationKind.C6:
        u, w, y = occ.role("u"), occ.role("w"), occ.role("y")
        removed, uncoloured = [(v, u), (v, w), (v, y)], [u, w, y]
    elif kind == ConfigurationKind.C7:
        twos = occ.group("v")
        u1, u2, w = occ.role("u1"), occ.role("u2"), occ.role("w")
        removed = [(v, twos[0]), (v, u1), (v, u2), (v, w)]
        uncoloured = [v] + twos + [u1, u2, w]
    elif kind == ConfigurationKind.C8:
        threes = occ.group("v")
        u = occ.role("u")
        removed = [(v, x) for x in threes] + [(v, u)]
        uncoloured = [v] + threes + [u]
    else:
        low = occ.group("u") + occ.group("w")
        removed, uncoloured = [(v, x) for x in low], low
    removed = [edge_key(a, b) for a, b in removed]
    return Reduction(
        occurrence=occ,
        removed_edges=removed,
        uncoloured_vertices=uncoloured,
        extension_case=_CASE_OF_KIND[kind],
        reduced=g.without_edges(removed),
    )


# ------------------------------------------------------------ extension

class ExtensionContext:
    """Live partial colouring of the full graph during one extension"""

    def __init__(self, g: Graph, base: TotalColouring, colouring: TotalColouring, k: int):
        self.g = g
        self.k = k
        self.palette = k + PALETTE_EXTRA
        self.base_colouring = base
        self.colouring = colouring

    def blocked_vertex(self, v: int) -> Set[int]:
        c = self.colouring
        blocked = {c.vertex(w) for w in self.g.neighbours(v)}
        blocked |= {c.edge(v, w) for w in self.g.neighbours(v)}
        blocked.discard(None)
        return blocked

    def blocked_edge(self, a: int, b: int) -> Set[int]:
        c = self.colouring
        blocked = {c.vertex(a), c.vertex(b)}
        for end, other in ((a, b), (b, a)):
            blocked |= {c.edge(end, w) for w in self.g.neighbours(end) if w != other}
        blocked.discard(None)
        return blocked

    def available(self, element: Tuple[int, ...]) -> List[int]:
        blocked = self.blocked_vertex(element[0]) if len(element) == 1 else self.blocked_edge(*element)
        return [colour for colour in range(1, self.palette + 1) if colour not in blocked]

    def available_lists(self, elements: Sequence[Tuple[int, ...]]) -> Dict[str, List[int]]:
        return {"-".join(map(str, element)): self.available(element) for element in elements}

    def sum_table(self) -> Dict[int, int]:
        return vertex_sums(self.g, self.colouring)

    def sum_at(self, v: int) -> int:
        c = self.colouring
        total = c.vertex(v) or 0
        for w in self.g.neighbours(v):
            total += c.edge(v, w) or 0
        return total

    def edge_total(self, v: int) -> int:
        return sum(self.colouring.edge(v, w) or 0 for w in self.g.neighbours(v))

    def assign(self, element: Tuple[int, ...], colour: int) -> None:
        if len(element) == 1:
            self.colouring.set_vertex(element[0], colour)
        else:
            self.colouring.set_edge(element[0], element[1], colour)

    def smallest(self, blocked: Set[int]) -> Optional[int]:
        for colour in range(1, self.palette + 1):
            if colour not in blocked:
                return colour
        return None


def recolour_3minus(g: Graph, c: TotalColouring, v: int) -> int:
    """(Re)colour a 3⁻-vertex whose incident edges are all coloured.

    The new colour avoids the neighbours' colours, the incident edges'
    colours and every value that would make s(v) equal a neighbour's sum.
    """
    if c.k < OBSERVATION_PALETTE:
        raise DomainError(f"recolouring a 3⁻-vertex needs at least {OBSERVATION_PALETTE} colours, palette has {c.k}")
    if g.degree(v) > 3:
        raise DomainError(f"vertex {v} has degree {g.degree(v)} > 3")
    incident = [c.edge(v, w) for w in g.sorted_neighbours(v)]
    if None in incident:
        raise DomainError(f"vertex {v} has an uncoloured incident edge")
    c.uncolour_vertex(v)
    edge_total = sum(incident)
    sums = vertex_sums(g, c)
    blocked = set(incident)
    for w in g.neighbours(v):
        if c.vertex(w) is not None:
            blocked.add(c.vertex(w))
        blocked.add(sums[w] - edge_total)
    for colour in range(1, c.k + 1):
        if colour not in blocked:
            c.set_vertex(v, colour)
            return colour
    raise InternalInconsistencyError(
        f"no colour left for 3⁻-vertex {v}", _context(g, vertex=v, colouring=c.to_json(g.vertex_count))
    )


def _finish_small(ctx: ExtensionContext, vertices: Sequence[int]) -> None:
    for x in vertices:
        recolour_3minus(ctx.g, ctx.colouring, x)


def _apply_system(ctx: ExtensionContext, system: CnSystem, elements: Sequence[Tuple[int, ...]], occ) -> str:
    lists = [ctx.available(element) for element in elements]
    try:
        point = cn_nonzero_substitution(
            system.factors, system.target, lists, coefficient=verified_coefficient(system.name)
        )
    except DomainError as e:
        raise InternalInconsistencyError(
            f"{system.name}: {e}",
            _context(ctx.g, occurrence=occ.to_record(), lists=ctx.available_lists(elements)),
        )
    for element, colour in zip(elements, point):
        ctx.assign(element, colour)
    return f"Combinatorial Nullstellensatz ({system.name})"


def _others(g: Graph, v: int, *excluded: int) -> List[int]:
    skip = set(excluded)
    return [x for x in g.sorted_neighbours(v) if x not in skip]


def _extend_case1(ctx: ExtensionContext, occ: ConfigurationOccurrence) -> str:
    g = ctx.g
    v, u = occ.anchor, occ.role("u")
    blocked = ctx.blocked_edge(u, v)
    u_sum = ctx.sum_at(u)
    for y in _others(g, u, v):
        blocked.add(ctx.sum_at(y) - u_sum)
    colour = ctx.smallest(blocked)
    if colour is None:
        raise InternalInconsistencyError("case 1: no colour left for uv", _context(g, occurrence=occ.to_record()))
    ctx.colouring.set_edge(u, v, colour)
    _finish_small(ctx, [v])
    return "greedy edge colour, then 3⁻-vertex recolouring"


def _extend_edge_pair(ctx: ExtensionContext, occ: ConfigurationOccurrence) -> str:
    g = ctx.g
    v, u = occ.anchor, occ.role("u")
    if g.degree(u) < g.degree(v):
        u, v = v, u
    mixed = g.degree(u) > 4
    system = edge_pair_system(
        ctx.edge_total(u),
        ctx.edge_total(v),
        [ctx.sum_at(y) for y in _others(g, u, v)],
        [ctx.sum_at(y) for y in _others(g, v, u)],
        mixed=mixed,
    )
    return _apply_system(ctx, system, [(u,), edge_key(u, v), (v,)], occ)


def _extend_case4(ctx: ExtensionContext, occ: ConfigurationOccurrence) -> str:
    g = ctx.g
    v = occ.anchor
    spokes = occ.group("v")
    system = five_vertex_system(
        ctx.sum_at(v),
        [ctx.sum_at(x) for x in spokes],
        [ctx.sum_at(x) for x in _others(g, v, *spokes)],
        [[ctx.sum_at(y) for y in _others(g, x, v)] for x in spokes],
    )
    elements = [(v,)] + [edge_key(v, x) for x in spokes] + [(x,) for x in spokes]
    return _apply_system(ctx, system, elements, occ)


def _extend_case5(ctx: ExtensionContext, occ: ConfigurationOccurrence) -> str:
    g = ctx.g
    v, u, w = occ.anchor, occ.role("u"), occ.role("w")
    system = six_vertex_system(
        ctx.sum_at(v),
        ctx.sum_at(u),
        ctx.sum_at(w),
        [ctx.sum_at(x) for x in _others(g, v, u, w)],
        [ctx.sum_at(y) for y in _others(g, u, v)],
        [ctx.sum_at(y) for y in _others(g, w, v)],
    )
    return _apply_system(ctx, system, [(v,), edge_key(v, u), edge_key(v, w), (u,), (w,)], occ)


def _extend_case6(ctx: ExtensionContext, occ: ConfigurationOccurrence) -> str:
    g = ctx.g
    v, u, w, y = occ.anchor, occ.role("u"), occ.role("w"), occ.role("y")
    system = seven_vertex_system(
        ctx.sum_at(v),
        ctx.sum_at(y),
        [ctx.sum_at(z) for z in _others(g, v, u, w, y)],
        [ctx.sum_at(z) for z in _others(g, y, v)],
    )
    strategy = _apply_system(ctx, system, [edge_key(v, u), edge_key(v, w), edge_key(v, y), (y,)], occ)
    _finish_small(ctx, [u, w])
    return strategy + ", then 3⁻-vertex recolouring"


def _extend_case7(ctx: ExtensionContext, occ: ConfigurationOccurrence) -> str:
    g = ctx.g
    v = occ.anchor
    twos = occ.group("v")
    u1, u2, w = occ.role("u1"), occ.role("u2"), occ.role("w")
    system = large_vertex_system(
        ctx.sum_at(v),
        ctx.sum_at(w),
        [ctx.sum_at(y) for y in _others(g, v, *twos, u1, u2, w)],
        [ctx.sum_at(z) for z in _others(g, w, v)],
    )
    elements = [(v,), edge_key(v, twos[0]), edge_key(v, u1), edge_key(v, u2), edge_key(v, w), (w,)]
    strategy = _apply_system(ctx, system, elements, occ)
    _finish_small(ctx, twos + [u1, u2])
    return strategy + ", then 3⁻-vertex recolouring"


def _extend_case8(ctx: ExtensionContext, occ: ConfigurationOccurrence) -> str:
    g, c = ctx.g, ctx.colouring
    v = occ.anchor
    threes = occ.group("v")
    u, w = occ.role("u"), occ.role("w")
    v1 = threes[0]
    top = g.max_degree

    colour_w, colour_vw = c.vertex(w), c.edge(v, w)
    branch = "other"
    colour_v = None
    if g.degree(v1) == 3:
        a, b = sorted(c.edge(v1, x) for x in _others(g, v1, v))
        if colour_vw not in (a, b):
            branch = "a/b"
            colour_v = min(x for x in (a, b) if x != colour_w)
    if colour_v is None:
        colour_v = ctx.smallest({colour_vw, colour_w})
    c.set_vertex(v, colour_v)

    colour_u = ctx.smallest(ctx.blocked_vertex(u))
    if colour_u is None:
        raise InternalInconsistencyError("case 8: no colour left for u", _context(g, occurrence=occ.to_record()))
    c.set_vertex(u, colour_u)

    blocked = ctx.blocked_edge(u, v)
    u_sum = ctx.sum_at(u)
    for y in _others(g, u, v):
        blocked.add(ctx.sum_at(y) - u_sum)
    colour_uv = ctx.smallest(blocked)
    if colour_uv is None:
        raise InternalInconsistencyError("case 8: no colour left for uv", _context(g, occurrence=occ.to_record()))
    c.set_edge(u, v, colour_uv)

    for x in threes[1:]:
        colour = ctx.smallest(ctx.blocked_edge(v, x))
        if colour is None:
            raise InternalInconsistencyError(
                f"case 8: no colour left for edge {v}-{x}", _context(g, occurrence=occ.to_record())
            )
        c.set_edge(v, x, colour)

    proper = ctx.blocked_edge(v, v1)
    v_sum = ctx.sum_at(v)
    blocked = set(proper)
    blocked.add(ctx.sum_at(w) - v_sum)
    if top <= ctx.k - 1:
        blocked.add(ctx.sum_at(u) - v_sum)
    primary = ctx.smallest(blocked)
    candidates = [primary] if primary is not None else []
    candidates += [colour for colour in range(1, ctx.palette + 1) if colour not in proper and colour != primary]

    for attempt, colour in enumerate(candidates):
        c.set_edge(v, v1, colour)
        _finish_small(ctx, threes)
        if is_tnsd(g, c):
            if attempt > 0 or primary is None:
                branch += ", fallback on vv1"
            if verbose_enabled():
                print(f"🧩 case 8 at {v}: branch {branch}", file=sys.stderr)
            return f"case 8 greedy (branch {branch})"
        c.uncolour_edge(v, v1)
    raise InternalInconsistencyError(
        "case 8: every colour for vv1 failed", _context(g, occurrence=occ.to_record(), branch=branch)
    )


def _extend_lemma8(ctx: ExtensionContext, occ: ConfigurationOccurrence) -> str:
    g, c = ctx.g, ctx.colouring
    v = occ.anchor
    low = occ.group("u") + occ.group("w")
    lists = [ctx.available(edge_key(v, x)) for x in low]
    high = [x for x in g.sorted_neighbours(v) if g.degree(x) >= 4]
    system = ListSystem(lists=lists) if lists and all(lists) else None
    bound = lemma_lower_bound(system) if system is not None and system.admissible else None
    if bound is None or bound <= len(high):
        raise InternalInconsistencyError(
            "Lemma 8 extension: the distinct-sum count does not exceed the number of 4⁺-neighbours",
            _context(g, occurrence=occ.to_record(), lists=[list(x) for x in lists], bound=bound, gamma=len(high)),
        )
    forbidden = {ctx.sum_at(x) for x in high}
    base = ctx.sum_at(v)
    chosen: List[int] = []

    def walk(i: int, total: int) -> bool:
        if i == len(low):
            return base + total not in forbidden
        for colour in lists[i]:
            if colour not in chosen:
                chosen.append(colour)
                if walk(i + 1, total + colour):
                    return True
                chosen.pop()
        return False

    if not walk(0, 0):
        raise InternalInconsistencyError(
            "Lemma 8 extension: no assignment separates v from its 4⁺-neighbours",
            _context(g, occurrence=occ.to_record()),
        )
    for x, colour in zip(low, chosen):
        c.set_edge(v, x, colour)
    _finish_small(ctx, low)
    return "distinct-sum enumeration, then 3⁻-vertex recolouring"


_EXTENDERS: Dict[ExtensionCase, Callable[[ExtensionContext, ConfigurationOccurrence], str]] = {
    ExtensionCase.CASE1: _extend_case1,
    ExtensionCase.CASE2_3: _extend_edge_pair,
    ExtensionCase.CASE4: _extend_case4,
    ExtensionCase.CASE5: _extend_case5,
    ExtensionCase.CASE6: _extend_case6,
    ExtensionCase.CASE7: _extend_case7,
    ExtensionCase.CASE8: _extend_case8,
    ExtensionCase.LEMMA8: _extend_lemma8,
}


def extend_with_strategy(g: Graph, red: Reduction, base: TotalColouring, k: int) -> Tuple[TotalColouring, str]:
    if k < MIN_PALETTE_PARAMETER:
        raise DomainError(f"k must be at least {MIN_PALETTE_PARAMETER}, got {k}")
    if g.max_degree > k:
        raise DomainError(f"maximum degree {g.max_degree} exceeds k={k}")
    if red.reduced != g.without_edges(red.removed_edges):
        raise StaleOccurrenceError("reduction was computed on a different graph")
    palette = k + PALETTE_EXTRA
    if base.colours_used > palette or not is_tnsd(red.reduced, base):
        raise DomainError(f"base is not a tnsd {palette}-colouring of the reduced graph")
    colouring = base.with_palette(palette)
    for x in red.uncoloured_vertices:
        colouring.uncolour_vertex(x)
    ctx = ExtensionContext(g, base, colouring, k)
    strategy = _EXTENDERS[red.extension_case](ctx, red.occurrence)
    if not is_tnsd(g, colouring):
        raise InternalInconsistencyError(
            f"case {red.extension_case.value} produced a colouring that is not tnsd",
            _context(
                g,
                occurrence=red.occurrence.to_record(),
                base=base.to_json(g.vertex_count),
                colouring=colouring.to_json(g.vertex_count),
            ),
        )
    return colouring, strategy


def extend(g: Graph, red: Reduction, base: TotalColouring, k: int) -> TotalColouring:
    return extend_with_strategy(g, red, base, k)[0]


# ------------------------------------------------------------ recursion

def colour_edgeless(g: Graph, palette: int) -> TotalColouring:
    if g.edge_count:
        raise DomainError("graph still has edges")
    return TotalColouring(palette, {v: 1 for v in g.vertices})


class ProofStep(BaseModel):
    case: str
    occurrence: dict
    removed: List[List[int]]
    extension_strategy: str


class ProofResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    status: str
    hypothesis_met: bool
    mad: Fraction
    k: int
    colouring: Optional[TotalColouring] = None
    steps: List[ProofStep] = []
    fallback: Optional[str] = None

    @property
    def coloured(self) -> bool:
        return self.colouring is not None


def recursive_colour(
    g: Graph, k: int, budget: Optional[SearchBudget] = None, fallback: bool = True
) -> ProofResult:
    """A tnsd (k+3)-colouring by repeated reduction, when mad(g) < 14/3"""
    if k < MIN_PALETTE_PARAMETER:
        raise DomainError(f"k must be at least {MIN_PALETTE_PARAMETER}, got {k}")
    if g.max_degree > k:
        raise DomainError(f"maximum degree {g.max_degree} exceeds k={k}")
    palette = k + PALETTE_EXTRA
    mad = max_average_degree(g).value if g.vertex_count else Fraction(0)
    if mad >= MAD_THRESHOLD:
        if verbose_enabled():
            print(f"⚠️  mad = {mad} >= 14/3, hypothesis not met", file=sys.stderr)
        if not fallback:
            return ProofResult(status="hypothesis-not-met", hypothesis_met=False, mad=mad, k=k)
        result = find_tnsd(g, palette, budget)
        return ProofResult(
            status="hypothesis-not-met",
            hypothesis_met=False,
            mad=mad,
            k=k,
            colouring=result.colouring,
            fallback=result.status.value,
        )

    stack: List[Tuple[Graph, Reduction]] = []
    current = g
    while current.edge_count:
        occ = find_any_reducible(current, k)
        if occ is None:
            raise InternalInconsistencyError(
                "no reducible configuration although mad < 14/3", _context(current, k=k)
            )
        red = reduce(current, occ)
        stack.append((current, red))
        current = red.reduced

    colouring = colour_edgeless(current, palette)
    steps: List[ProofStep] = []
    for graph, red in reversed(stack):
        colouring, strategy = extend_with_strategy(graph, red, colouring, k)
        steps.append(
            ProofStep(
                case=red.extension_case.value,
                occurrence=red.occurrence.to_record(),
                removed=[list(e) for e in red.removed_edges],
                extension_strategy=strategy,
            )
        )
    if verbose_enabled():
        print(f"🎨 coloured with {colouring.colours_used} <= {palette} colours in {len(steps)} steps", file=sys.stderr)
    return ProofResult(status="coloured", hypothesis_met=True, mad=mad, k=k, colouring=colouring, steps=steps)
