"""
Total colourings, the tnsd property and the exact solver for the tnsd index
"""
import sys
import time
from enum import Enum
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from tnsd.config import get_settings, verbose_enabled
from tnsd.errors import ColouringError, DomainError
from tnsd.graph_core import Edge, Graph, edge_key


class TotalColouring:
    """Partial or complete assignment of colours 1..k to vertices and edges"""

    __slots__ = ("k", "vertex_colours", "edge_colours")

    def __init__(
        self,
        k: int,
        vertex_colours: Optional[Dict[int, int]] = None,
        edge_colours: Optional[Dict[Edge, int]] = None,
    ):
        if k < 1:
            raise ColouringError(f"palette size must be positive, got {k}")
        self.k = k
        self.vertex_colours: Dict[int, int] = {}
        self.edge_colours: Dict[Edge, int] = {}
        for v, colour in (vertex_colours or {}).items():
            self.set_vertex(v, colour)
        for (u, v), colour in (edge_colours or {}).items():
            self.set_edge(u, v, colour)

    def _check_colour(self, colour: int) -> None:
        if not isinstance(colour, int) or not 1 <= colour <= self.k:
            raise ColouringError(f"colour {colour!r} is outside the palette 1..{self.k}")

    def set_vertex(self, v: int, colour: int) -> None:
        self._check_colour(colour)
        self.vertex_colours[v] = colour

    def set_edge(self, u: int, v: int, colour: int) -> None:
        self._check_colour(colour)
        self.edge_colours[edge_key(u, v)] = colour

    def vertex(self, v: int) -> Optional[int]:
        return self.vertex_colours.get(v)

    def edge(self, u: int, v: int) -> Optional[int]:
        return self.edge_colours.get(edge_key(u, v))

    def uncolour_vertex(self, v: int) -> None:
        self.vertex_colours.pop(v, None)

    def uncolour_edge(self, u: int, v: int) -> None:
        self.edge_colours.pop(edge_key(u, v), None)

    def is_complete(self, g: Graph) -> bool:
        return all(v in self.vertex_colours for v in g.vertices) and all(
            e in self.edge_colours for e in g.edges
        )

    def with_palette(self, k: int) -> "TotalColouring":
        return TotalColouring(k, self.vertex_colours, self.edge_colours)

    def copy(self) -> "TotalColouring":
        return TotalColouring(self.k, self.vertex_colours, self.edge_colours)

    @property
    def colours_used(self) -> int:
        """Largest colour in use (0 when nothing is coloured)"""
        return max(list(self.vertex_colours.values()) + list(self.edge_colours.values()), default=0)

    def to_json(self, vertex_count: Optional[int] = None) -> dict:
        if vertex_count is None:
            vertex_count = max(self.vertex_colours, default=-1) + 1
        return {
            "k": self.k,
            "vertex_colours": [self.vertex_colours.get(v) for v in range(vertex_count)],
            "edge_colours": [[u, v, c] for (u, v), c in sorted(self.edge_colours.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TotalColouring":
        try:
            colouring = cls(int(data["k"]))
            for v, colour in enumerate(data.get("vertex_colours", [])):
                if colour is not None:
                    colouring.set_vertex(v, colour)
            for u, v, colour in data.get("edge_colours", []):
                colouring.set_edge(u, v, colour)
        except (KeyError, TypeError, ValueError) as e:
            raise ColouringError(f"malformed colouring record: {e}")
        return colouring

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TotalColouring)
            and self.k == other.k
            and self.vertex_colours == other.vertex_colours
            and self.edge_colours == other.edge_colours
        )

    def __repr__(self) -> str:
        return f"TotalColouring(k={self.k}, vertices={self.vertex_colours}, edges={self.edge_colours})"


def _check_elements(g: Graph, c: TotalColouring) -> None:
    for v in c.vertex_colours:
        if not isinstance(v, int) or not 0 <= v < g.vertex_count:
            raise ColouringError(f"colouring assigns a colour to vertex {v!r}, which is not in the graph")
    for u, v in c.edge_colours:
        if not g.has_edge(u, v):
            raise ColouringError(f"colouring assigns a colour to edge ({u}, {v}), which is not in the graph")


def vertex_sums(g: Graph, c: TotalColouring) -> Dict[int, int]:
    """s(w) = c(w) + sum of incident edge colours; uncoloured elements count 0"""
    sums = {v: c.vertex_colours.get(v, 0) for v in g.vertices}
    for (u, v), colour in c.edge_colours.items():
        if u in sums and v in sums:
            sums[u] += colour
            sums[v] += colour
    return sums


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: str
    elements: List[List[int]]
    detail: str


class VerificationReport(BaseModel):
    proper: bool
    tnsd: bool
    violations: List[Violation]


def verify_colouring(g: Graph, c: TotalColouring) -> VerificationReport:
    """Every violated constraint; raises ColouringError for elements not in g"""
    _check_elements(g, c)
    violations: List[Violation] = []

    for v in g.vertices:
        if v not in c.vertex_colours:
            violations.append(Violation(kind="uncoloured", elements=[[v]], detail=f"vertex {v}"))
    for u, v in g.edges:
        if (u, v) not in c.edge_colours:
            violations.append(Violation(kind="uncoloured", elements=[[u, v]], detail=f"edge {u}-{v}"))
    for colour in list(c.vertex_colours.values()) + list(c.edge_colours.values()):
        if not 1 <= colour <= c.k:
            violations.append(Violation(kind="palette", elements=[], detail=f"colour {colour} outside 1..{c.k}"))

    for u, v in g.edges:
        cu, cv, cuv = c.vertex(u), c.vertex(v), c.edge(u, v)
        if cu is not None and cu == cv:
            violations.append(Violation(kind="adjacent-vertices", elements=[[u], [v]], detail=f"both coloured {cu}"))
        for end, colour in ((u, cu), (v, cv)):
            if cuv is not None and cuv == colour:
                violations.append(
                    Violation(kind="edge-endpoint", elements=[[u, v], [end]], detail=f"both coloured {cuv}")
                )
    for w in g.vertices:
        for a, b in combinations(g.incident_edges(w), 2):
            ca, cb = c.edge_colours.get(a), c.edge_colours.get(b)
            if ca is not None and ca == cb:
                violations.append(
                    Violation(kind="adjacent-edges", elements=[list(a), list(b)], detail=f"both coloured {ca}")
                )

    complete = c.is_complete(g)
    proper = complete and not violations
    sum_conflicts = []
    if complete:
        sums = vertex_sums(g, c)
        for u, v in g.edges:
            if sums[u] == sums[v]:
                sum_conflicts.append(
                    Violation(kind="sum-conflict", elements=[[u], [v]], detail=f"both sums equal {sums[u]}")
                )
    return VerificationReport(
        proper=proper,
        tnsd=proper and not sum_conflicts,
        violations=violations + sum_conflicts,
    )


def is_proper_total(g: Graph, c: TotalColouring) -> bool:
    return verify_colouring(g, c).proper


def is_tnsd(g: Graph, c: TotalColouring) -> bool:
    return verify_colouring(g, c).tnsd


# ---------------------------------------------------------------- solver

class SearchStatus(str, Enum):
    FOUND = "found"
    INFEASIBLE = "infeasible"
    TIMEOUT = "timeout"


class SearchBudget(BaseModel):
    """Node and wall-clock caps; None means unlimited"""

    model_config = ConfigDict(frozen=True)

    node_limit: Optional[int] = None
    time_limit: Optional[float] = None

    @classmethod
    def from_settings(cls) -> "SearchBudget":
        settings = get_settings()
        return cls(node_limit=settings.node_limit, time_limit=settings.time_limit)

    @classmethod
    def unlimited(cls) -> "SearchBudget":
        return cls()


class SearchResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    status: SearchStatus
    k: int
    colouring: Optional[TotalColouring] = None
    nodes: int = 0
    elapsed: float = 0.0

    @property
    def found(self) -> bool:
        return self.status == SearchStatus.FOUND


class _BudgetExceeded(Exception):
    pass


class TnsdSolver:
    """Exact backtracking over vertices and edges with forward checking.

    Elements 0..n-1 are the vertices, n.. are the edges in sorted order. The
    closure of a vertex is the vertex plus its incident edges; its elements
    pairwise conflict and its colour total is the vertex sum.
    """

    def __init__(self, g: Graph, k: int, budget: Optional[SearchBudget] = None, anchor: Optional[int] = None):
        if k < 1:
            raise DomainError(f"palette size must be positive, got {k}")
        self.g = g
        self.k = k
        self.budget = budget or SearchBudget.unlimited()
        n = g.vertex_count
        self.edges: List[Edge] = list(g.edges)
        self.count = n + len(self.edges)
        edge_index = {e: n + i for i, e in enumerate(self.edges)}

        self.closures: List[List[int]] = [
            [v] + [edge_index[edge_key(v, w)] for w in g.sorted_neighbours(v)] for v in g.vertices
        ]
        self.members: List[List[int]] = [[] for _ in range(self.count)]
        conflicts = [set() for _ in range(self.count)]
        for v, closure in enumerate(self.closures):
            for element in closure:
                self.members[element].append(v)
            for a, b in combinations(closure, 2):
                conflicts[a].add(b)
                conflicts[b].add(a)
        for u, v in self.edges:
            conflicts[u].add(v)
            conflicts[v].add(u)
        self.conflicts: List[Tuple[int, ...]] = [tuple(sorted(c)) for c in conflicts]
        self.neighbours: List[Tuple[int, ...]] = [tuple(g.sorted_neighbours(v)) for v in g.vertices]
        self.order = self._static_order()

        full = ((1 << k) - 1) << 1
        self.domains = [full] * self.count
        if anchor is not None:
            g.check_vertex(anchor)
            self.domains[anchor] = 1 << 1
        self.colour = [0] * self.count
        self.partial_sum = [0] * n
        self.remaining = [len(closure) for closure in self.closures]
        self.trail: List[Tuple[int, int]] = []
        self.nodes = 0
        self._deadline: Optional[float] = None

    def _static_order(self) -> List[int]:
        """Most conflicts first, then most already-ordered conflict neighbours"""
        degree = [len(c) for c in self.conflicts]
        weight = [0] * self.count
        placed = [False] * self.count
        order = []
        for _ in range(self.count):
            best = max(
                (i for i in range(self.count) if not placed[i]),
                key=lambda i: (weight[i], degree[i], -i),
            )
            placed[best] = True
            order.append(best)
            for other in self.conflicts[best]:
                weight[other] += 1
        return order

    def _tick(self) -> None:
        self.nodes += 1
        limit = self.budget.node_limit
        if limit is not None and self.nodes > limit:
            raise _BudgetExceeded()
        if self._deadline is not None and self.nodes & 1023 == 0 and time.monotonic() > self._deadline:
            raise _BudgetExceeded()

    def _sum_window_open(self, v: int) -> bool:
        """False when no completion of v's closure can avoid its finished neighbours' sums"""
        finished = {self.partial_sum[w] for w in self.neighbours[v] if self.remaining[w] == 0}
        if not finished:
            return True
        union = 0
        for element in self.closures[v]:
            if self.colour[element] == 0:
                union |= self.domains[element]
        colours = [c for c in range(1, self.k + 1) if union >> c & 1]
        r = self.remaining[v]
        if len(colours) < r:
            return False
        low = self.partial_sum[v] + sum(colours[:r])
        high = self.partial_sum[v] + sum(colours[-r:])
        if high - low + 1 > len(finished):
            return True
        return any(s not in finished for s in range(low, high + 1))

    def _assign(self, element: int, colour: int) -> bool:
        self.colour[element] = colour
        for v in self.members[element]:
            self.partial_sum[v] += colour
            self.remaining[v] -= 1
        bit = 1 << colour
        for other in self.conflicts[element]:
            if self.colour[other] == 0 and self.domains[other] & bit:
                self.domains[other] &= ~bit
                self.trail.append((other, colour))
                if self.domains[other] == 0:
                    return False
        for v in self.members[element]:
            if self.remaining[v] == 0:
                for w in self.neighbours[v]:
                    if self.remaining[w] == 0 and self.partial_sum[w] == self.partial_sum[v]:
                        return False
        for v in self.members[element]:
            for x in (v,) + self.neighbours[v]:
                if self.remaining[x] > 0 and not self._sum_window_open(x):
                    return False
        return True

    def _unassign(self, element: int, colour: int, mark: int) -> None:
        self.colour[element] = 0
        for v in self.members[element]:
            self.partial_sum[v] -= colour
            self.remaining[v] += 1
        while len(self.trail) > mark:
            other, removed = self.trail.pop()
            self.domains[other] |= 1 << removed

    def _search(self, position: int) -> bool:
        if position == self.count:
            return True
        element = self.order[position]
        domain = self.domains[element]
        while domain:
            lowest = domain & -domain
            domain ^= lowest
            colour = lowest.bit_length() - 1
            self._tick()
            mark = len(self.trail)
            if self._assign(element, colour) and self._search(position + 1):
                return True
            self._unassign(element, colour, mark)
        return False

    def _colouring(self) -> TotalColouring:
        n = self.g.vertex_count
        colouring = TotalColouring(self.k)
        for v in range(n):
            colouring.set_vertex(v, self.colour[v])
        for i, (u, v) in enumerate(self.edges):
            colouring.set_edge(u, v, self.colour[n + i])
        return colouring

    def solve(self) -> SearchResult:
        started = time.monotonic()
        if self.budget.time_limit is not None:
            self._deadline = started + self.budget.time_limit
        try:
            found = self._search(0)
        except _BudgetExceeded:
            return SearchResult(
                status=SearchStatus.TIMEOUT, k=self.k, nodes=self.nodes, elapsed=time.monotonic() - started
            )
        elapsed = time.monotonic() - started
        if found:
            return SearchResult(
                status=SearchStatus.FOUND, k=self.k, colouring=self._colouring(), nodes=self.nodes, elapsed=elapsed
            )
        return SearchResult(status=SearchStatus.INFEASIBLE, k=self.k, nodes=self.nodes, elapsed=elapsed)


def _symmetry_anchor(g: Graph) -> Optional[int]:
    if g.vertex_count == 0:
        return None
    return max(g.vertices, key=lambda v: (g.degree(v), -v))


def find_tnsd(
    g: Graph, k: int, budget: Optional[SearchBudget] = None, fix_anchor: bool = False
) -> SearchResult:
    """Three-valued decision: a tnsd k-colouring, a proof of none, or a timeout.

    With `fix_anchor` a maximum-degree vertex is first restricted to colour 1;
    sums are not invariant under renaming colours, so a failure under that
    restriction is repeated without it before infeasibility is reported.
    """
    if k < 1:
        raise DomainError(f"palette size must be positive, got {k}")
    budget = budget or SearchBudget.from_settings()
    result = None
    if fix_anchor:
        result = TnsdSolver(g, k, budget, anchor=_symmetry_anchor(g)).solve()
    if result is None or result.status == SearchStatus.INFEASIBLE:
        spent = result.nodes if result else 0
        remaining = budget
        if result is not None and budget.node_limit is not None:
            remaining = SearchBudget(node_limit=max(1, budget.node_limit - spent), time_limit=budget.time_limit)
        result = TnsdSolver(g, k, remaining).solve()
    if result.found and not is_tnsd(g, result.colouring):
        raise ColouringError(f"solver returned an invalid colouring for k={k}")
    if verbose_enabled():
        print(f"🎨 k={k}: {result.status.value} after {result.nodes} nodes", file=sys.stderr)
    return result


def brute_force_tnsd(g: Graph, k: int) -> Optional[TotalColouring]:
    """Reference oracle: enumerate proper total colourings, test sums at the end"""
    if g.vertex_count + g.edge_count > 12:
        raise DomainError("enumeration is limited to |V|+|E| <= 12")
    n = g.vertex_count
    elements: List[Tuple[int, ...]] = [(v,) for v in g.vertices] + list(g.edges)
    colours: List[int] = [0] * len(elements)

    def clashes(i: int, colour: int) -> bool:
        a = set(elements[i])
        for j in range(i):
            if colours[j] != colour:
                continue
            b = set(elements[j])
            if len(a) == 1 and len(b) == 1:
                if g.has_edge(next(iter(a)), next(iter(b))):
                    return True
            elif a & b:
                return True
        return False

    def sums_distinct() -> bool:
        sums = [colours[v] for v in range(n)]
        for i, (u, v) in enumerate(g.edges):
            sums[u] += colours[n + i]
            sums[v] += colours[n + i]
        return all(sums[u] != sums[v] for u, v in g.edges)

    def walk(i: int) -> bool:
        if i == len(elements):
            return sums_distinct()
        for colour in range(1, k + 1):
            if not clashes(i, colour):
                colours[i] = colour
                if walk(i + 1):
                    return True
        colours[i] = 0
        return False

    if not walk(0):
        return None
    result = TotalColouring(k)
    for v in range(n):
        result.set_vertex(v, colours[v])
    for i, (u, v) in enumerate(g.edges):
        result.set_edge(u, v, colours[n + i])
    return result


class IndexResult(BaseModel):
    """Exact index when `value` is set, otherwise the bracket [lower, upper]"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: Optional[int]
    lower: int
    upper: Optional[int]
    colouring: Optional[TotalColouring] = None
    attempts: List[Tuple[int, str]] = []

    @property
    def exact(self) -> bool:
        return self.value is not None


def tnsd_index(g: Graph, budget: Optional[SearchBudget] = None, fix_anchor: bool = False) -> IndexResult:
    """Least k admitting a tnsd k-colouring, by ascending search from Δ+1"""
    if g.vertex_count == 0:
        raise DomainError("the tnsd index is undefined for the empty graph")
    if g.edge_count == 0:
        colouring = TotalColouring(1, {v: 1 for v in g.vertices})
        return IndexResult(value=1, lower=1, upper=1, colouring=colouring, attempts=[(1, "found")])
    budget = budget or SearchBudget.from_settings()
    lower = g.max_degree + 1
    attempts: List[Tuple[int, str]] = []
    exact = True
    ceiling = 2 * (g.vertex_count + g.edge_count) + 2
    k = lower
    while k <= ceiling:
        result = find_tnsd(g, k, budget, fix_anchor=fix_anchor)
        attempts.append((k, result.status.value))
        if result.found:
            if exact:
                return IndexResult(value=k, lower=k, upper=k, colouring=result.colouring, attempts=attempts)
            return IndexResult(value=None, lower=lower, upper=k, colouring=result.colouring, attempts=attempts)
        if result.status == SearchStatus.INFEASIBLE and exact:
            lower = k + 1
        else:
            exact = False
        k += 1
    return IndexResult(value=None, lower=lower, upper=None, attempts=attempts)
