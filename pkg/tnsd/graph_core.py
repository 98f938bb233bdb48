"""
Graph representation, ingestion and exact structural invariants
"""
import math
from collections import Counter, deque
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

import networkx as nx
from pydantic import BaseModel, ConfigDict

from tnsd.errors import (
    DomainError,
    GraphParseError,
    GraphValidationError,
    InternalInconsistencyError,
    InvalidVertexError,
)

Edge = Tuple[int, int]

GRAPH6_HEADER = b">>graph6<<"
# the constant of the discharging argument and of the theorem's hypothesis
MAD_THRESHOLD = Fraction(14, 3)


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple undirected graph on vertices 0..vertex_count-1"""

    __slots__ = ("_n", "_edges", "_edge_set", "_adjacency")

    def __init__(self, vertex_count: int, edges: Iterable[Tuple[int, int]] = ()):
        if vertex_count < 0:
            raise GraphValidationError(f"negative vertex count {vertex_count}")
        seen = set()
        adjacency: List[set] = [set() for _ in range(vertex_count)]
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GraphValidationError(f"edge ({u}, {v}) uses a vertex outside 0..{vertex_count - 1}")
            if u == v:
                raise GraphValidationError(f"loop at vertex {u}")
            key = edge_key(u, v)
            if key in seen:
                raise GraphValidationError(f"parallel edge {key}")
            seen.add(key)
            adjacency[u].add(v)
            adjacency[v].add(u)
        self._n = vertex_count
        self._edges = tuple(sorted(seen))
        self._edge_set = frozenset(seen)
        self._adjacency = tuple(frozenset(a) for a in adjacency)

    @property
    def vertex_count(self) -> int:
        return self._n

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def vertices(self) -> range:
        return range(self._n)

    @property
    def edges(self) -> Tuple[Edge, ...]:
        """Edges as sorted (u, v) pairs with u < v, in lexicographic order"""
        return self._edges

    def check_vertex(self, v: int) -> None:
        if not isinstance(v, int) or not 0 <= v < self._n:
            raise InvalidVertexError(f"vertex {v!r} is not in 0..{self._n - 1}")

    def neighbours(self, v: int) -> FrozenSet[int]:
        self.check_vertex(v)
        return self._adjacency[v]

    def sorted_neighbours(self, v: int) -> List[int]:
        return sorted(self.neighbours(v))

    def degree(self, v: int) -> int:
        self.check_vertex(v)
        return len(self._adjacency[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self._adjacency), default=0)

    @property
    def min_degree(self) -> int:
        return min((len(a) for a in self._adjacency), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v) in self._edge_set

    def incident_edges(self, v: int) -> List[Edge]:
        return [edge_key(v, w) for w in self.sorted_neighbours(v)]

    def without_edges(self, removed: Iterable[Tuple[int, int]]) -> "Graph":
        drop = {edge_key(u, v) for u, v in removed}
        missing = drop - self._edge_set
        if missing:
            raise DomainError(f"cannot remove absent edges {sorted(missing)}")
        return Graph(self._n, (e for e in self._edges if e not in drop))

    def induced_subgraph(self, vertices: Iterable[int]) -> "Graph":
        """Subgraph induced by `vertices`, relabelled 0.. in increasing order"""
        keep = sorted(set(vertices))
        for v in keep:
            self.check_vertex(v)
        index = {v: i for i, v in enumerate(keep)}
        return Graph(
            len(keep),
            ((index[u], index[v]) for u, v in self._edges if u in index and v in index),
        )

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self._edges)
        return graph

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "Graph":
        """Relabels the nodes 0.. in sorted order when they are not already 0..n-1"""
        nodes = list(graph.nodes())
        try:
            nodes = sorted(nodes)
        except TypeError:
            pass
        index = {node: i for i, node in enumerate(nodes)}
        return cls(len(nodes), ((index[u], index[v]) for u, v in graph.edges()))

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self._n == other._n and self._edge_set == other._edge_set

    def __hash__(self) -> int:
        return hash((self._n, self._edge_set))

    def __repr__(self) -> str:
        return f"Graph(vertex_count={self._n}, edges={list(self._edges)})"


# ---------------------------------------------------------------- ingestion

def _graph6_size(data: bytes, start: int) -> Tuple[int, int]:
    """Decode N(n) at `start`; returns (n, offset of the first edge byte)"""
    if start >= len(data):
        raise GraphParseError("missing vertex count", start)
    if data[start] != 126:
        return data[start] - 63, start + 1
    if start + 1 < len(data) and data[start + 1] == 126:
        width, first = 6, start + 2
    else:
        width, first = 3, start + 1
    if first + width > len(data):
        raise GraphParseError("truncated vertex count", len(data))
    n = 0
    for byte in data[first:first + width]:
        n = (n << 6) | (byte - 63)
    return n, first + width


def parse_graph6(data: Union[bytes, str]) -> Graph:
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.rstrip(b"\r\n")
    start = len(GRAPH6_HEADER) if data.startswith(GRAPH6_HEADER) else 0
    for offset in range(start, len(data)):
        if not 63 <= data[offset] <= 126:
            raise GraphParseError(f"byte {data[offset]!r} outside the graph6 range 63..126", offset)
    n, first = _graph6_size(data, start)
    bit_count = n * (n - 1) // 2
    byte_count = (bit_count + 5) // 6
    if len(data) - first != byte_count:
        offset = min(len(data), first + byte_count)
        raise GraphParseError(
            f"expected {byte_count} edge bytes for {n} vertices, found {len(data) - first}", offset
        )
    bits = []
    for byte in data[first:]:
        value = byte - 63
        bits.extend((value >> shift) & 1 for shift in range(5, -1, -1))
    if any(bits[bit_count:]):
        raise GraphParseError("non-zero padding bits", len(data) - 1)
    edges = []
    position = 0
    for v in range(1, n):
        for u in range(v):
            if bits[position]:
                edges.append((u, v))
            position += 1
    return Graph(n, edges)


def serialize_graph6(g: Graph) -> bytes:
    """Canonical graph6 encoding (no header, zero padding)"""
    n = g.vertex_count
    if n < 63:
        out = bytearray([n + 63])
    elif n < 258048:
        out = bytearray([126] + [((n >> shift) & 63) + 63 for shift in (12, 6, 0)])
    else:
        out = bytearray([126, 126] + [((n >> shift) & 63) + 63 for shift in (30, 24, 18, 12, 6, 0)])
    bits = [1 if g.has_edge(u, v) else 0 for v in range(1, n) for u in range(v)]
    bits.extend([0] * (-len(bits) % 6))
    for i in range(0, len(bits), 6):
        value = 0
        for bit in bits[i:i + 6]:
            value = (value << 1) | bit
        out.append(value + 63)
    return bytes(out)


def parse_edge_list(data: Union[bytes, str]) -> Graph:
    """One `u v` pair per line, 0-based ids, `#` starts a comment.

    An optional first data line `n <count>` fixes the vertex count so that
    trailing isolated vertices can be written down.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    edges = []
    declared = 0
    highest = -1
    offset = 0
    first_data_line = True
    for raw_line in data.split(b"\n"):
        line = raw_line.split(b"#", 1)[0]
        tokens = []
        column = 0
        for token in line.split():
            column = line.index(token, column)
            tokens.append((token, offset + column))
            column += len(token)
        if tokens:
            if first_data_line and tokens[0][0] == b"n":
                if len(tokens) != 2 or not tokens[1][0].isdigit():
                    raise GraphParseError("header must read `n <count>`", tokens[0][1])
                declared = int(tokens[1][0])
            else:
                if len(tokens) != 2:
                    raise GraphParseError(f"expected two vertex ids, found {len(tokens)} tokens", tokens[0][1])
                pair = []
                for token, position in tokens:
                    if not token.isdigit():
                        raise GraphParseError(f"vertex id {token.decode('utf-8', 'replace')!r} is not a non-negative integer", position)
                    pair.append(int(token))
                edges.append((pair[0], pair[1]))
                highest = max(highest, pair[0], pair[1])
            first_data_line = False
        offset += len(raw_line) + 1
    if declared and highest >= declared:
        raise GraphValidationError(f"vertex id {highest} exceeds the declared count {declared}")
    return Graph(max(declared, highest + 1), edges)


def parse_graph(data: Union[bytes, str], fmt: str = "graph6") -> Graph:
    if fmt == "graph6":
        return parse_graph6(data)
    if fmt in ("edge-list", "edgelist"):
        return parse_edge_list(data)
    raise DomainError(f"unknown graph format {fmt!r}")


def parse_graph6_stream(data: Union[bytes, str]) -> Iterator[Graph]:
    """One graph6 string per non-empty line"""
    if isinstance(data, str):
        data = data.encode("ascii")
    for line in data.splitlines():
        if line.strip():
            yield parse_graph6(line.strip())


# ------------------------------------------------------------- degrees

def degree(g: Graph, v: int) -> int:
    return g.degree(v)


class DegreeProfile(BaseModel):
    """Neighbour-degree counts of one vertex (n_{i-}(v), n_{i+}(v))"""

    model_config = ConfigDict(frozen=True)

    vertex: int
    degree: int
    neighbour_degrees: Tuple[int, ...]

    def at_most(self, i: int) -> int:
        return sum(1 for d in self.neighbour_degrees if d <= i)

    def at_least(self, i: int) -> int:
        return sum(1 for d in self.neighbour_degrees if d >= i)

    def exactly(self, i: int) -> int:
        return sum(1 for d in self.neighbour_degrees if d == i)

    def _thresholds(self) -> range:
        return range(0, max(self.neighbour_degrees, default=0) + 2)

    @property
    def n_at_most(self) -> Dict[int, int]:
        return {i: self.at_most(i) for i in self._thresholds()}

    @property
    def n_at_least(self) -> Dict[int, int]:
        return {i: self.at_least(i) for i in self._thresholds()}


def neighbour_degree_counts(g: Graph, v: int) -> DegreeProfile:
    return DegreeProfile(
        vertex=v,
        degree=g.degree(v),
        neighbour_degrees=tuple(sorted(g.degree(w) for w in g.neighbours(v))),
    )


def degree_counts(g: Graph) -> Counter:
    """n_i(G) for every degree i present in g"""
    return Counter(g.degree(v) for v in g.vertices)


# ------------------------------------------------------------- density

class MadResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: Fraction
    witness: Tuple[int, ...]

    def to_record(self) -> dict:
        return {
            "invariant": "mad",
            "value": f"{self.value.numerator}/{self.value.denominator}",
            "value_numerator": self.value.numerator,
            "value_denominator": self.value.denominator,
            "witness": list(self.witness),
        }


_SOURCE, _SINK = "source", "sink"


def _edges_inside(g: Graph, vertices: FrozenSet[int]) -> int:
    return sum(1 for u, v in g.edges if u in vertices and v in vertices)


def _denser_subset(g: Graph, density: Fraction) -> Optional[FrozenSet[int]]:
    """A vertex set S with |E(S)|/|S| > density, or None if there is none.

    Goldberg's network with integer capacities: for density p/q the minimum
    cut equals q*m*n + 2*min_S(p|S| - q|E(S)|), so a cut below q*m*n exposes
    a denser set on the source side.
    """
    p, q = density.numerator, density.denominator
    m, n = g.edge_count, g.vertex_count
    network = nx.DiGraph()
    for v in g.vertices:
        network.add_edge(_SOURCE, v, capacity=q * m)
        network.add_edge(v, _SINK, capacity=q * m + 2 * p - q * g.degree(v))
    for u, v in g.edges:
        network.add_edge(u, v, capacity=q)
        network.add_edge(v, u, capacity=q)
    cut_value, (source_side, _) = nx.minimum_cut(network, _SOURCE, _SINK)
    if cut_value >= q * m * n:
        return None
    return frozenset(source_side) - {_SOURCE}


def max_average_degree(g: Graph) -> MadResult:
    """Exact mad(g) = max 2|E(H)|/|V(H)| with a witness vertex set"""
    n, m = g.vertex_count, g.edge_count
    if n == 0:
        raise DomainError("mad is undefined for the empty graph")
    everything = tuple(g.vertices)
    if m == 0:
        return MadResult(value=Fraction(0), witness=everything)
    lower, witness = Fraction(m, n), frozenset(everything)
    upper = Fraction(n - 1, 2)
    # two distinct densities a/b, c/d with b, d <= n differ by at least this
    gap = Fraction(1, n * (n - 1))
    while upper - lower >= gap:
        middle = (lower + upper) / 2
        denser = _denser_subset(g, middle)
        if denser is None:
            upper = middle
        else:
            witness = denser
            lower = Fraction(_edges_inside(g, denser), len(denser))
    if _denser_subset(g, lower) is not None:
        raise InternalInconsistencyError(
            "densest-subgraph search stopped below the optimum",
            {"graph6": serialize_graph6(g).decode("ascii"), "density": str(lower)},
        )
    if Fraction(_edges_inside(g, witness), len(witness)) != lower:
        raise InternalInconsistencyError("witness density does not match", {"witness": sorted(witness)})
    return MadResult(value=2 * lower, witness=tuple(sorted(witness)))


def brute_force_mad(g: Graph) -> Fraction:
    """Reference oracle: enumerate every non-empty vertex subset"""
    n = g.vertex_count
    if n == 0:
        raise DomainError("mad is undefined for the empty graph")
    if n > 16:
        raise DomainError("subset enumeration is limited to 16 vertices")
    best = Fraction(0)
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            inside = _edges_inside(g, frozenset(subset))
            best = max(best, Fraction(2 * inside, size))
    return best


# ------------------------------------------------------------- cycles

def girth(g: Graph) -> Union[int, float]:
    """Length of a shortest cycle, math.inf for forests"""
    best = math.inf
    for root in g.vertices:
        distance = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            if 2 * distance[x] >= best:
                break
            for y in g.neighbours(x):
                if y not in distance:
                    distance[y] = distance[x] + 1
                    parent[y] = x
                    queue.append(y)
                elif parent[x] != y:
                    best = min(best, distance[x] + distance[y] + 1)
    return best


def planar_girth_mad_bound(g_girth: int) -> Fraction:
    """2g/(g-2): every planar graph of girth g has mad below this"""
    if not isinstance(g_girth, int) or g_girth < 3:
        raise DomainError(f"girth must be a finite integer >= 3, got {g_girth!r}")
    return Fraction(2 * g_girth, g_girth - 2)


def is_smaller(g: Graph, h: Graph) -> bool:
    return g.edge_count + g.vertex_count < h.edge_count + h.vertex_count
