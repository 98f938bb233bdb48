"""
Graph sources for tests and scans: named graphs, every connected graph on a
few vertices, seeded sparse random graphs and planted configurations
"""
import random
import re
import sys
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict
from tqdm import tqdm

from tnsd.config import verbose_enabled
from tnsd.configurations import ConfigurationKind, ConfigurationOccurrence, occurrence_holds
from tnsd.errors import DomainError
from tnsd.graph_core import MAD_THRESHOLD, Graph, max_average_degree

MAX_EXHAUSTIVE_ORDER = 8
ATLAS_ORDER = 7


def named_graph(name: str) -> Graph:
    """K<n>, C<n>, P<n> (n vertices), K1,<n> (star with centre 0) or petersen"""
    key = name.strip().lower().replace("_", "").replace(" ", "")
    if key == "petersen":
        return Graph.from_networkx(nx.petersen_graph())
    star = re.fullmatch(r"k1,(\d+)", key)
    if star:
        return Graph.from_networkx(nx.star_graph(int(star.group(1))))
    family = re.fullmatch(r"([kcp])(\d+)", key)
    if family:
        n = int(family.group(2))
        builder = {"k": nx.complete_graph, "c": nx.cycle_graph, "p": nx.path_graph}[family.group(1)]
        if family.group(1) == "c" and n < 3:
            raise DomainError("cycles need at least 3 vertices")
        return Graph.from_networkx(builder(n))
    raise DomainError(f"unknown graph name {name!r}")


def _atlas(n: int) -> List[nx.Graph]:
    return [h for h in nx.graph_atlas_g() if h.number_of_nodes() == n and nx.is_connected(h)]


def _one_vertex_extensions(smaller: List[nx.Graph], n: int) -> List[nx.Graph]:
    # every connected graph has a vertex whose removal keeps it connected
    buckets: Dict[str, List[nx.Graph]] = {}
    found: List[nx.Graph] = []
    for base in tqdm(smaller, desc=f"🔍 connected graphs on {n} vertices", disable=not verbose_enabled(), file=sys.stderr):
        for mask in range(1, 1 << (n - 1)):
            h = base.copy()
            h.add_edges_from((n - 1, u) for u in range(n - 1) if mask >> u & 1)
            key = nx.weisfeiler_lehman_graph_hash(h)
            bucket = buckets.setdefault(key, [])
            if any(nx.is_isomorphic(h, other) for other in bucket):
                continue
            bucket.append(h)
            found.append(h)
    return found


def connected_graphs(n: int) -> Iterator[Graph]:
    """Every connected graph on n vertices, one per isomorphism class"""
    if not 1 <= n <= MAX_EXHAUSTIVE_ORDER:
        raise DomainError(f"exhaustive enumeration supports 1 <= n <= {MAX_EXHAUSTIVE_ORDER}, got {n}")
    if n <= ATLAS_ORDER:
        graphs = _atlas(n)
    else:
        graphs = _one_vertex_extensions(_atlas(ATLAS_ORDER), n)
    for h in graphs:
        yield Graph.from_networkx(h)


def connected_graphs_up_to(max_n: int) -> Iterator[Graph]:
    for n in range(1, max_n + 1):
        yield from connected_graphs(n)


def random_sparse_graphs(
    count: int,
    seed: int,
    min_n: int = 5,
    max_n: int = 60,
    max_degree: Optional[int] = 8,
    mad_below: Fraction = MAD_THRESHOLD,
) -> Iterator[Graph]:
    """G(n, m) samples with average degree below `mad_below`, kept only when
    the exact mad is below `mad_below` and the maximum degree is in range"""
    if min_n < 1 or max_n < min_n:
        raise DomainError(f"bad order range {min_n}..{max_n}")
    rng = random.Random(seed)
    produced = 0
    attempts = 0
    while produced < count:
        attempts += 1
        if attempts > 1000 * max(count, 1):
            raise DomainError("no graph satisfied the filters after many attempts")
        n = rng.randint(min_n, max_n)
        ceiling = max(0, min(n * (n - 1) // 2, int(mad_below * n / 2)))
        m = rng.randint(min(n - 1, ceiling), ceiling)
        g = Graph.from_networkx(nx.gnm_random_graph(n, m, seed=rng.randrange(2**32)))
        if max_degree is not None and g.max_degree > max_degree:
            continue
        if max_average_degree(g).value >= mad_below:
            continue
        produced += 1
        yield g


def random_tree(n: int, seed: int, max_degree: int = 8) -> Graph:
    rng = random.Random(seed)
    degrees = [0] * n
    edges = []
    for v in range(1, n):
        parent = rng.choice([u for u in range(v) if degrees[u] < max_degree])
        edges.append((parent, v))
        degrees[parent] += 1
        degrees[v] += 1
    return Graph(n, edges)


# ------------------------------------------------------------ planted instances

class PlantedInstance(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: ConfigurationKind
    seed: int
    graph: Graph
    occurrence: ConfigurationOccurrence


def _others(rng: random.Random, count: int, low: int = 1, high: int = 5) -> List[Tuple[Optional[str], int]]:
    return [(None, rng.randint(low, high)) for _ in range(count)]


def _plan(kind: ConfigurationKind, k: int, rng: random.Random) -> List[Tuple[Optional[str], int]]:
    """(role, degree) for each neighbour of the anchor"""
    if kind == ConfigurationKind.C1:
        return [("u", rng.randint(1, k // 2 + 1))] + _others(rng, rng.randint(0, 1))
    if kind == ConfigurationKind.C2:
        return [("u", rng.randint(1, 4))] + _others(rng, rng.randint(0, 3))
    if kind == ConfigurationKind.C3:
        return [("u", rng.randint(1, 5))] + _others(rng, rng.randint(0, 2))
    if kind == ConfigurationKind.C4:
        return [(f"v{i}", 4) for i in (1, 2, 3)] + _others(rng, 2)
    if kind == ConfigurationKind.C5:
        return [("u", rng.randint(1, 3)), ("w", rng.randint(1, 4))] + _others(rng, 4)
    if kind == ConfigurationKind.C6:
        return [("u", rng.randint(1, 2)), ("w", rng.randint(1, 3)), ("y", rng.randint(1, 4))] + _others(rng, 4)
    if kind == ConfigurationKind.C7:
        d = rng.randint(8, k)
        twos = [(f"v{i}", rng.randint(1, 2)) for i in range(1, d - 6)]
        return twos + [("u1", rng.randint(1, 3)), ("u2", rng.randint(1, 3)), ("w", rng.randint(1, 4))] + _others(rng, 4)
    if kind == ConfigurationKind.C8:
        threes = [(f"v{i}", rng.randint(1, 3)) for i in range(1, k - 1)]
        return threes + [("u", rng.randint(1, 4)), ("w", rng.randint(1, 5))]
    if kind == ConfigurationKind.LEMMA8:
        while True:
            d = rng.randint(1, k)
            n2 = rng.randint(0, d)
            n3 = rng.randint(0, d - n2)
            n4 = d - n2 - n3
            if n4 < n2 + 1 + (n2 + n3) * (k - d):
                break
        return (
            [(f"u{i}", rng.randint(1, 2)) for i in range(1, n2 + 1)]
            + [(f"w{i}", 3) for i in range(1, n3 + 1)]
            + _others(rng, n4, 4, min(k, 6))
        )
    raise DomainError(f"no planted generator for {kind}")


def _attempt(plan, max_vertices: int, rng: random.Random) -> Tuple[int, List[Tuple[int, int]]]:
    d = len(plan)
    needs = [degree - 1 for _, degree in plan]
    room = max_vertices - 1 - d
    widest = max(needs, default=0)
    if widest > room:
        raise DomainError("the configuration does not fit in the vertex budget")
    pool = rng.randint(widest, max(widest, min(sum(needs), room)))
    first = d + 1
    edges = [(0, x) for x in range(1, d + 1)]
    for x, need in zip(range(1, d + 1), needs):
        edges += [(x, first + f) for f in rng.sample(range(pool), need)]
    present = {frozenset(e) for e in edges}
    for _ in range(rng.randint(0, pool // 3)):
        if pool < 2:
            break
        a, b = rng.sample(range(pool), 2)
        pair = frozenset((first + a, first + b))
        if pair not in present:
            present.add(pair)
            edges.append((first + a, first + b))
    return first + pool, edges


def planted_instance(kind, seed: int, k: int = 8, max_vertices: int = 25, attempts: int = 200) -> PlantedInstance:
    """A graph with n <= max_vertices, Δ <= k and mad < 14/3 carrying `kind` at a known anchor"""
    kind = ConfigurationKind(kind)
    if kind == ConfigurationKind.COROLLARY:
        raise DomainError("corollary violations are planted as Lemma 8 violations")
    rng = random.Random(f"{kind.value}:{seed}:{k}")
    for _ in range(attempts):
        plan = _plan(kind, k, rng)
        n, edges = _attempt(plan, max_vertices, rng)
        labels = list(range(n))
        rng.shuffle(labels)
        g = Graph(n, ((labels[a], labels[b]) for a, b in edges))
        roles = {"v": labels[0]}
        roles.update({role: labels[x] for x, (role, _) in enumerate(plan, start=1) if role is not None})
        occ = ConfigurationOccurrence(kind=kind, anchor=labels[0], roles=roles, k=k)
        if g.max_degree > k or not occurrence_holds(g, occ):
            continue
        if max_average_degree(g).value >= MAD_THRESHOLD:
            continue
        return PlantedInstance(kind=kind, seed=seed, graph=g, occurrence=occ)
    raise DomainError(f"could not plant {kind.value} within {attempts} attempts")
