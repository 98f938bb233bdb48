"""
Discharging: the weight function, rules R1-R3, the ghost-vertex conditions
and the per-degree case audit, all in exact rational arithmetic
"""
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional

from pydantic import BaseModel, ConfigDict

from tnsd.configurations import find_any_reducible
from tnsd.errors import DomainError
from tnsd.graph_core import MAD_THRESHOLD, Graph, neighbour_degree_counts

R1_AMOUNT = Fraction(1)
R2_AMOUNT = Fraction(5, 9)
R3_AMOUNT = Fraction(1, 6)


def fraction_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


class Transfer(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    giver: int
    receiver: int
    amount: Fraction
    rule: str


class ChargeLedger(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    initial: Dict[int, Fraction]
    transfers: List[Transfer] = []
    final: Dict[int, Fraction]

    @property
    def total_initial(self) -> Fraction:
        return sum(self.initial.values(), Fraction(0))

    @property
    def total_final(self) -> Fraction:
        return sum(self.final.values(), Fraction(0))

    @property
    def conserved(self) -> bool:
        return self.total_initial == self.total_final


def initial_charges(g: Graph) -> ChargeLedger:
    """ω(v) = d(v) - 14/3"""
    initial = {v: g.degree(v) - MAD_THRESHOLD for v in g.vertices}
    return ChargeLedger(initial=initial, transfers=[], final=dict(initial))


def _rule_for(giver_degree: int, receiver_degree: int) -> Optional[str]:
    if giver_degree >= 6 and receiver_degree in (1, 2):
        return "R1"
    if giver_degree >= 6 and receiver_degree == 3:
        return "R2"
    if giver_degree >= 5 and receiver_degree == 4:
        return "R3"
    return None


_AMOUNTS = {"R1": R1_AMOUNT, "R2": R2_AMOUNT, "R3": R3_AMOUNT}


def apply_rules(g: Graph) -> ChargeLedger:
    ledger = initial_charges(g)
    final = dict(ledger.initial)
    transfers: List[Transfer] = []
    for giver in g.vertices:
        for receiver in g.sorted_neighbours(giver):
            rule = _rule_for(g.degree(giver), g.degree(receiver))
            if rule is None:
                continue
            amount = _AMOUNTS[rule]
            transfers.append(Transfer(giver=giver, receiver=receiver, amount=amount, rule=rule))
            final[giver] -= amount
            final[receiver] += amount
    return ChargeLedger(initial=ledger.initial, transfers=transfers, final=final)


# ------------------------------------------------------------ ghost vertices

class GhostPartition(BaseModel):
    """V1: degree >= 3, V2: degree <= 2; d_v1 counts each vertex's V1-neighbours"""

    v1: FrozenSet[int]
    v2: FrozenSet[int]
    d_v1: Dict[int, int]


def ghost_partition(g: Graph) -> GhostPartition:
    v1 = frozenset(v for v in g.vertices if g.degree(v) >= 3)
    v2 = frozenset(g.vertices) - v1
    d_v1 = {v: sum(1 for w in g.neighbours(v) if w in v1) for v in g.vertices}
    return GhostPartition(v1=v1, v2=v2, d_v1=d_v1)


class GhostVertexCheck(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    vertex: int
    part: str
    degree: int
    initial: Fraction
    final: Fraction
    required: Fraction
    passed: bool


class GhostReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    vertices: List[GhostVertexCheck]
    all_passed: bool
    conserved: bool
    # implied: mad(g[V1]) >= 14/3 follows; vacuous: V1 is empty
    conclusion: str


def _check_ledger(g: Graph, ledger: ChargeLedger) -> None:
    if set(ledger.initial) != set(g.vertices) or set(ledger.final) != set(g.vertices):
        raise DomainError("ledger does not cover exactly the vertices of the graph")
    for v in g.vertices:
        if ledger.initial[v] != g.degree(v) - MAD_THRESHOLD:
            raise DomainError(f"ledger's initial charge at {v} does not match its degree")


def verify_ghost_conditions(g: Graph, ledger: ChargeLedger) -> GhostReport:
    _check_ledger(g, ledger)
    partition = ghost_partition(g)
    checks = []
    for v in g.vertices:
        if v in partition.v1:
            part, required = "V1", Fraction(0)
        else:
            part, required = "V2", g.degree(v) - MAD_THRESHOLD + partition.d_v1[v]
        final = ledger.final[v]
        checks.append(
            GhostVertexCheck(
                vertex=v, part=part, degree=g.degree(v), initial=ledger.initial[v],
                final=final, required=required, passed=final >= required,
            )
        )
    all_passed = all(check.passed for check in checks)
    if not partition.v1:
        conclusion = "vacuous"
    elif all_passed and ledger.conserved:
        conclusion = "implied"
    else:
        conclusion = "not-established"
    return GhostReport(vertices=checks, all_passed=all_passed, conserved=ledger.conserved, conclusion=conclusion)


# ------------------------------------------------------------ case audit

class VertexAudit(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    vertex: int
    degree: int
    case: str
    bound: Fraction
    final: Fraction
    holds: bool
    caps: Dict[str, bool] = {}

    @property
    def ok(self) -> bool:
        return self.holds and all(self.caps.values())


class AuditReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    k: int
    blocked_by: Optional[dict] = None
    vertices: List[VertexAudit] = []

    @property
    def ok(self) -> bool:
        return self.blocked_by is None and all(entry.ok for entry in self.vertices)


def classify_vertex(g: Graph, v: int):
    """(case label, closed-form bound, structural caps) for one vertex"""
    profile = neighbour_degree_counts(g, v)
    d = profile.degree
    n2 = profile.at_most(2)
    n3 = profile.exactly(3)
    n4 = profile.exactly(4)
    base = d - MAD_THRESHOLD

    if d == 0:
        return "isolated", base, {}
    if d == 1:
        return "degree 1", base + R1_AMOUNT, {"neighbour of degree >= 6": profile.at_least(6) == 1}
    if d == 2:
        return "degree 2", base + 2 * R1_AMOUNT, {"neighbours of degree >= 6": profile.at_least(6) == 2}
    if d == 3:
        return "degree 3", base + 3 * R2_AMOUNT, {"neighbours of degree >= 6": profile.at_least(6) == 3}
    if d == 4:
        return "degree 4", base + 4 * R3_AMOUNT, {"neighbours of degree >= 5": profile.at_least(5) == 4}
    if d == 5:
        return "degree 5", base - 2 * R3_AMOUNT, {
            "no 3⁻-neighbour": profile.at_most(3) == 0,
            "at most two 4-neighbours": n4 <= 2,
        }
    if d == 6:
        if profile.at_most(3) > 0:
            return "degree 6, adjacent to a 3⁻-vertex", base - max(R1_AMOUNT, R2_AMOUNT), {
                "five neighbours of degree >= 5": profile.at_least(5) == 5,
            }
        return "degree 6, not adjacent to a 3⁻-vertex", base - 6 * R3_AMOUNT, {}

    caps = {"n_2⁻ <= d-5": n2 <= d - 5}
    if n2 >= d - 5:
        caps["no other 4⁻-neighbour"] = profile.at_most(4) == n2
        return "degree >= 7, n_2⁻ = d-5", base - (d - 5) * R1_AMOUNT, caps
    if n2 == d - 6:
        caps["no 3-neighbour, or one 3-neighbour and no 4-neighbour"] = n3 == 0 or (n3 == 1 and n4 == 0)
        return "degree >= 7, n_2⁻ = d-6", base - (d - 6) * R1_AMOUNT - max(6 * R3_AMOUNT, R2_AMOUNT), caps
    if n2 == d - 7:
        caps["at most three 3-neighbours"] = n3 <= 3
        return "degree >= 7, n_2⁻ = d-7", base - (d - 7) * R1_AMOUNT - 3 * R2_AMOUNT - 4 * R3_AMOUNT, caps
    alpha = d - 8 - n2
    if n4 == 0:
        caps["at most alpha+6 3-neighbours"] = n3 <= alpha + 6
        return f"degree >= 7, n_2⁻ <= d-8, no 4-neighbour (alpha={alpha})", Fraction(4 * alpha, 9), caps
    beta = alpha + 6 - n3
    caps["beta >= 1"] = beta >= 1
    caps["at most beta+2 4-neighbours"] = n4 <= beta + 2
    bound = Fraction(4 * alpha, 9) + Fraction(7 * beta, 18) - Fraction(1, 3)
    return f"degree >= 7, n_2⁻ <= d-8, with a 4-neighbour (alpha={alpha}, beta={beta})", bound, caps


def degree_case_audit(g: Graph, k: int) -> AuditReport:
    """Re-derive every vertex's sub-case and closed-form bound on a configuration-free graph"""
    blocking = find_any_reducible(g, k)
    if blocking is not None:
        return AuditReport(k=k, blocked_by=blocking.to_record())
    ledger = apply_rules(g)
    entries = []
    for v in g.vertices:
        case, bound, caps = classify_vertex(g, v)
        final = ledger.final[v]
        entries.append(
            VertexAudit(
                vertex=v, degree=g.degree(v), case=case, bound=bound,
                final=final, holds=final >= bound, caps=caps,
            )
        )
    return AuditReport(k=k, vertices=entries)
