"""
The six coefficient certificates and the per-case factor systems built from
live partial sums
"""
import random
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from tnsd.errors import DomainError, InternalInconsistencyError
from tnsd.polynomial import (
    CnCertificate,
    Factor,
    LinearForm,
    check_certificate,
    coefficient_of_product,
)

EDGE_LOW = "case2;3-h1"
EDGE_MIXED = "case2;3-h2"
FIVE_VERTEX = "case4-g"
SIX_VERTEX = "case5-h"
SEVEN_VERTEX = "case6-h"
LARGE_VERTEX = "case7-h"


def _form(n: int, terms: Dict[int, int], constant: int = 0) -> LinearForm:
    return LinearForm.of(n, terms, constant)


def _diff(n: int, i: int, j: int) -> Factor:
    return (_form(n, {i: 1, j: -1}), 1)


def _sum_of(n: int, indices: Sequence[int], constant: int = 0, power: int = 1) -> Factor:
    return (_form(n, {i: 1 for i in indices}, constant), power)


def _edge_pair_h(q_power: int, p_power: int) -> List[Factor]:
    return [
        _diff(3, 0, 1),
        (_form(3, {0: 1, 2: -1}), 2),
        _diff(3, 1, 2),
        _sum_of(3, (0, 1), power=q_power),
        _sum_of(3, (2, 1), power=p_power),
    ]


def builtin_certificates() -> List[CnCertificate]:
    """The six certificates behind extension cases 2 to 7"""
    case4 = [
        _diff(7, 0, 1), _diff(7, 0, 2), _diff(7, 0, 3), _diff(7, 0, 4), _diff(7, 0, 5), _diff(7, 0, 6),
        _diff(7, 1, 2), _diff(7, 1, 3), _diff(7, 2, 3),
        _diff(7, 1, 4), _diff(7, 2, 5), _diff(7, 3, 6),
        (_form(7, {0: 1, 2: 1, 3: 1, 4: -1}), 1),
        (_form(7, {0: 1, 1: 1, 3: 1, 5: -1}), 1),
        (_form(7, {0: 1, 1: 1, 2: 1, 6: -1}), 1),
        _sum_of(7, (0, 1, 2, 3), power=2),
        _sum_of(7, (1, 4), power=3),
        _sum_of(7, (2, 5), power=3),
        _sum_of(7, (3, 6), power=3),
    ]
    case5 = [
        _diff(5, 0, 1), _diff(5, 0, 2), _diff(5, 0, 3), _diff(5, 0, 4),
        _diff(5, 1, 2), _diff(5, 1, 3), _diff(5, 2, 4),
        (_form(5, {0: 1, 2: 1, 3: -1}), 1),
        (_form(5, {0: 1, 1: 1, 4: -1}), 1),
        _sum_of(5, (0, 1, 2), power=4),
        _sum_of(5, (1, 3), power=2),
        _sum_of(5, (2, 4), power=3),
    ]
    # variables x1..x4 are stored at indices 0..3
    case6 = [
        _diff(4, 0, 1), _diff(4, 0, 2), _diff(4, 1, 2), _diff(4, 2, 3),
        _sum_of(4, (0, 1, 2), power=4),
        (_form(4, {0: 1, 1: 1, 3: -1}), 1),
        _sum_of(4, (2, 3), power=3),
    ]
    case7 = [
        _diff(6, 0, 1), _diff(6, 0, 2), _diff(6, 0, 3), _diff(6, 0, 4), _diff(6, 0, 5),
        _diff(6, 1, 2), _diff(6, 1, 3), _diff(6, 1, 4),
        _diff(6, 2, 3), _diff(6, 2, 4), _diff(6, 3, 4), _diff(6, 4, 5),
        _sum_of(6, (0, 1, 2, 3, 4), power=4),
        (_form(6, {0: 1, 1: 1, 2: 1, 3: 1, 5: -1}), 1),
        _sum_of(6, (4, 5), power=3),
    ]
    return [
        CnCertificate(name=EDGE_LOW, factors=tuple(_edge_pair_h(3, 3)), target=(4, 3, 3), expected_coefficient=2),
        CnCertificate(name=EDGE_MIXED, factors=tuple(_edge_pair_h(4, 2)), target=(2, 3, 5), expected_coefficient=2),
        CnCertificate(name=FIVE_VERTEX, factors=tuple(case4), target=(6, 5, 1, 5, 2, 3, 4), expected_coefficient=16),
        CnCertificate(name=SIX_VERTEX, factors=tuple(case5), target=(2, 4, 3, 5, 4), expected_coefficient=-10),
        CnCertificate(
            name=SEVEN_VERTEX,
            factors=tuple(case6),
            target=(4, 3, 2, 3),
            expected_coefficient=-6,
            labels=("x1", "x2", "x3", "x4"),
        ),
        CnCertificate(name=LARGE_VERTEX, factors=tuple(case7), target=(1, 5, 4, 3, 3, 4), expected_coefficient=5),
    ]


def certificate(name: str) -> CnCertificate:
    for cert in builtin_certificates():
        if cert.name == name:
            return cert
    raise DomainError(f"unknown certificate {name!r}")


@lru_cache(maxsize=None)
def verified_coefficient(name: str) -> int:
    """Coefficient of a builtin certificate, computed once per process"""
    check = check_certificate(certificate(name))
    if not check.ok:
        raise InternalInconsistencyError(
            f"certificate {name} computes {check.computed}, expected {check.expected}",
            check.model_dump(),
        )
    return check.computed


# ------------------------------------------------------------ case systems

class CnSystem(BaseModel):
    """A case polynomial (with padding) instantiated on concrete partial sums"""

    model_config = ConfigDict(frozen=True)

    name: str
    factors: Tuple[Tuple[LinearForm, int], ...]
    target: Tuple[int, ...]


def _pad(power: int, what: str) -> int:
    if power < 0:
        raise DomainError(f"too many {what} for this case")
    return power


def edge_pair_system(
    u_edge_sum: int,
    v_edge_sum: int,
    u_neighbour_sums: Sequence[int],
    v_neighbour_sums: Sequence[int],
    mixed: bool = False,
) -> CnSystem:
    """Edge uv with u, v and uv uncoloured; variables (u, uv, v).

    `u_edge_sum` is the colour total on u's other edges, `u_neighbour_sums`
    the sums at u's other neighbours, and likewise for v.
    """
    a, b = u_edge_sum, v_edge_sum
    q, p = len(u_neighbour_sums), len(v_neighbour_sums)
    factors: List[Factor] = [
        _diff(3, 0, 1),
        _diff(3, 0, 2),
        _diff(3, 1, 2),
        (_form(3, {0: 1, 2: -1}, a - b), 1),
    ]
    factors += [(_form(3, {0: 1, 1: 1}, a - s), 1) for s in u_neighbour_sums]
    factors += [(_form(3, {2: 1, 1: 1}, b - s), 1) for s in v_neighbour_sums]
    if mixed:
        factors += [_sum_of(3, (0, 1), power=_pad(4 - q, "neighbours at u")),
                    _sum_of(3, (2, 1), power=_pad(2 - p, "neighbours at v"))]
        return CnSystem(name=EDGE_MIXED, factors=tuple(factors), target=certificate(EDGE_MIXED).target)
    factors += [_sum_of(3, (0, 1), power=_pad(3 - q, "neighbours at u")),
                _sum_of(3, (2, 1), power=_pad(3 - p, "neighbours at v"))]
    return CnSystem(name=EDGE_LOW, factors=tuple(factors), target=certificate(EDGE_LOW).target)


def five_vertex_system(
    v_sum: int,
    spoke_sums: Sequence[int],
    other_sums: Sequence[int],
    spoke_neighbour_sums: Sequence[Sequence[int]],
) -> CnSystem:
    """5-vertex v with three 4-neighbours v1..v3 restored.

    Variables (v, vv1, vv2, vv3, v1, v2, v3). `spoke_sums` are the partial sums
    at v1..v3, `other_sums` the sums at v's two remaining neighbours and
    `spoke_neighbour_sums[i]` the sums at v_{i+1}'s neighbours other than v.
    """
    if len(spoke_sums) != 3 or len(spoke_neighbour_sums) != 3:
        raise DomainError("the five-vertex case restores exactly three spokes")
    n = 7
    factors: List[Factor] = [_diff(n, 0, j) for j in range(1, 7)]
    factors += [_diff(n, 1, 2), _diff(n, 1, 3), _diff(n, 2, 3)]
    factors += [_diff(n, i, i + 3) for i in (1, 2, 3)]
    for i in (1, 2, 3):
        terms = {0: 1, 1: 1, 2: 1, 3: 1}
        terms[i] = 0
        terms[i + 3] = -1
        factors.append((_form(n, terms, v_sum - spoke_sums[i - 1]), 1))
    factors += [(_form(n, {0: 1, 1: 1, 2: 1, 3: 1}, v_sum - s), 1) for s in other_sums]
    for i in (1, 2, 3):
        around = spoke_neighbour_sums[i - 1]
        factors += [(_form(n, {i: 1, i + 3: 1}, spoke_sums[i - 1] - s), 1) for s in around]
        factors.append(_sum_of(n, (i, i + 3), power=_pad(3 - len(around), "neighbours at a spoke")))
    factors.append(_sum_of(n, (0, 1, 2, 3), power=_pad(2 - len(other_sums), "remaining neighbours at v")))
    return CnSystem(name=FIVE_VERTEX, factors=tuple(factors), target=certificate(FIVE_VERTEX).target)


def six_vertex_system(
    v_sum: int,
    u_sum: int,
    w_sum: int,
    other_sums: Sequence[int],
    u_neighbour_sums: Sequence[int],
    w_neighbour_sums: Sequence[int],
) -> CnSystem:
    """6-vertex v with a 3⁻-neighbour u and a 4⁻-neighbour w; variables (v, vu, vw, u, w)"""
    n = 5
    factors: List[Factor] = [
        _diff(n, 0, 1), _diff(n, 0, 2), _diff(n, 0, 3), _diff(n, 0, 4),
        _diff(n, 1, 2), _diff(n, 1, 3), _diff(n, 2, 4),
        (_form(n, {0: 1, 2: 1, 3: -1}, v_sum - u_sum), 1),
        (_form(n, {0: 1, 1: 1, 4: -1}, v_sum - w_sum), 1),
    ]
    factors += [(_form(n, {0: 1, 1: 1, 2: 1}, v_sum - s), 1) for s in other_sums]
    factors += [(_form(n, {1: 1, 3: 1}, u_sum - s), 1) for s in u_neighbour_sums]
    factors += [(_form(n, {2: 1, 4: 1}, w_sum - s), 1) for s in w_neighbour_sums]
    factors += [
        _sum_of(n, (0, 1, 2), power=_pad(4 - len(other_sums), "remaining neighbours at v")),
        _sum_of(n, (1, 3), power=_pad(2 - len(u_neighbour_sums), "neighbours at u")),
        _sum_of(n, (2, 4), power=_pad(3 - len(w_neighbour_sums), "neighbours at w")),
    ]
    return CnSystem(name=SIX_VERTEX, factors=tuple(factors), target=certificate(SIX_VERTEX).target)


def seven_vertex_system(
    v_sum: int,
    y_sum: int,
    other_sums: Sequence[int],
    y_neighbour_sums: Sequence[int],
) -> CnSystem:
    """7-vertex v keeping its colour; variables (vu, vw, vy, y)"""
    n = 4
    factors: List[Factor] = [_diff(n, 0, 1), _diff(n, 0, 2), _diff(n, 1, 2), _diff(n, 2, 3)]
    factors += [(_form(n, {0: 1, 1: 1, 2: 1}, v_sum - s), 1) for s in other_sums]
    factors.append((_form(n, {0: 1, 1: 1, 3: -1}, v_sum - y_sum), 1))
    factors += [(_form(n, {2: 1, 3: 1}, y_sum - s), 1) for s in y_neighbour_sums]
    factors += [
        _sum_of(n, (0, 1, 2), power=_pad(4 - len(other_sums), "remaining neighbours at v")),
        _sum_of(n, (2, 3), power=_pad(3 - len(y_neighbour_sums), "neighbours at y")),
    ]
    return CnSystem(name=SEVEN_VERTEX, factors=tuple(factors), target=certificate(SEVEN_VERTEX).target)


def large_vertex_system(
    v_sum: int,
    w_sum: int,
    other_sums: Sequence[int],
    w_neighbour_sums: Sequence[int],
) -> CnSystem:
    """Vertex of degree >= 8; variables (v, vv1, vu1, vu2, vw, w)"""
    n = 6
    factors: List[Factor] = [_diff(n, 0, j) for j in range(1, 6)]
    factors += [_diff(n, 1, 2), _diff(n, 1, 3), _diff(n, 1, 4)]
    factors += [_diff(n, 2, 3), _diff(n, 2, 4), _diff(n, 3, 4), _diff(n, 4, 5)]
    factors += [(_form(n, {0: 1, 1: 1, 2: 1, 3: 1, 4: 1}, v_sum - s), 1) for s in other_sums]
    factors.append((_form(n, {0: 1, 1: 1, 2: 1, 3: 1, 5: -1}, v_sum - w_sum), 1))
    factors += [(_form(n, {4: 1, 5: 1}, w_sum - s), 1) for s in w_neighbour_sums]
    factors += [
        _sum_of(n, (0, 1, 2, 3, 4), power=_pad(4 - len(other_sums), "remaining neighbours at v")),
        _sum_of(n, (4, 5), power=_pad(3 - len(w_neighbour_sums), "neighbours at w")),
    ]
    return CnSystem(name=LARGE_VERTEX, factors=tuple(factors), target=certificate(LARGE_VERTEX).target)


# ------------------------------------------------------------ spot checks

class SpotCheck(BaseModel):
    name: str
    seed: int
    computed: int
    expected: int
    ok: bool
    shape: Dict[str, int]


def _sums(rng: random.Random, count: int) -> List[int]:
    return [rng.randint(1, 60) for _ in range(count)]


def random_system(name: str, rng: random.Random) -> Tuple[CnSystem, Dict[str, int]]:
    """The case system on random partial sums and a random admissible shape"""
    if name in (EDGE_LOW, EDGE_MIXED):
        mixed = name == EDGE_MIXED
        q = rng.randint(0, 4 if mixed else 3)
        p = rng.randint(0, 2 if mixed else 3)
        system = edge_pair_system(rng.randint(0, 30), rng.randint(0, 30), _sums(rng, q), _sums(rng, p), mixed)
        return system, {"q": q, "p": p}
    if name == FIVE_VERTEX:
        spokes = _sums(rng, 3)
        system = five_vertex_system(rng.randint(0, 30), spokes, _sums(rng, 2), [_sums(rng, 3) for _ in range(3)])
        return system, {"spokes": 3}
    if name == SIX_VERTEX:
        du, dw = rng.randint(1, 3), rng.randint(1, 4)
        system = six_vertex_system(
            rng.randint(0, 30), rng.randint(0, 30), rng.randint(0, 30), _sums(rng, 4),
            _sums(rng, du - 1), _sums(rng, dw - 1),
        )
        return system, {"d_u": du, "d_w": dw}
    if name == SEVEN_VERTEX:
        dy = rng.randint(1, 4)
        system = seven_vertex_system(rng.randint(0, 40), rng.randint(0, 30), _sums(rng, 4), _sums(rng, dy - 1))
        return system, {"d_y": dy}
    if name == LARGE_VERTEX:
        dw = rng.randint(1, 4)
        system = large_vertex_system(rng.randint(0, 40), rng.randint(0, 30), _sums(rng, 4), _sums(rng, dw - 1))
        return system, {"d_w": dw}
    raise DomainError(f"unknown certificate {name!r}")


def spot_check(name: str, seed: int) -> SpotCheck:
    """Compare the target coefficient of an instantiated case system with the certificate's"""
    rng = random.Random(f"{name}:{seed}")
    system, shape = random_system(name, rng)
    computed = coefficient_of_product(system.factors, system.target)
    expected = certificate(name).expected_coefficient
    return SpotCheck(name=name, seed=seed, computed=computed, expected=expected, ok=computed == expected, shape=shape)


def spot_checks(count: int, seed: int = 0, names: Optional[Sequence[str]] = None) -> List[SpotCheck]:
    names = list(names or [cert.name for cert in builtin_certificates()])
    return [spot_check(name, seed + i) for name in names for i in range(count)]
