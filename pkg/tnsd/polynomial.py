"""
Exact sparse multivariate polynomials over the integers, products of linear
forms, and Combinatorial Nullstellensatz certificates
"""
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from tnsd.errors import DomainError, InternalInconsistencyError

Monomial = Tuple[int, ...]


class LinearForm(BaseModel):
    """c_0 x_0 + ... + c_{n-1} x_{n-1} + constant"""

    model_config = ConfigDict(frozen=True)

    coefficients: Tuple[int, ...]
    constant: int = 0

    @classmethod
    def of(cls, variable_count: int, terms: Dict[int, int], constant: int = 0) -> "LinearForm":
        coefficients = [0] * variable_count
        for index, value in terms.items():
            coefficients[index] += value
        return cls(coefficients=tuple(coefficients), constant=constant)

    @property
    def variable_count(self) -> int:
        return len(self.coefficients)

    @property
    def degree(self) -> int:
        return 1 if any(self.coefficients) else 0

    @property
    def last_variable(self) -> int:
        """Highest variable index with a non-zero coefficient, -1 for constants"""
        for index in range(len(self.coefficients) - 1, -1, -1):
            if self.coefficients[index]:
                return index
        return -1

    def evaluate(self, point: Sequence[int]) -> int:
        return self.constant + sum(c * x for c, x in zip(self.coefficients, point) if c)

    def shifted(self, constant: int) -> "LinearForm":
        return LinearForm(coefficients=self.coefficients, constant=constant)

    def __str__(self) -> str:
        parts = []
        for index, c in enumerate(self.coefficients):
            if c:
                sign = "-" if c < 0 else "+"
                magnitude = "" if abs(c) == 1 else str(abs(c))
                parts.append(f"{sign} {magnitude}x{index}")
        if self.constant or not parts:
            parts.append(f"{'-' if self.constant < 0 else '+'} {abs(self.constant)}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


Factor = Tuple[LinearForm, int]


class SparsePolynomial:
    """Integer polynomial stored as {exponent tuple: non-zero coefficient}"""

    __slots__ = ("variable_count", "terms")

    def __init__(self, variable_count: int, terms: Optional[Dict[Monomial, int]] = None):
        self.variable_count = variable_count
        self.terms: Dict[Monomial, int] = {}
        for monomial, value in (terms or {}).items():
            if len(monomial) != variable_count:
                raise DomainError(f"monomial {monomial} does not have {variable_count} exponents")
            if value:
                self.terms[tuple(monomial)] = value

    @classmethod
    def constant(cls, variable_count: int, value: int) -> "SparsePolynomial":
        return cls(variable_count, {(0,) * variable_count: value})

    @classmethod
    def from_linear(cls, form: LinearForm) -> "SparsePolynomial":
        n = form.variable_count
        terms = {(0,) * n: form.constant}
        for index, c in enumerate(form.coefficients):
            if c:
                terms[tuple(1 if j == index else 0 for j in range(n))] = c
        return cls(n, terms)

    def _check_arity(self, other: "SparsePolynomial") -> None:
        if other.variable_count != self.variable_count:
            raise DomainError(f"arity mismatch: {self.variable_count} vs {other.variable_count} variables")

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        self._check_arity(other)
        terms = dict(self.terms)
        for monomial, value in other.terms.items():
            terms[monomial] = terms.get(monomial, 0) + value
        return SparsePolynomial(self.variable_count, terms)

    def __neg__(self) -> "SparsePolynomial":
        return SparsePolynomial(self.variable_count, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        return self + (-other)

    def __mul__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        self._check_arity(other)
        terms: Dict[Monomial, int] = defaultdict(int)
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                terms[tuple(a + b for a, b in zip(m1, m2))] += c1 * c2
        return SparsePolynomial(self.variable_count, terms)

    def multiply_linear(self, form: LinearForm, bound: Optional[Monomial] = None) -> "SparsePolynomial":
        """self * form, dropping terms with an exponent above `bound`"""
        if form.variable_count != self.variable_count:
            raise DomainError(f"arity mismatch: {self.variable_count} vs {form.variable_count} variables")
        terms: Dict[Monomial, int] = defaultdict(int)
        linear = [(i, c) for i, c in enumerate(form.coefficients) if c]
        for monomial, value in self.terms.items():
            if form.constant:
                terms[monomial] += value * form.constant
            for index, c in linear:
                if bound is not None and monomial[index] >= bound[index]:
                    continue
                raised = monomial[:index] + (monomial[index] + 1,) + monomial[index + 1:]
                terms[raised] += value * c
        return SparsePolynomial(self.variable_count, terms)

    def coefficient(self, monomial: Monomial) -> int:
        if len(monomial) != self.variable_count:
            raise DomainError(f"monomial {tuple(monomial)} does not have {self.variable_count} exponents")
        return self.terms.get(tuple(monomial), 0)

    @property
    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def evaluate(self, point: Sequence[int]) -> int:
        if len(point) != self.variable_count:
            raise DomainError(f"point has {len(point)} coordinates, expected {self.variable_count}")
        total = 0
        for monomial, value in self.terms.items():
            term = value
            for x, e in zip(point, monomial):
                if e:
                    term *= x ** e
            total += term
        return total

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparsePolynomial)
            and self.variable_count == other.variable_count
            and self.terms == other.terms
        )

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"SparsePolynomial({self.variable_count}, {len(self.terms)} terms)"


def _arity(factors: Sequence[Factor]) -> int:
    if not factors:
        raise DomainError("a product needs at least one factor")
    arities = {form.variable_count for form, _ in factors}
    if len(arities) != 1:
        raise DomainError(f"factors disagree on the variable count: {sorted(arities)}")
    for form, multiplicity in factors:
        if multiplicity < 0:
            raise DomainError(f"negative multiplicity {multiplicity} on {form}")
    return arities.pop()


def product_degree(factors: Sequence[Factor]) -> int:
    return sum(form.degree * multiplicity for form, multiplicity in factors)


def expand_product(factors: Sequence[Factor], bound: Optional[Monomial] = None) -> SparsePolynomial:
    """The product of the factors, optionally truncated to exponents <= bound"""
    n = _arity(factors)
    if bound is not None and len(bound) != n:
        raise DomainError(f"bound {tuple(bound)} does not have {n} exponents")
    result = SparsePolynomial.constant(n, 1)
    for form, multiplicity in factors:
        for _ in range(multiplicity):
            result = result.multiply_linear(form, bound)
    return result


def coefficient(p: SparsePolynomial, m: Monomial) -> int:
    return p.coefficient(m)


def coefficient_of_product(factors: Sequence[Factor], target: Monomial) -> int:
    """Coefficient of `target` in the product, without the full expansion.

    Terms with an exponent above the target's are dropped, and so are terms
    whose degree can no longer reach the target's total degree.
    """
    n = _arity(factors)
    if len(target) != n:
        raise DomainError(f"target {tuple(target)} does not have {n} exponents")
    goal = sum(target)
    remaining = product_degree(factors)
    if remaining < goal:
        return 0
    result = SparsePolynomial.constant(n, 1)
    for form, multiplicity in factors:
        for _ in range(multiplicity):
            result = result.multiply_linear(form, tuple(target))
            remaining -= form.degree
            result.terms = {m: c for m, c in result.terms.items() if sum(m) + remaining >= goal}
    return result.coefficient(tuple(target))


def evaluate_factors(factors: Sequence[Factor], point: Sequence[int]) -> int:
    value = 1
    for form, multiplicity in factors:
        value *= form.evaluate(point) ** multiplicity
    return value


def parse_factors(text: str) -> List[Factor]:
    """One factor per line: `c_0 ... c_{n-1} constant ^ multiplicity` (`^ m` optional)"""
    factors: List[Factor] = []
    width = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        body, _, power = line.partition("^")
        try:
            numbers = [int(token) for token in body.split()]
            multiplicity = int(power) if power.strip() else 1
        except ValueError:
            raise DomainError(f"line {number}: expected integers, got {raw.strip()!r}")
        if len(numbers) < 2:
            raise DomainError(f"line {number}: need at least one coefficient and a constant")
        if width is None:
            width = len(numbers)
        elif len(numbers) != width:
            raise DomainError(f"line {number}: {len(numbers)} numbers, previous lines had {width}")
        factors.append((LinearForm(coefficients=tuple(numbers[:-1]), constant=numbers[-1]), multiplicity))
    if not factors:
        raise DomainError("no factors given")
    return factors


def format_factors(factors: Sequence[Factor]) -> str:
    return "\n".join(
        " ".join(str(c) for c in form.coefficients + (form.constant,)) + f" ^ {multiplicity}"
        for form, multiplicity in factors
    )


# ------------------------------------------------------------ certificates

class CnCertificate(BaseModel):
    """A product of linear forms whose `target` coefficient is claimed to be `expected_coefficient`"""

    model_config = ConfigDict(frozen=True)

    name: str
    factors: Tuple[Tuple[LinearForm, int], ...]
    target: Tuple[int, ...]
    expected_coefficient: int
    # printed names of the variables, x0.. unless given
    labels: Tuple[str, ...] = ()

    @property
    def variable_count(self) -> int:
        return len(self.target)

    @property
    def degree(self) -> int:
        return product_degree(self.factors)

    @property
    def degree_matches(self) -> bool:
        return self.degree == sum(self.target)

    def monomial_text(self) -> str:
        labels = self.labels or tuple(f"x{i}" for i in range(len(self.target)))
        return "".join(
            label if e == 1 else f"{label}^{e}" for label, e in zip(labels, self.target) if e
        )


class CertificateCheck(BaseModel):
    name: str
    computed: int
    expected: int
    ok: bool
    degree: int
    monomial: str


def check_certificate(c: CnCertificate) -> CertificateCheck:
    if not c.degree_matches:
        raise DomainError(
            f"certificate {c.name}: product degree {c.degree} differs from target degree {sum(c.target)}"
        )
    computed = coefficient_of_product(c.factors, c.target)
    return CertificateCheck(
        name=c.name,
        computed=computed,
        expected=c.expected_coefficient,
        ok=computed == c.expected_coefficient,
        degree=c.degree,
        monomial=c.monomial_text(),
    )


def verify_certificate(c: CnCertificate) -> bool:
    return check_certificate(c).ok


def cn_nonzero_substitution(
    factors: Sequence[Factor],
    target: Monomial,
    lists: Sequence[Iterable[int]],
    coefficient: Optional[int] = None,
) -> Tuple[int, ...]:
    """Values s_i in lists[i] with a non-zero product.

    Variables are assigned in index order with ascending values; a factor is
    evaluated as soon as its last variable is fixed. `coefficient` skips the
    recomputation of the target coefficient when the caller already knows it.
    """
    n = _arity(factors)
    if len(target) != n or len(lists) != n:
        raise DomainError(f"need {n} target exponents and {n} lists")
    values = [sorted(set(items)) for items in lists]
    for i, (items, exponent) in enumerate(zip(values, target)):
        if len(items) <= exponent:
            raise DomainError(f"list {i} has {len(items)} values, needs more than {exponent}")
    if product_degree(factors) != sum(target):
        raise DomainError(f"product degree {product_degree(factors)} differs from target degree {sum(target)}")
    if coefficient is None:
        coefficient = coefficient_of_product(factors, target)
    if coefficient == 0:
        raise DomainError(f"target coefficient of {tuple(target)} is zero")

    due: List[List[Tuple[LinearForm, int]]] = [[] for _ in range(n)]
    for form, multiplicity in factors:
        if multiplicity == 0:
            continue
        last = form.last_variable
        if last < 0:
            if form.constant == 0:
                raise InternalInconsistencyError("a zero constant factor has a non-zero coefficient", {})
            continue
        due[last].append((form, multiplicity))

    point = [0] * n

    def walk(i: int) -> bool:
        if i == n:
            return True
        for x in values[i]:
            point[i] = x
            if all(form.evaluate(point) != 0 for form, _ in due[i]) and walk(i + 1):
                return True
        point[i] = 0
        return False

    if not walk(0):
        raise InternalInconsistencyError(
            "no non-vanishing substitution although the target coefficient is non-zero",
            {
                "factors": format_factors(factors),
                "target": list(target),
                "lists": [list(items) for items in values],
                "coefficient": coefficient,
            },
        )
    return tuple(point)
