"""Exact multilinear pseudo-Boolean function algebra.

A pseudo-Boolean function on n Boolean variables has a unique multilinear
polynomial, stored here as a map from variable subsets to rational
coefficients.  All arithmetic uses fractions.Fraction, and zero
coefficients are never stored, so structural equality coincides with
functional equality.

Subsets are bitmasks: bit i-1 of a mask corresponds to variable i
(1-based), so the labeling x1=1, x3=1 is mask 0b101.

A submodular quadratic can be rewritten with non-negative capacities

    cost(x) = c_empty + sum_i src[i]*(1-x_i) + sum_i sink[i]*x_i
                      + sum_(i,j) pair[(i,j)]*x_i*(1-x_j)

which is the capacity of an s-t cut (node on the source side <=> x=1)
plus a signed constant.  The normal form chosen by ``to_capacity_form``
is documented there; its correctness is pinned by round-trip tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

Rational = Fraction

ENUMERATION_CAP = 20


class NotSubmodularQuadratic(ValueError):
    """Raised when a quadratic has a positive bilinear coefficient."""


class PolyParseError(ValueError):
    """Polynomial text that does not follow the term-per-line format."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def rat(value) -> Fraction:
    """Coerce ints, strings like '3/4', and Fractions to Fraction."""
    return value if isinstance(value, Fraction) else Fraction(value)


def mask_of(indices: Iterable[int]) -> int:
    """Bitmask for a collection of 1-based variable indices."""
    m = 0
    for i in indices:
        if i < 1:
            raise ValueError(f"variable index {i} out of range")
        m |= 1 << (i - 1)
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    """1-based variable indices present in a mask, ascending."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class MultilinearPoly:
    """Multilinear polynomial over Boolean variables, exact coefficients.

    ``terms`` maps a subset mask S to the coefficient of prod_{i in S} x_i.
    Absent masks mean coefficient zero; zero coefficients are dropped on
    construction, which makes ``==`` a functional equality test.
    """

    __slots__ = ("n_vars", "terms")

    def __init__(self, n_vars: int, terms: Mapping[int, Fraction] | None = None):
        if n_vars < 0:
            raise ValueError("n_vars must be non-negative")
        full = (1 << n_vars) - 1
        clean: dict[int, Fraction] = {}
        for mask, coeff in (terms or {}).items():
            if mask & ~full:
                raise ValueError(f"term {indices_of(mask)} exceeds {n_vars} variables")
            c = rat(coeff)
            if c != 0:
                clean[mask] = c
        self.n_vars = n_vars
        self.terms = clean

    @classmethod
    def zero(cls, n_vars: int) -> "MultilinearPoly":
        return cls(n_vars, {})

    @classmethod
    def from_terms(cls, n_vars: int, items: Iterable[tuple[Iterable[int], object]]) -> "MultilinearPoly":
        """Build from (indices, coefficient) pairs; duplicate subsets add up."""
        acc: dict[int, Fraction] = {}
        for indices, coeff in items:
            m = mask_of(indices)
            acc[m] = acc.get(m, Fraction(0)) + rat(coeff)
        return cls(n_vars, acc)

    def coefficient(self, indices: Iterable[int]) -> Fraction:
        return self.terms.get(mask_of(indices), Fraction(0))

    @property
    def degree(self) -> int:
        return max((m.bit_count() for m in self.terms), default=0)

    def evaluate(self, x: int) -> Fraction:
        """Value at the labeling given by mask x (terms fully inside x)."""
        if x & ~((1 << self.n_vars) - 1):
            raise ValueError("labeling mask wider than the polynomial")
        total = Fraction(0)
        for mask, coeff in self.terms.items():
            if mask & x == mask:
                total += coeff
        return total

    def evaluate_all(self) -> list[Fraction]:
        """Values on all 2^n labelings via the subset-sum transform."""
        n = self.n_vars
        if n > ENUMERATION_CAP:
            raise ValueError(f"evaluate_all refuses n > {ENUMERATION_CAP}")
        vals = [Fraction(0)] * (1 << n)
        for mask, coeff in self.terms.items():
            vals[mask] += coeff
        for i in range(n):
            bit = 1 << i
            for m in range(1 << n):
                if m & bit:
                    vals[m] += vals[m ^ bit]
        return vals

    @classmethod
    def from_values(cls, n_vars: int, values: list[Fraction]) -> "MultilinearPoly":
        """Interpolate the unique multilinear polynomial from all 2^n values."""
        if len(values) != 1 << n_vars:
            raise ValueError("need one value per labeling")
        coeffs = [rat(v) for v in values]
        for i in range(n_vars):
            bit = 1 << i
            for m in range(1 << n_vars):
                if m & bit:
                    coeffs[m] -= coeffs[m ^ bit]
        return cls(n_vars, {m: c for m, c in enumerate(coeffs) if c != 0})

    def restrict(self, assignment: Mapping[int, int]) -> "MultilinearPoly":
        """Substitute constants for some variables (1-based index -> 0/1).

        The result keeps the same variable numbering; assigned variables
        simply no longer occur.
        """
        ones = 0
        zeros = 0
        for i, v in assignment.items():
            if not 1 <= i <= self.n_vars:
                raise ValueError(f"variable index {i} out of range")
            if v not in (0, 1):
                raise ValueError("assignment values must be 0 or 1")
            if v:
                ones |= 1 << (i - 1)
            else:
                zeros |= 1 << (i - 1)
        acc: dict[int, Fraction] = {}
        for mask, coeff in self.terms.items():
            if mask & zeros:
                continue
            m = mask & ~ones
            acc[m] = acc.get(m, Fraction(0)) + coeff
        return MultilinearPoly(self.n_vars, acc)

    def derivative(self, i: int) -> "MultilinearPoly":
        """Discrete derivative with respect to x_i: f|x_i=1 - f|x_i=0."""
        if not 1 <= i <= self.n_vars:
            raise ValueError(f"variable index {i} out of range")
        bit = 1 << (i - 1)
        acc: dict[int, Fraction] = {}
        for mask, coeff in self.terms.items():
            if mask & bit:
                m = mask ^ bit
                acc[m] = acc.get(m, Fraction(0)) + coeff
        return MultilinearPoly(self.n_vars, acc)

    def second_derivative(self, i: int, j: int, x: int) -> Fraction:
        """Four-point second difference at a labeling of the other variables."""
        if i == j:
            raise ValueError("second derivative needs two distinct variables")
        bi, bj = 1 << (i - 1), 1 << (j - 1)
        base = x & ~(bi | bj)
        return (
            self.evaluate(base | bi | bj)
            - self.evaluate(base | bi)
            - self.evaluate(base | bj)
            + self.evaluate(base)
        )

    def support_vars(self) -> tuple[int, ...]:
        m = 0
        for mask in self.terms:
            m |= mask
        return indices_of(m)

    def map_vars(self, mapping: Mapping[int, int], n_vars: int | None = None) -> "MultilinearPoly":
        """Relabel variables (old 1-based index -> new 1-based index)."""
        n = self.n_vars if n_vars is None else n_vars
        acc: dict[int, Fraction] = {}
        for mask, coeff in self.terms.items():
            new = mask_of(mapping.get(i, i) for i in indices_of(mask))
            acc[new] = acc.get(new, Fraction(0)) + coeff
        return MultilinearPoly(n, acc)

    def with_vars(self, n_vars: int) -> "MultilinearPoly":
        """Same polynomial viewed over a wider (or equal) variable space."""
        if n_vars < self.n_vars and any(m >= 1 << n_vars for m in self.terms):
            raise ValueError("cannot shrink below the support")
        return MultilinearPoly(n_vars, dict(self.terms))

    def substitute_complement(self) -> "MultilinearPoly":
        """The polynomial q with q(x) = p(1-x_1, ..., 1-x_n)."""
        vals = self.evaluate_all()
        full = (1 << self.n_vars) - 1
        return MultilinearPoly.from_values(self.n_vars, [vals[full ^ m] for m in range(len(vals))])

    def scaled(self, c) -> "MultilinearPoly":
        c = rat(c)
        return MultilinearPoly(self.n_vars, {m: c * v for m, v in self.terms.items()})

    def __add__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        n = max(self.n_vars, other.n_vars)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, Fraction(0)) + c
        return MultilinearPoly(n, acc)

    def __sub__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        return self + other.scaled(-1)

    def __neg__(self) -> "MultilinearPoly":
        return self.scaled(-1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultilinearPoly)
            and self.n_vars == other.n_vars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.n_vars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"MultilinearPoly({self.n_vars}, {{{', '.join(f'{indices_of(m)}: {format_rational(c)}' for m, c in sorted(self.terms.items()))}}})"


def is_submodular(f: MultilinearPoly) -> bool:
    """Whether every discrete second derivative is non-positive.

    Degree <= 1 is trivially submodular.  Degree 2 reduces to the signs of
    the bilinear coefficients.  Otherwise the mixed derivative of every
    variable pair is enumerated over the labelings of its support, which
    is refused above ENUMERATION_CAP variables.
    """
    deg = f.degree
    if deg <= 1:
        return True
    if deg == 2:
        return all(c <= 0 for m, c in f.terms.items() if m.bit_count() == 2)
    if f.n_vars > ENUMERATION_CAP:
        raise ValueError(f"submodularity enumeration refuses n > {ENUMERATION_CAP}")
    n = f.n_vars
    for i in range(1, n + 1):
        di = f.derivative(i)
        for j in range(i + 1, n + 1):
            dij = di.derivative(j)
            if not dij.terms:
                continue
            support = dij.support_vars()
            for combo in range(1 << len(support)):
                x = 0
                for pos, var in enumerate(support):
                    if combo >> pos & 1:
                        x |= 1 << (var - 1)
                if dij.evaluate(x) > 0:
                    return False
    return True


def is_submodular_lattice(f: MultilinearPoly) -> bool:
    """Independent oracle: f(X)+f(Y) >= f(X|Y)+f(X&Y) over all pairs.

    Quadratic in 2^n, intended for cross-checking at small n only.
    """
    if f.n_vars > 10:
        raise ValueError("lattice check is quadratic in 2^n; refuses n > 10")
    vals = f.evaluate_all()
    size = len(vals)
    for x in range(size):
        for y in range(x + 1, size):
            if vals[x] + vals[y] < vals[x | y] + vals[x & y]:
                return False
    return True


@dataclass(frozen=True)
class QuadraticPoly:
    """Degree <= 2 polynomial whose variables split into an original block
    x_1..x_{n_x} followed by an auxiliary block z_1..z_{n_z}."""

    poly: MultilinearPoly
    n_x: int
    n_z: int = 0

    def __post_init__(self):
        if self.n_x + self.n_z != self.poly.n_vars:
            raise ValueError("variable blocks must cover the polynomial")
        if self.poly.degree > 2:
            raise ValueError("quadratic polynomial has degree > 2")

    @property
    def n_vars(self) -> int:
        return self.poly.n_vars

    def bilinear_coefficients(self) -> dict[int, Fraction]:
        return {m: c for m, c in self.poly.terms.items() if m.bit_count() == 2}

    def is_submodular(self) -> bool:
        return all(c <= 0 for c in self.bilinear_coefficients().values())

    def evaluate(self, x: int, z: int = 0) -> Fraction:
        return self.poly.evaluate(x | (z << self.n_x))

    def min_over_aux(self, x: int) -> tuple[Fraction, int]:
        """Exhaustive min over the auxiliary block at a fixed x labeling.

        Ties go to the smaller z mask, so the all-zeros assignment wins when
        it is among the minimizers.
        """
        best = None
        best_z = 0
        for z in range(1 << self.n_z):
            v = self.evaluate(x, z)
            if best is None or v < best:
                best, best_z = v, z
        return best, best_z

    def drop_unused_aux(self) -> "QuadraticPoly":
        """Remove auxiliary variables that appear in no term."""
        used = []
        for a in range(1, self.n_z + 1):
            bit = 1 << (self.n_x + a - 1)
            if any(m & bit for m in self.poly.terms):
                used.append(a)
        if len(used) == self.n_z:
            return self
        mapping = {self.n_x + a: self.n_x + pos + 1 for pos, a in enumerate(used)}
        poly = self.poly.map_vars(mapping, self.n_x + len(used))
        return QuadraticPoly(poly, self.n_x, len(used))


@dataclass
class CapacityForm:
    """Quadratic submodular cost as non-negative edge capacities.

    Node indices run 1..n_x+n_z (originals first).  ``src[i]`` charges
    x_i = 0, ``sink[i]`` charges x_i = 1, and ``pairs[(i, j)]`` charges
    x_i = 1, x_j = 0; ``c_empty`` may take either sign.
    """

    n_x: int
    n_z: int = 0
    c_empty: Fraction = Fraction(0)
    src: dict[int, Fraction] = field(default_factory=dict)
    sink: dict[int, Fraction] = field(default_factory=dict)
    pairs: dict[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.c_empty = rat(self.c_empty)
        self.src = {i: rat(v) for i, v in self.src.items() if v != 0}
        self.sink = {i: rat(v) for i, v in self.sink.items() if v != 0}
        self.pairs = {e: rat(v) for e, v in self.pairs.items() if v != 0}
        n = self.n_nodes
        for i, v in list(self.src.items()) + list(self.sink.items()):
            if not 1 <= i <= n:
                raise ValueError(f"node {i} out of range")
            if v < 0:
                raise ValueError("capacities must be non-negative")
        for (i, j), v in self.pairs.items():
            if i == j or not 1 <= i <= n or not 1 <= j <= n:
                raise ValueError(f"bad edge ({i}, {j})")
            if v < 0:
                raise ValueError("capacities must be non-negative")

    @property
    def n_nodes(self) -> int:
        return self.n_x + self.n_z

    def value(self, mask: int) -> Fraction:
        total = self.c_empty
        for i, v in self.src.items():
            if not mask >> (i - 1) & 1:
                total += v
        for i, v in self.sink.items():
            if mask >> (i - 1) & 1:
                total += v
        for (i, j), v in self.pairs.items():
            if mask >> (i - 1) & 1 and not mask >> (j - 1) & 1:
                total += v
        return total


def to_capacity_form(h: QuadraticPoly) -> CapacityForm:
    """Rewrite a submodular quadratic as non-negative capacities.

    Normal form: each bilinear term a*x_i*x_j (a <= 0, i < j) becomes the
    pair capacity -a on the edge (j -> i) plus the linear correction a*x_j;
    a resulting linear coefficient v goes to sink[i] when v >= 0, and
    otherwise contributes -v to src[i] and v to the constant.
    """
    linear: dict[int, Fraction] = {}
    pairs: dict[tuple[int, int], Fraction] = {}
    c_empty = Fraction(0)
    for mask, coeff in sorted(h.poly.terms.items()):
        k = mask.bit_count()
        if k == 0:
            c_empty += coeff
        elif k == 1:
            (i,) = indices_of(mask)
            linear[i] = linear.get(i, Fraction(0)) + coeff
        else:
            if coeff > 0:
                raise NotSubmodularQuadratic(
                    f"bilinear coefficient {format_rational(coeff)} on {indices_of(mask)} is positive"
                )
            lo, hi = indices_of(mask)
            pairs[(hi, lo)] = pairs.get((hi, lo), Fraction(0)) - coeff
            linear[hi] = linear.get(hi, Fraction(0)) + coeff
    src: dict[int, Fraction] = {}
    sink: dict[int, Fraction] = {}
    for i, v in sorted(linear.items()):
        if v >= 0:
            sink[i] = v
        else:
            src[i] = -v
            c_empty += v
    return CapacityForm(h.n_x, h.n_z, c_empty, src, sink, pairs)


def from_capacity_form(c: CapacityForm) -> QuadraticPoly:
    """Expand capacities back into a quadratic polynomial (exact inverse
    on values; composition with to_capacity_form is pointwise identity)."""
    acc: dict[int, Fraction] = {0: c.c_empty}
    for i, v in c.src.items():
        acc[0] = acc.get(0, Fraction(0)) + v
        m = 1 << (i - 1)
        acc[m] = acc.get(m, Fraction(0)) - v
    for i, v in c.sink.items():
        m = 1 << (i - 1)
        acc[m] = acc.get(m, Fraction(0)) + v
    for (i, j), v in c.pairs.items():
        mi, mj = 1 << (i - 1), 1 << (j - 1)
        acc[mi] = acc.get(mi, Fraction(0)) + v
        acc[mi | mj] = acc.get(mi | mj, Fraction(0)) - v
    return QuadraticPoly(MultilinearPoly(c.n_nodes, acc), c.n_x, c.n_z)


def parse_polynomial(text: str, n_vars: int | None = None) -> MultilinearPoly:
    """Parse the term-per-line format: ``<rational> [: i j k ...]``.

    '#' starts a comment, blank lines are skipped, duplicate subsets are
    summed, and term order is irrelevant.  When n_vars is omitted it is
    inferred from the largest index mentioned.
    """
    acc: dict[int, Fraction] = {}
    max_index = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, tail = line.partition(":")
        head = head.strip()
        try:
            coeff = Fraction(head)
        except (ValueError, ZeroDivisionError):
            raise PolyParseError(f"bad rational {head!r}", lineno, raw.index(head) + 1 if head else 1)
        indices = []
        for tok in tail.split():
            try:
                i = int(tok)
            except ValueError:
                raise PolyParseError(f"bad variable index {tok!r}", lineno, raw.index(tok) + 1)
            if i < 1:
                raise PolyParseError(f"variable index {i} must be >= 1", lineno, raw.index(tok) + 1)
            indices.append(i)
        if len(set(indices)) != len(indices):
            raise PolyParseError("repeated variable in one term", lineno)
        m = mask_of(indices)
        acc[m] = acc.get(m, Fraction(0)) + coeff
        max_index = max(max_index, *indices, 0) if indices else max_index
    n = max_index if n_vars is None else n_vars
    if n < max_index:
        raise PolyParseError(f"index {max_index} exceeds declared {n} variables", 1)
    return MultilinearPoly(n, acc)


def format_polynomial(p: MultilinearPoly) -> str:
    """Serialize in the term-per-line format, constant term first."""
    lines = []
    for mask in sorted(p.terms, key=lambda m: (m.bit_count(), indices_of(m))):
        coeff = format_rational(p.terms[mask])
        if mask == 0:
            lines.append(coeff)
        else:
            lines.append(f"{coeff} : {' '.join(map(str, indices_of(mask)))}")
    if not lines:
        lines.append("0")
    return "\n".join(lines) + "\n"
