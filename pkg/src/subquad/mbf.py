"""Monotone Boolean functions, power-set partitions, and auxiliary-variable
parameter vectors.

An auxiliary variable z with non-negative couplings enters a quadratic as
kappa(x) * z where kappa(x) = g - sum_i w_i x_i.  Its optimal state per
labeling S is 1 exactly when kappa(S) < 0 (a tie at zero resolves to 0),
so each parameter vector induces an upward-closed family of labelings on
which the variable switches on.  Monotone Boolean functions are the same
objects seen as truth tables; their count per arity is the Dedekind number.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .pbf import QuadraticPoly, rat

DEDEKIND = {0: 2, 1: 3, 2: 6, 3: 20, 4: 168, 5: 7581}

MBF_ENUMERATION_CAP = 5


@dataclass(frozen=True)
class MbfTable:
    """Truth table of a Boolean function of k variables.

    ``bits`` packs the table: bit at position ``mask`` holds the value on
    the labeling ``mask`` (mask bit i-1 <=> variable i is 1).
    """

    k: int
    bits: int

    def __post_init__(self):
        if self.bits >> (1 << self.k):
            raise ValueError("table wider than 2^k bits")

    def value(self, mask: int) -> int:
        return self.bits >> mask & 1

    def as_bitstring(self) -> str:
        return "".join(str(self.value(m)) for m in range(1 << self.k))

    @classmethod
    def from_function(cls, k: int, fn) -> "MbfTable":
        bits = 0
        for mask in range(1 << k):
            if fn(mask):
                bits |= 1 << mask
        return cls(k, bits)

    @classmethod
    def threshold(cls, k: int, r: int) -> "MbfTable":
        """The symmetric table 1 <=> |S| >= r."""
        return cls.from_function(k, lambda m: m.bit_count() >= r)


def is_monotone(t: MbfTable) -> bool:
    """True when no single-bit increase of the input decreases the output."""
    for mask in range(1 << t.k):
        for i in range(t.k):
            bit = 1 << i
            if not mask & bit and t.value(mask) > t.value(mask | bit):
                return False
    return True


def enumerate_mbfs(k: int) -> list[MbfTable]:
    """All monotone tables on k variables, in ascending bits order.

    Depth-first assignment in popcount order: the value on a labeling is
    forced to 1 as soon as any immediate predecessor carries 1, so the
    search tree has no dead branches and runs in output-linear time.
    """
    if k > MBF_ENUMERATION_CAP:
        raise ValueError(f"enumeration capped at k <= {MBF_ENUMERATION_CAP}")
    order = sorted(range(1 << k), key=lambda m: (m.bit_count(), m))
    results: list[int] = []

    def extend(pos: int, bits: int):
        if pos == len(order):
            results.append(bits)
            return
        mask = order[pos]
        forced = any(bits >> (mask ^ (1 << i)) & 1 for i in range(k) if mask >> i & 1)
        if not forced:
            extend(pos + 1, bits)
        extend(pos + 1, bits | (1 << mask))

    extend(0, 0)
    return [MbfTable(k, b) for b in sorted(results)]


def prune_mbf_set(tables: list[MbfTable]) -> list[MbfTable]:
    """Drop the two constants and the per-variable projections.

    Those auxiliary variables never help: a constant is a fixed offset and
    a projection duplicates an original variable.
    """
    if not tables:
        return []
    k = tables[0].k
    full = (1 << (1 << k)) - 1
    skip = {0, full}
    for i in range(k):
        skip.add(MbfTable.from_function(k, lambda m, i=i: m >> i & 1).bits)
    return [t for t in tables if t.bits not in skip]


@dataclass(frozen=True)
class Partition:
    """Split of the power set of {1..k} by an auxiliary variable's state.

    ``b_family`` holds the labelings on which the variable is 1; it must be
    upward closed.  The empty labeling normally sits on the off side; a
    parameter vector with a negative constant puts it in b_family, in which
    case the variable is constant-on and gets eliminated upstream.
    """

    k: int
    b_family: frozenset[int]

    def __post_init__(self):
        full = (1 << self.k) - 1
        for s in self.b_family:
            if s & ~full:
                raise ValueError("labeling outside the power set")
            for i in range(self.k):
                t = s | (1 << i)
                if t != s and t not in self.b_family:
                    raise ValueError("b_family must be upward closed")

    @property
    def a_family(self) -> frozenset[int]:
        return frozenset(m for m in range(1 << self.k) if m not in self.b_family)

    def as_mbf(self) -> MbfTable:
        return MbfTable.from_function(self.k, lambda m: m in self.b_family)


def partition_of_mbf(t: MbfTable) -> Partition:
    if not is_monotone(t):
        raise ValueError("only monotone tables induce partitions")
    return Partition(t.k, frozenset(m for m in range(1 << t.k) if t.value(m)))


@dataclass(frozen=True)
class AvParams:
    """Constant and per-variable weights of one auxiliary variable term.

    The weights must be non-negative: they are the magnitudes of the
    (non-positive) x-to-z bilinear coefficients, so non-negativity is
    exactly submodularity of the term.
    """

    g: Fraction
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "g", rat(self.g))
        object.__setattr__(self, "weights", tuple(rat(w) for w in self.weights))
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")

    @property
    def k(self) -> int:
        return len(self.weights)

    @classmethod
    def of(cls, g, weights) -> "AvParams":
        return cls(rat(g), tuple(rat(w) for w in weights))


def partition_coefficient(p: AvParams, mask: int) -> Fraction:
    """g minus the weights selected by the labeling; its sign decides the
    auxiliary variable's optimal state on that labeling."""
    total = p.g
    for i in range(p.k):
        if mask >> i & 1:
            total -= p.weights[i]
    return total


def min_contribution(p: AvParams, mask: int) -> Fraction:
    """min over z in {0,1} of partition_coefficient * z."""
    return min(Fraction(0), partition_coefficient(p, mask))


def partition_from_params(p: AvParams) -> Partition:
    """Labelings with strictly negative coefficient; ties stay off."""
    fam = frozenset(m for m in range(1 << p.k) if partition_coefficient(p, m) < 0)
    return Partition(p.k, fam)


def forward_partition() -> Partition:
    """k = 4 reference: on exactly when at least three variables are 1."""
    return Partition(4, frozenset(m for m in range(16) if m.bit_count() >= 3))


def backward_partition() -> Partition:
    """k = 4 reference: on exactly when at least two variables are 1."""
    return Partition(4, frozenset(m for m in range(16) if m.bit_count() >= 2))


def is_uniform_matroid(p: Partition) -> int | None:
    """Rank r when a_family is exactly all labelings of size <= r."""
    if not p.a_family:
        return None
    r = max(m.bit_count() for m in p.a_family)
    expected = frozenset(m for m in range(1 << p.k) if m.bit_count() <= r)
    return r if p.a_family == expected else None


def induced_mbf(h: QuadraticPoly, av: int) -> MbfTable:
    """Optimal-state table of one auxiliary variable of h.

    ``av`` is the variable's global 1-based index inside h's auxiliary
    block.  For each x labeling the other auxiliary variables are minimized
    out; a tie between the two states of ``av`` resolves to 0.  Requires h
    submodular, otherwise the resulting table need not be monotone.
    """
    if not h.n_x < av <= h.n_vars:
        raise ValueError("av must index the auxiliary block")
    if not h.is_submodular():
        raise ValueError("induced state is only meaningful for submodular h")
    a = av - h.n_x
    a_bit = 1 << (a - 1)
    bits = 0
    for x in range(1 << h.n_x):
        best0 = best1 = None
        for z in range(1 << h.n_z):
            v = h.evaluate(x, z)
            if z & a_bit:
                if best1 is None or v < best1:
                    best1 = v
            else:
                if best0 is None or v < best0:
                    best0 = v
        if best1 < best0:
            bits |= 1 << x
    return MbfTable(h.n_x, bits)
