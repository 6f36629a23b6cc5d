"""Brute-force ground truth for every transformation the package produces.

Everything here works by full enumeration of labelings and never shares a
code path with the solvers it checks (evaluation goes through the plain
subset-sum in MultilinearPoly, which is itself pinned by hand-computed
vectors in the tests).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .pbf import ENUMERATION_CAP, MultilinearPoly, QuadraticPoly, indices_of


@dataclass(frozen=True)
class LabelingRow:
    x: int
    f_value: Fraction
    h_min: Fraction
    gap: Fraction
    z_argmin: int


@dataclass(frozen=True)
class VerificationReport:
    """Per-labeling comparison of a target f with min over aux of h."""

    rows: tuple[LabelingRow, ...]
    passed: bool
    av_monotone: tuple[bool, ...]

    @property
    def gaps(self) -> dict[int, Fraction]:
        return {row.x: row.gap for row in self.rows}


def brute_min(f: MultilinearPoly) -> tuple[Fraction, int]:
    """Exact global minimum by enumeration; ties take the smallest mask."""
    if f.n_vars > ENUMERATION_CAP:
        raise ValueError(f"brute_min refuses n > {ENUMERATION_CAP}")
    values = f.evaluate_all()
    best = values[0]
    best_mask = 0
    for mask in range(1, len(values)):
        if values[mask] < best:
            best, best_mask = values[mask], mask
    return best, best_mask


def _induced_bits(h: QuadraticPoly, av: int) -> list[int]:
    """Optimal state of auxiliary variable ``av`` (1-based within the aux
    block) per x labeling, minimizing over the other aux variables; a tie
    is resolved to 0."""
    bits = []
    a_bit = 1 << (av - 1)
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
        bits.append(1 if best1 < best0 else 0)
    return bits


def _monotone(bits: list[int], k: int) -> bool:
    for mask in range(1 << k):
        for i in range(k):
            if not mask >> i & 1 and bits[mask] > bits[mask | (1 << i)]:
                return False
    return True


def verify_reduction(f: MultilinearPoly, h: QuadraticPoly) -> VerificationReport:
    """Check f(x) = min over aux assignments of h(x, z) on every labeling.

    Gap rows report f(x) - min_z h(x, z); the report passes when all gaps
    vanish.  The induced state of each auxiliary variable is also extracted
    and tested for monotonicity, since a sound submodular reduction cannot
    produce a non-monotone one.
    """
    if h.n_x != f.n_vars:
        raise ValueError("h must have one original variable per variable of f")
    if h.n_vars > ENUMERATION_CAP:
        raise ValueError(f"verify_reduction refuses n > {ENUMERATION_CAP}")
    rows = []
    ok = True
    for x in range(1 << f.n_vars):
        fv = f.evaluate(x)
        hmin, zarg = h.min_over_aux(x)
        gap = fv - hmin
        if gap != 0:
            ok = False
        rows.append(LabelingRow(x, fv, hmin, gap, zarg))
    mono = tuple(_monotone(_induced_bits(h, a), h.n_x) for a in range(1, h.n_z + 1))
    return VerificationReport(tuple(rows), ok, mono)


def format_report(report: VerificationReport) -> str:
    lines = ["labeling f min_h gap z_argmin"]
    for row in report.rows:
        label = ",".join(map(str, indices_of(row.x))) or "-"
        zlab = ",".join(map(str, indices_of(row.z_argmin))) or "-"
        lines.append(f"{label} {row.f_value} {row.h_min} {row.gap} {zlab}")
    return "\n".join(lines) + "\n"
