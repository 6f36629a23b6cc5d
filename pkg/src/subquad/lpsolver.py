"""Exact rational linear programming by two-phase primal simplex.

The tableau is kept fraction-free: an integer matrix M plus one positive
integer denominator q represent the real tableau M/q.  A pivot replaces q
by the pivot entry and updates every other row with

    M'[i][j] = (M[i][j] * M[pr][pc] - M[i][pc] * M[pr][j]) // q

where the division is exact (tableau entries are scaled basis minors), so
no gcd work happens in the inner loop and Python's big integers carry the
growth.  Entering columns follow Bland's rule (smallest index with a
negative reduced cost) and ties in the ratio test leave the basic variable
with the smallest index, which rules out cycling.

Free variables are split into differences of two non-negative columns;
non-zero lower bounds are shifted away.  Infeasibility and unboundedness
are reported as statuses, never exceptions.  Every optimal solution is
re-substituted into the original constraints before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .pbf import format_rational, rat

LESS, GREATER, EQUAL = "<=", ">=", "=="

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


class LpInternalError(RuntimeError):
    """A solved point failed exact re-validation; indicates a solver bug."""


@dataclass(frozen=True)
class Constraint:
    coeffs: dict[str, Fraction]
    rel: str
    rhs: Fraction


@dataclass(frozen=True)
class LpSolution:
    status: str
    values: dict[str, Fraction]
    objective_value: Fraction | None


class LinearProgram:
    """Named-variable minimization program with exact rational data."""

    def __init__(self):
        self._order: list[str] = []
        self._lower: dict[str, Fraction | None] = {}
        self.constraints: list[Constraint] = []
        self.objective: dict[str, Fraction] = {}

    def add_variable(self, name: str, lower: object = 0) -> str:
        if name in self._lower:
            raise ValueError(f"variable {name!r} already declared")
        self._order.append(name)
        self._lower[name] = None if lower is None else rat(lower)
        return name

    @property
    def variables(self) -> list[str]:
        return list(self._order)

    def _check_names(self, coeffs):
        for name in coeffs:
            if name not in self._lower:
                raise ValueError(f"unknown variable {name!r}")

    def add_constraint(self, coeffs: dict[str, object], rel: str, rhs: object):
        if rel not in (LESS, GREATER, EQUAL):
            raise ValueError(f"bad relation {rel!r}")
        cl = {n: rat(c) for n, c in coeffs.items() if rat(c) != 0}
        self._check_names(cl)
        self.constraints.append(Constraint(cl, rel, rat(rhs)))

    def set_objective(self, coeffs: dict[str, object]):
        cl = {n: rat(c) for n, c in coeffs.items() if rat(c) != 0}
        self._check_names(cl)
        self.objective = cl

    def dump(self) -> str:
        """Plain-text form, one constraint per line, for debugging."""

        def form(coeffs):
            parts = [f"{format_rational(c)}*{n}" for n, c in sorted(coeffs.items())]
            return " + ".join(parts) if parts else "0"

        lines = [f"min {form(self.objective)}"]
        for con in self.constraints:
            lines.append(f"{form(con.coeffs)} {con.rel} {format_rational(con.rhs)}")
        for name in self._order:
            lb = self._lower[name]
            lines.append(f"{name} free" if lb is None else f"{name} >= {format_rational(lb)}")
        return "\n".join(lines) + "\n"


def _pivot(rows: list[list[int]], q: int, pr: int, pc: int) -> int:
    prow = rows[pr]
    piv = prow[pc]
    for i in range(len(rows)):
        if i == pr:
            continue
        row = rows[i]
        f = row[pc]
        if f:
            rows[i] = [(v * piv - f * p) // q for v, p in zip(row, prow)]
        elif piv != q:
            rows[i] = [v * piv // q for v in row]
    if piv < 0:
        for i in range(len(rows)):
            rows[i] = [-v for v in rows[i]]
        piv = -piv
    return piv


def solve(lp: LinearProgram) -> LpSolution:
    """Exact simplex solve; statuses are optimal/infeasible/unbounded."""
    # Column layout: one column per non-negative variable, two per free
    # variable (positive and negative part).  Lower bounds are shifted out.
    cols: list[tuple[str, int]] = []
    shift: dict[str, Fraction] = {}
    for name in lp.variables:
        lb = lp._lower[name]
        if lb is None:
            cols.append((name, 1))
            cols.append((name, -1))
        else:
            shift[name] = lb
            cols.append((name, 1))
    col_index = {}
    for idx, key in enumerate(cols):
        col_index.setdefault(key[0], []).append(idx)

    ncols = len(cols)
    rows_frac: list[tuple[list[Fraction], str, Fraction]] = []
    for con in lp.constraints:
        row = [Fraction(0)] * ncols
        rhs = con.rhs
        for name, c in con.coeffs.items():
            if name in shift and shift[name] != 0:
                rhs -= c * shift[name]
            for idx in col_index[name]:
                row[idx] = c * cols[idx][1]
        rows_frac.append((row, con.rel, rhs))

    obj = [Fraction(0)] * ncols
    obj_shift = Fraction(0)
    for name, c in lp.objective.items():
        if name in shift and shift[name] != 0:
            obj_shift += c * shift[name]
        for idx in col_index[name]:
            obj[idx] = c * cols[idx][1]

    # Standard form with rhs >= 0, slack/artificial columns, integer rows.
    nrows = len(rows_frac)
    slack_cols: list[int] = []
    art_cols: list[int] = []
    body: list[list[Fraction]] = []
    basis: list[int] = []
    total_cols = ncols
    slack_of_row = {}
    art_of_row = {}
    for r, (row, rel, rhs) in enumerate(rows_frac):
        sign = -1 if rhs < 0 else 1
        if sign < 0:
            row = [-v for v in row]
            rhs = -rhs
            rel = {LESS: GREATER, GREATER: LESS, EQUAL: EQUAL}[rel]
        if rel == LESS:
            slack_of_row[r] = total_cols
            slack_cols.append(total_cols)
            total_cols += 1
        elif rel == GREATER:
            slack_of_row[r] = total_cols
            slack_cols.append(total_cols)
            total_cols += 1
            art_of_row[r] = total_cols
            art_cols.append(total_cols)
            total_cols += 1
        else:
            art_of_row[r] = total_cols
            art_cols.append(total_cols)
            total_cols += 1
        body.append((row, rel, rhs))

    width = total_cols + 1
    int_rows: list[list[int]] = []
    for r, (row, rel, rhs) in enumerate(body):
        full = [Fraction(0)] * width
        for j, v in enumerate(row):
            full[j] = v
        if rel == LESS:
            full[slack_of_row[r]] = Fraction(1)
            basis.append(slack_of_row[r])
        elif rel == GREATER:
            full[slack_of_row[r]] = Fraction(-1)
            full[art_of_row[r]] = Fraction(1)
            basis.append(art_of_row[r])
        else:
            full[art_of_row[r]] = Fraction(1)
            basis.append(art_of_row[r])
        full[-1] = rhs
        scale = lcm(*(v.denominator for v in full)) if full else 1
        int_rows.append([int(v * scale) for v in full])

    # Objective rows ride along at the bottom: phase 2 first, then phase 1.
    obj_row = [Fraction(0)] * width
    for j, v in enumerate(obj):
        obj_row[j] = v
    obj_scale = lcm(*(v.denominator for v in obj_row))
    p2 = [int(v * obj_scale) for v in obj_row]

    art_set = set(art_cols)
    p1 = [0] * width
    for r in range(nrows):
        if basis[r] in art_set:
            for j in range(width):
                p1[j] -= int_rows[r][j]
    for c in art_cols:
        p1[c] = 0

    rows = int_rows + [p2, p1]
    q = 1
    P2, P1 = nrows, nrows + 1

    def run_phase(obj_idx: int, allowed) -> str:
        nonlocal q
        while True:
            orow = rows[obj_idx]
            enter = -1
            for j in allowed:
                if orow[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL
            leave = -1
            best_num = best_den = None
            for r in range(nrows):
                a = rows[r][enter]
                if a > 0:
                    b = rows[r][-1]
                    if leave < 0 or b * best_den < best_num * a or (
                        b * best_den == best_num * a and basis[r] < basis[leave]
                    ):
                        leave, best_num, best_den = r, b, a
            if leave < 0:
                return UNBOUNDED
            q = _pivot(rows, q, leave, enter)
            basis[leave] = enter

    structural = [j for j in range(total_cols) if j not in art_set]
    status = run_phase(P1, structural)
    if status != OPTIMAL or rows[P1][-1] != 0:
        return LpSolution(INFEASIBLE, {}, None)

    # Drive leftover artificial basics out on any nonzero structural entry;
    # rows that cannot pivot are redundant and harmless to keep (their rhs
    # is zero), but dropping keeps later ratio tests cheap.
    drop = []
    for r in range(nrows):
        if basis[r] in art_set:
            pc = next((j for j in structural if rows[r][j] != 0), None)
            if pc is None:
                drop.append(r)
            else:
                q = _pivot(rows, q, r, pc)
                basis[r] = pc
    if drop:
        for r in reversed(drop):
            del rows[r]
            del basis[r]
        nrows -= len(drop)
        P2, P1 = nrows, nrows + 1

    status = run_phase(P2, structural)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, {}, None)

    # A basic variable's value is rhs over its own diagonal entry; initial
    # slack/artificial basics keep their build-time row scale there, while
    # pivoted-in columns carry q, so dividing by the diagonal covers both.
    col_value = [Fraction(0)] * total_cols
    for r in range(nrows):
        col_value[basis[r]] = Fraction(rows[r][-1], rows[r][basis[r]])
    values = {}
    for name in lp.variables:
        v = sum((col_value[idx] * cols[idx][1] for idx in col_index[name]), Fraction(0))
        values[name] = v + shift.get(name, Fraction(0))
    objective_value = sum(
        (c * values[n] for n, c in lp.objective.items()), Fraction(0)
    )

    for con in lp.constraints:
        lhs = sum((c * values[n] for n, c in con.coeffs.items()), Fraction(0))
        ok = lhs <= con.rhs if con.rel == LESS else lhs >= con.rhs if con.rel == GREATER else lhs == con.rhs
        if not ok:
            raise LpInternalError(f"solution violates {con.coeffs} {con.rel} {con.rhs}")
    for name in lp.variables:
        lb = lp._lower[name]
        if lb is not None and values[name] < lb:
            raise LpInternalError(f"solution violates bound on {name}")

    return LpSolution(OPTIMAL, values, objective_value)
