"""Nearest submodular quadratic with prescribed auxiliary-variable behavior.

Given a target pseudo-Boolean function g on k variables and a set of
monotone tables m_1..m_M, one auxiliary variable is created per table and
a single linear program searches over all edge capacities of the joint
(k + M)-node form:

  * capacity variables reproduce every term of the capacity form: source,
    sink and ordered-pair capacities on the originals, the auxiliaries,
    and the original-to-auxiliary couplings;
  * for each of the 2^k labelings x a small max-flow block (flow variable
    per auxiliary-network arc plus one source-throughput variable) whose
    feasibility bounds the throughput by the cheapest auxiliary cut, and a
    tightness row forcing the cut selected by z = m(x) under that bound;
    together these pin min over z at exactly the prescribed states, for
    every feasible point, not just at optimality;
  * a pair of slack rows per labeling measures |g(x) - h(x, m(x))| and the
    objective minimizes their sum, i.e. the L1 distance.

Distance zero therefore certifies an exact reduction, and the reported
per-labeling gaps are always recomputed by the brute-force oracle rather
than read from the program.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lpsolver
from .mbf import MbfTable, is_monotone
from .oracle import VerificationReport, verify_reduction
from .pbf import CapacityForm, MultilinearPoly, QuadraticPoly, from_capacity_form

PROGRESSIVE_THRESHOLD = 6


@dataclass(frozen=True)
class ReductionProblem:
    """Target polynomial plus the monotone tables its auxiliaries must follow."""

    target: MultilinearPoly
    mbf_set: tuple[MbfTable, ...]
    allow_degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mbf_set", tuple(self.mbf_set))
        k = self.target.n_vars
        seen = set()
        full = (1 << (1 << k)) - 1
        projections = set()
        for i in range(k):
            bits = 0
            for m in range(1 << k):
                if m >> i & 1:
                    bits |= 1 << m
            projections.add(bits)
        for t in self.mbf_set:
            if t.k != k:
                raise ValueError("every table must match the target's variable count")
            if not is_monotone(t):
                raise ValueError("auxiliary tables must be monotone")
            if t.bits in seen:
                raise ValueError("duplicate table in mbf_set")
            seen.add(t.bits)
            if not self.allow_degenerate and (t.bits in (0, full) or t.bits in projections):
                raise ValueError(
                    "constant and single-variable tables add nothing; "
                    "pass allow_degenerate=True to keep them"
                )

    @property
    def k(self) -> int:
        return self.target.n_vars


@dataclass(frozen=True)
class ReductionResult:
    quadratic: QuadraticPoly
    l1_distance: Fraction
    per_labeling_gap: dict[int, Fraction]
    report: VerificationReport


def _check_size(problem: ReductionProblem):
    if problem.k > 4 and len(problem.mbf_set) > 40:
        raise ValueError("refusing k > 4 with more than 40 tables")


def _aux_cut_terms(problem: ReductionProblem, x: int, z_bits: dict[int, int]) -> dict[str, Fraction]:
    """Capacity variables cut by the auxiliary labeling z at a fixed x."""
    k = problem.k
    M = len(problem.mbf_set)
    expr: dict[str, Fraction] = {}

    def bump(name, c=Fraction(1)):
        expr[name] = expr.get(name, Fraction(0)) + c

    for l in range(1, M + 1):
        if not z_bits[l]:
            bump(f"src_z{l}")
            for i in range(1, k + 1):
                if x >> (i - 1) & 1:
                    bump(f"xz_{i}_{l}")
        else:
            bump(f"snk_z{l}")
    for l in range(2, M + 1):
        for m in range(1, l):
            if z_bits[l] and not z_bits[m]:
                bump(f"zz_{l}_{m}")
    return expr


def _value_terms(problem: ReductionProblem, x: int) -> dict[str, Fraction]:
    """Linear form for h(x, m(x)) in the capacity variables."""
    k = problem.k
    expr = {"c0": Fraction(1)}
    for i in range(1, k + 1):
        expr[f"snk_x{i}" if x >> (i - 1) & 1 else f"src_x{i}"] = Fraction(1)
    for i in range(2, k + 1):
        for j in range(1, i):
            if x >> (i - 1) & 1 and not x >> (j - 1) & 1:
                expr[f"xx_{i}_{j}"] = Fraction(1)
    states = {l: problem.mbf_set[l - 1].value(x) for l in range(1, len(problem.mbf_set) + 1)}
    for name, c in _aux_cut_terms(problem, x, states).items():
        expr[name] = expr.get(name, Fraction(0)) + c
    return expr


def build_reduction_lp(problem: ReductionProblem) -> lpsolver.LinearProgram:
    """The L1-nearest program over capacities, flows, and slack variables."""
    _check_size(problem)
    k, M = problem.k, len(problem.mbf_set)
    lp = lpsolver.LinearProgram()
    lp.add_variable("c0", lower=None)
    for i in range(1, k + 1):
        lp.add_variable(f"src_x{i}")
        lp.add_variable(f"snk_x{i}")
    for i in range(2, k + 1):
        for j in range(1, i):
            lp.add_variable(f"xx_{i}_{j}")
    for l in range(1, M + 1):
        lp.add_variable(f"src_z{l}")
        lp.add_variable(f"snk_z{l}")
    for i in range(1, k + 1):
        for l in range(1, M + 1):
            lp.add_variable(f"xz_{i}_{l}")
    for l in range(2, M + 1):
        for m in range(1, l):
            lp.add_variable(f"zz_{l}_{m}")

    objective: dict[str, Fraction] = {}
    for x in range(1 << k):
        gap = f"gap_{x}"
        lp.add_variable(gap)
        objective[gap] = Fraction(1)
        if M:
            for l in range(1, M + 1):
                lp.add_variable(f"fs_{x}_{l}")
                lp.add_variable(f"ft_{x}_{l}")
            for l in range(2, M + 1):
                for m in range(1, l):
                    lp.add_variable(f"fz_{x}_{l}_{m}")
            lp.add_variable(f"thr_{x}")

            for l in range(1, M + 1):
                cap = {f"fs_{x}_{l}": Fraction(1), f"src_z{l}": Fraction(-1)}
                for i in range(1, k + 1):
                    if x >> (i - 1) & 1:
                        cap[f"xz_{i}_{l}"] = Fraction(-1)
                lp.add_constraint(cap, "<=", 0)
                lp.add_constraint({f"ft_{x}_{l}": 1, f"snk_z{l}": -1}, "<=", 0)
            for l in range(2, M + 1):
                for m in range(1, l):
                    lp.add_constraint({f"fz_{x}_{l}_{m}": 1, f"zz_{l}_{m}": -1}, "<=", 0)
            # Inflow bounded by outflow at each auxiliary node: summed over
            # any source-side set this caps the throughput by every cut.
            for l in range(1, M + 1):
                cons = {f"fs_{x}_{l}": Fraction(1), f"ft_{x}_{l}": Fraction(-1)}
                for m in range(l + 1, M + 1):
                    cons[f"fz_{x}_{m}_{l}"] = Fraction(1)
                for m in range(1, l):
                    cons[f"fz_{x}_{l}_{m}"] = Fraction(-1)
                lp.add_constraint(cons, "<=", 0)
            source = {f"thr_{x}": Fraction(1)}
            for l in range(1, M + 1):
                source[f"fs_{x}_{l}"] = Fraction(-1)
            lp.add_constraint(source, "<=", 0)
            # Tightness: the cut picked by the prescribed states must not
            # exceed the throughput, hence equals the minimum cut.
            states = {l: problem.mbf_set[l - 1].value(x) for l in range(1, M + 1)}
            tight = dict(_aux_cut_terms(problem, x, states))
            tight[f"thr_{x}"] = tight.get(f"thr_{x}", Fraction(0)) - 1
            lp.add_constraint(tight, "<=", 0)

        gx = problem.target.evaluate(x)
        value = _value_terms(problem, x)
        lo = dict(value)
        lo[gap] = Fraction(1)
        lp.add_constraint(lo, ">=", gx)
        hi = dict(value)
        hi[gap] = Fraction(-1)
        lp.add_constraint(hi, "<=", gx)

    lp.set_objective(objective)
    return lp


def _capacity_from_solution(problem: ReductionProblem, values: dict[str, Fraction]) -> CapacityForm:
    k, M = problem.k, len(problem.mbf_set)
    src = {}
    sink = {}
    pairs = {}
    for i in range(1, k + 1):
        src[i] = values[f"src_x{i}"]
        sink[i] = values[f"snk_x{i}"]
    for l in range(1, M + 1):
        src[k + l] = values[f"src_z{l}"]
        sink[k + l] = values[f"snk_z{l}"]
    for i in range(2, k + 1):
        for j in range(1, i):
            pairs[(i, j)] = values[f"xx_{i}_{j}"]
    for i in range(1, k + 1):
        for l in range(1, M + 1):
            pairs[(i, k + l)] = values[f"xz_{i}_{l}"]
    for l in range(2, M + 1):
        for m in range(1, l):
            pairs[(k + l, k + m)] = values[f"zz_{l}_{m}"]
    return CapacityForm(k, M, values["c0"], src, sink, pairs)


def _solve(problem: ReductionProblem) -> ReductionResult:
    lp = build_reduction_lp(problem)
    sol = lpsolver.solve(lp)
    if sol.status != lpsolver.OPTIMAL:
        raise lpsolver.LpInternalError(f"reduction program reported {sol.status}")
    quadratic = from_capacity_form(_capacity_from_solution(problem, sol.values))
    quadratic = quadratic.drop_unused_aux()
    report = verify_reduction(problem.target, quadratic)
    gaps = report.gaps
    distance = sum((abs(v) for v in gaps.values()), Fraction(0))
    if distance != sol.objective_value:
        raise lpsolver.LpInternalError(
            "oracle gap total disagrees with the program objective; "
            "the tightness block failed to pin the auxiliary minima"
        )
    return ReductionResult(quadratic, distance, gaps, report)


def _candidate_subsets(problem: ReductionProblem):
    """Small table subsets worth trying before the full program.

    Ordered by the sign of the target's top coefficient: a non-positive top
    term reduces through the all-variables conjunction, a positive one
    through the |S| >= 2 threshold, so those candidates come first.
    """
    k = problem.k
    by_bits = {t.bits: t for t in problem.mbf_set}
    full_mask = (1 << k) - 1
    top = problem.target.terms.get(full_mask, Fraction(0))
    order = range(k, 1, -1) if top <= 0 else range(2, k + 1)
    hinted = []
    for r in order:
        t = by_bits.get(MbfTable.threshold(k, r).bits)
        if t is not None:
            hinted.append(t)
    yield ()
    for t in hinted:
        yield (t,)
    for t in problem.mbf_set:
        if t not in hinted:
            yield (t,)
    if len(hinted) >= 2:
        yield tuple(hinted[:2])


def nearest_quadratic(problem: ReductionProblem, progressive: bool | None = None) -> ReductionResult:
    """L1-closest constrained quadratic; exact optimum.

    With a large table set, subsets are tried first and an exact fit on a
    subset short-circuits (adding tables can never improve on distance
    zero).  Anything short of zero falls back to the full program.
    """
    _check_size(problem)
    if progressive is None:
        progressive = len(problem.mbf_set) > PROGRESSIVE_THRESHOLD
    if progressive and problem.mbf_set:
        for subset in _candidate_subsets(problem):
            sub = ReductionProblem(problem.target, subset, allow_degenerate=True)
            result = _solve(sub)
            if result.l1_distance == 0:
                return result
    return _solve(problem)


def exact_reduce(problem: ReductionProblem) -> tuple[QuadraticPoly, int] | None:
    """The reduction itself when one exists: a quadratic whose minimum over
    the auxiliary block equals the target everywhere, with unused
    auxiliaries dropped; None when the distance is positive."""
    result = nearest_quadratic(problem)
    if result.l1_distance != 0:
        return None
    return result.quadratic, result.quadratic.n_z


def overestimate(problem: ReductionProblem, anchor: int) -> ReductionResult:
    """Tightest one-sided fit: h dominates the target everywhere and meets
    it at the anchor labeling; minimizes the total overshoot."""
    _check_size(problem)
    if anchor >> problem.k:
        raise ValueError("anchor labeling outside the target's variable range")
    lp = build_reduction_lp(problem)
    for x in range(1 << problem.k):
        value = _value_terms(problem, x)
        gx = problem.target.evaluate(x)
        lp.add_constraint(value, ">=", gx)
        if x == anchor:
            lp.add_constraint(value, "<=", gx)
    sol = lpsolver.solve(lp)
    if sol.status != lpsolver.OPTIMAL:
        raise ValueError(f"overestimation program is {sol.status} at this anchor")
    quadratic = from_capacity_form(_capacity_from_solution(problem, sol.values)).drop_unused_aux()
    report = verify_reduction(problem.target, quadratic)
    gaps = report.gaps
    distance = sum((abs(v) for v in gaps.values()), Fraction(0))
    if any(v > 0 for v in gaps.values()) or gaps[anchor] != 0:
        raise lpsolver.LpInternalError("overestimate left a labeling below the target")
    return ReductionResult(quadratic, distance, gaps, report)
