"""Max-flow/min-cut minimization of submodular quadratics.

The capacity form of a submodular quadratic is literally an s-t network:
src capacities sit on source arcs, sink capacities on arcs into the sink,
and pair capacities on internal arcs.  A labeling corresponds to the cut
whose source side is {i : x_i = 1}, and the cut capacity equals the cost
minus the constant, so the minimum labeling is read off a maximum flow.

Flows are exact rationals.  Augmentation follows shortest paths
(Edmonds-Karp), which bounds the number of augmentations polynomially and
independently of the capacity values.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .pbf import CapacityForm, QuadraticPoly, to_capacity_form


@dataclass
class FlowNetwork:
    """Directed network with one source (0) and one sink (n_internal + 1)."""

    n_internal: int
    arcs: dict[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        for (u, v), c in self.arcs.items():
            if c < 0:
                raise ValueError("arc capacities must be non-negative")
            if u == v or not 0 <= u <= self.sink or not 0 <= v <= self.sink:
                raise ValueError(f"bad arc ({u}, {v})")

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return self.n_internal + 1

    def add(self, u: int, v: int, cap: Fraction):
        self.arcs[(u, v)] = self.arcs.get((u, v), Fraction(0)) + cap


@dataclass(frozen=True)
class CutResult:
    flow_value: Fraction
    source_side: frozenset[int]
    labeling: int


def build_network(c: CapacityForm) -> FlowNetwork:
    """Network whose min cut plus c_empty is the minimum of the quadratic."""
    net = FlowNetwork(c.n_nodes)
    t = net.sink
    for i, v in sorted(c.src.items()):
        net.add(0, i, v)
    for i, v in sorted(c.sink.items()):
        net.add(i, t, v)
    for (i, j), v in sorted(c.pairs.items()):
        net.add(i, j, v)
    return net


def max_flow(net: FlowNetwork) -> CutResult:
    """Edmonds-Karp with exact rational capacities.

    The returned cut is the residual set reachable from the source, i.e.
    the minimal source side among minimum cuts; its internal nodes are
    reported as the 1-labeling.
    """
    n = net.sink + 1
    residual: list[dict[int, Fraction]] = [dict() for _ in range(n)]
    for (u, v), cap in sorted(net.arcs.items()):
        if cap == 0:
            continue
        residual[u][v] = residual[u].get(v, Fraction(0)) + cap
        residual[v].setdefault(u, Fraction(0))
    flow = Fraction(0)
    s, t = net.source, net.sink
    while True:
        parent = {s: s}
        queue = deque([s])
        while queue and t not in parent:
            u = queue.popleft()
            for v in sorted(residual[u]):
                if v not in parent and residual[u][v] > 0:
                    parent[v] = u
                    queue.append(v)
        if t not in parent:
            break
        bottleneck = None
        v = t
        while v != s:
            u = parent[v]
            cap = residual[u][v]
            bottleneck = cap if bottleneck is None else min(bottleneck, cap)
            v = u
        v = t
        while v != s:
            u = parent[v]
            residual[u][v] -= bottleneck
            residual[v][u] = residual[v].get(u, Fraction(0)) + bottleneck
            v = u
        flow += bottleneck
    reach = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v, cap in residual[u].items():
            if cap > 0 and v not in reach:
                reach.add(v)
                queue.append(v)
    side = frozenset(v for v in reach if v not in (s, t))
    labeling = 0
    for v in side:
        labeling |= 1 << (v - 1)
    return CutResult(flow, side, labeling)


def minimize_quadratic(h: QuadraticPoly) -> tuple[Fraction, int]:
    """Exact global minimum of a submodular quadratic over all variables.

    Returns the value and one argmin mask over the joint x and z blocks;
    among minimizers the labeling with the fewest 1s is produced, which in
    particular parks tied auxiliary variables at 0.
    """
    cf = to_capacity_form(h)
    result = max_flow(build_network(cf))
    return cf.c_empty + result.flow_value, result.labeling
