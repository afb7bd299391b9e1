"""Meteor graphs: recognition, trails and the period invariant.

A meteor graph is a weakly connected essential graph made of a source cycle
(every vertex has in-degree 1), a disjoint sink cycle (every vertex has
out-degree 1) and the trails leading from the first to the second.

For basepoints ``v`` on the source cycle and ``w`` on the sink cycle, each
trail ``t`` has a through-length ``D(t) = d(v, s(t)) + |t| + d(r(t), w)``
measured along the cycles. Counting trails by ``D mod gcd(p, q)`` gives the
residue-count vector; up to cyclic rotation it does not depend on the
basepoints and, together with ``p`` and ``q``, decides shift equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from math import gcd

from .graph import (
    Cycle,
    Graph,
    induced_cycle,
    is_essential,
    is_nontrivial_scc,
    is_weakly_connected,
    reachable,
    scc_decomposition,
)

NOT_ESSENTIAL = "not_essential"
NOT_CONNECTED = "not_connected"
WRONG_CYCLE_COUNT = "wrong_cycle_count"
SCC_NOT_SIMPLE_CYCLE = "scc_not_simple_cycle"
STRANDED_VERTEX = "stranded_vertex"
REASONS = (NOT_ESSENTIAL, NOT_CONNECTED, WRONG_CYCLE_COUNT, SCC_NOT_SIMPLE_CYCLE, STRANDED_VERTEX)


class NotMeteorError(ValueError):
    def __init__(self, reason: str, which: str = "graph"):
        self.reason = reason
        self.which = which
        super().__init__(f"{which} is not a meteor graph ({reason})")


def _cycle_from(cycle: Cycle, start: int) -> tuple[int, ...]:
    order = cycle.vertex_order
    k = order.index(start)
    return order[k:] + order[:k]


@dataclass(frozen=True)
class MeteorStructure:
    graph: Graph
    source_cycle: Cycle
    sink_cycle: Cycle
    basepoint_v: int
    basepoint_w: int

    @property
    def p(self) -> int:
        return len(self.source_cycle)

    @property
    def q(self) -> int:
        return len(self.sink_cycle)

    @property
    def period(self) -> int:
        return gcd(self.p, self.q)

    @cached_property
    def source_order(self) -> tuple[int, ...]:
        """Source-cycle vertices in cycle order, starting at ``basepoint_v``."""
        return _cycle_from(self.source_cycle, self.basepoint_v)

    @cached_property
    def sink_order(self) -> tuple[int, ...]:
        return _cycle_from(self.sink_cycle, self.basepoint_w)

    @cached_property
    def source_set(self) -> frozenset[int]:
        return self.source_cycle.vertex_set

    @cached_property
    def sink_set(self) -> frozenset[int]:
        return self.sink_cycle.vertex_set

    @cached_property
    def interior(self) -> tuple[int, ...]:
        return tuple(v for v in self.graph.vertices if v not in self.source_set and v not in self.sink_set)

    @cached_property
    def source_cycle_edges(self) -> frozenset[int]:
        return frozenset(self.source_cycle.edges)

    @cached_property
    def sink_cycle_edges(self) -> frozenset[int]:
        return frozenset(self.sink_cycle.edges)

    def source_distance(self, a: int, b: int) -> int:
        """Steps from ``a`` to ``b`` along the source cycle."""
        order = self.source_order
        return (order.index(b) - order.index(a)) % self.p

    def sink_distance(self, a: int, b: int) -> int:
        order = self.sink_order
        return (order.index(b) - order.index(a)) % self.q

    def source_successor(self, u: int) -> int:
        order = self.source_order
        return order[(order.index(u) + 1) % self.p]

    def source_predecessor(self, u: int) -> int:
        order = self.source_order
        return order[(order.index(u) - 1) % self.p]

    def sink_successor(self, u: int) -> int:
        order = self.sink_order
        return order[(order.index(u) + 1) % self.q]

    def sink_predecessor(self, u: int) -> int:
        order = self.sink_order
        return order[(order.index(u) - 1) % self.q]

    def cycle_out_edge(self, u: int) -> int:
        """The edge leaving ``u`` along whichever cycle ``u`` lies on."""
        edges = self.source_cycle_edges if u in self.source_set else self.sink_cycle_edges
        (eid,) = [e.id for e in self.graph.out_edges(u) if e.id in edges]
        return eid

    def cycle_in_edge(self, u: int) -> int:
        edges = self.source_cycle_edges if u in self.source_set else self.sink_cycle_edges
        (eid,) = [e.id for e in self.graph.in_edges(u) if e.id in edges]
        return eid

    def with_basepoints(self, v: int | None = None, w: int | None = None) -> "MeteorStructure":
        v = self.basepoint_v if v is None else v
        w = self.basepoint_w if w is None else w
        if v not in self.source_set or w not in self.sink_set:
            raise ValueError("basepoints must lie on the source and sink cycle")
        return replace(self, basepoint_v=v, basepoint_w=w)

    @cached_property
    def trails(self) -> tuple[tuple[int, ...], ...]:
        return tuple(enumerate_trails(self))


def classify(g: Graph) -> tuple[MeteorStructure | None, str | None]:
    """``(structure, None)`` for a meteor graph, else ``(None, reason)``."""
    if not is_essential(g):
        return None, NOT_ESSENTIAL
    if not is_weakly_connected(g):
        return None, NOT_CONNECTED
    scc = scc_decomposition(g)
    cyclic = [c for c in scc.components if is_nontrivial_scc(g, c)]
    cycles = []
    for comp in cyclic:
        cyc = induced_cycle(g, comp)
        if cyc is None:
            return None, SCC_NOT_SIMPLE_CYCLE
        cycles.append(cyc)
    if len(cycles) != 2:
        return None, WRONG_CYCLE_COUNT
    a, b = cycles
    down_a = reachable(g, a.vertex_order)
    if set(b.vertex_order) <= down_a:
        c0, c1 = a, b
    elif set(a.vertex_order) <= reachable(g, b.vertex_order):
        c0, c1 = b, a
    else:
        return None, STRANDED_VERTEX
    if any(g.in_degree(v) != 1 for v in c0.vertex_order) or any(
        g.out_degree(v) != 1 for v in c1.vertex_order
    ):
        return None, STRANDED_VERTEX
    from_c0 = reachable(g, c0.vertex_order)
    to_c1 = reachable(g, c1.vertex_order, reverse=True)
    if any(v not in from_c0 or v not in to_c1 for v in g.vertices):
        return None, STRANDED_VERTEX
    ms = MeteorStructure(g, c0, c1, min(c0.vertex_order), min(c1.vertex_order))
    return ms, None


def recognize(g: Graph) -> MeteorStructure | None:
    return classify(g)[0]


def meteor_reason(g: Graph) -> str | None:
    return classify(g)[1]


def require_meteor(g: Graph, which: str = "graph") -> MeteorStructure:
    ms, reason = classify(g)
    if ms is None:
        raise NotMeteorError(reason, which)
    return ms


def enumerate_trails(ms: MeteorStructure) -> list[tuple[int, ...]]:
    """Every path from the source cycle to the sink cycle with interior off both cycles."""
    g = ms.graph
    out: list[tuple[int, ...]] = []

    def extend(path: list[int], at: int) -> None:
        for e in g.out_edges(at):
            if e.id in ms.source_cycle_edges or e.dst in ms.source_set:
                continue
            path.append(e.id)
            if e.dst in ms.sink_set:
                out.append(tuple(path))
            else:
                extend(path, e.dst)
            path.pop()

    for u in ms.source_order:
        extend([], u)
    out.sort()
    return out


def trail_source(ms: MeteorStructure, trail: tuple[int, ...]) -> int:
    return ms.graph.edge(trail[0]).src


def trail_range(ms: MeteorStructure, trail: tuple[int, ...]) -> int:
    return ms.graph.edge(trail[-1]).dst


def through_length(ms: MeteorStructure, trail: tuple[int, ...]) -> int:
    """Length of the shortest basepoint-to-basepoint path running along ``trail``."""
    return (
        ms.source_distance(ms.basepoint_v, trail_source(ms, trail))
        + len(trail)
        + ms.sink_distance(trail_range(ms, trail), ms.basepoint_w)
    )


def residue_counts(ms: MeteorStructure) -> tuple[int, ...]:
    """``N(n)`` for n = 0 .. period-1, relative to the structure's basepoints."""
    per = ms.period
    counts = [0] * per
    for t in ms.trails:
        counts[through_length(ms, t) % per] += 1
    return tuple(counts)


def min_rotation(counts: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Lexicographically least rotation and the smallest offset producing it."""
    n = len(counts)
    best = min(range(n), key=lambda t: (counts[t:] + counts[:t], t))
    return counts[best:] + counts[:best], best


@dataclass(frozen=True)
class MeteorProfile:
    p: int
    q: int
    period: int
    counts: tuple[int, ...]

    @property
    def trail_count(self) -> int:
        return sum(self.counts)

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "period": self.period, "counts": list(self.counts)}


def profile(ms: MeteorStructure) -> MeteorProfile:
    counts, _ = min_rotation(residue_counts(ms))
    return MeteorProfile(ms.p, ms.q, ms.period, counts)


def graph_profile(g: Graph) -> MeteorProfile:
    return profile(require_meteor(g))


def equivalent(g1: Graph, g2: Graph) -> bool:
    """Shift equivalence (equivalently strong shift equivalence) of two meteor graphs."""
    a = graph_profile_or_raise(g1, "first graph")
    b = graph_profile_or_raise(g2, "second graph")
    return a == b


def graph_profile_or_raise(g: Graph, which: str) -> MeteorProfile:
    return profile(require_meteor(g, which))


@dataclass(frozen=True)
class ClosureReport:
    g1_meteor: bool
    g2_essential: bool
    g2_meteor: bool
    reason: str | None
    proceeds: bool
    definitive_non_equivalence: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def closure_check(g1: Graph, g2: Graph) -> ClosureReport:
    """Guard for comparing a meteor graph against an arbitrary graph.

    An essential graph shift equivalent to a meteor graph is itself meteor,
    so an essential non-meteor ``g2`` is definitely not equivalent to ``g1``.
    A non-essential ``g2`` is simply refused.
    """
    m1 = recognize(g1) is not None
    _, reason = classify(g2)
    ess = is_essential(g2)
    proceeds = m1 and reason is None
    return ClosureReport(
        g1_meteor=m1,
        g2_essential=ess,
        g2_meteor=reason is None,
        reason=reason,
        proceeds=proceeds,
        definitive_non_equivalence=m1 and ess and reason is not None,
    )
