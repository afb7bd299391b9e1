"""Normal, quasi-normal and canonical forms of meteor graphs, and witnesses.

Every transformation here is a sequence of recorded moves, so the output
graph is always ``replay(g, moves)``. The canonical graph depends only on
the profile: one source-cycle vertex carries every trail, each trail is a
single edge, and a trail of residue ``n`` ends ``(n - 1) mod period`` steps
before the sink basepoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import networkx as nx

from .graph import Edge, Graph, check_isomorphism, edge_bijection, is_isomorphic
from .meteor import (
    MeteorProfile,
    MeteorStructure,
    NotMeteorError,
    min_rotation,
    profile,
    require_meteor,
    residue_counts,
)
from .moves import (
    MoveError,
    MoveRecord,
    in_amalgamate,
    in_split,
    out_amalgamate,
    out_split,
    replay,
    undo_onto,
)


class PreconditionError(ValueError):
    pass


class _Recorder:
    """Current graph plus the moves that produced it."""

    def __init__(self, g: Graph):
        self.g = g
        self.moves: list[MoveRecord] = []

    def run(self, fn, arg) -> MoveRecord:
        self.g, rec = fn(self.g, arg)
        self.moves.append(rec)
        return rec

    @property
    def ms(self) -> MeteorStructure:
        return require_meteor(self.g)


def _interior_order(ms: MeteorStructure) -> list[int]:
    """Interior vertices in topological order (ties by id)."""
    sub = nx.DiGraph()
    inner = set(ms.interior)
    sub.add_nodes_from(inner)
    sub.add_edges_from((e.src, e.dst) for e in ms.graph.edges if e.src in inner and e.dst in inner)
    return list(nx.lexicographical_topological_sort(sub))


def _split_multisources(rec: _Recorder) -> None:
    """Out-split interior vertices with several out-edges, sink side first."""
    while True:
        ms = rec.ms
        multi = [u for u in _interior_order(ms) if ms.graph.out_degree(u) > 1]
        if not multi:
            return
        u = multi[-1]
        rec.run(out_split, {u: [[e.id] for e in ms.graph.out_edges(u)]})


def _split_merges(rec: _Recorder) -> None:
    """In-split interior vertices with several in-edges, source side first."""
    while True:
        ms = rec.ms
        multi = [u for u in _interior_order(ms) if ms.graph.in_degree(u) > 1]
        if not multi:
            return
        u = multi[0]
        rec.run(in_split, {u: [[e.id] for e in ms.graph.in_edges(u)]})


def _trail_edges_leaving(ms: MeteorStructure, u: int) -> list[int]:
    return [e.id for e in ms.graph.out_edges(u) if e.id not in ms.source_cycle_edges]


def _gather_sources(rec: _Recorder, v: int) -> None:
    """Walk trail sources back along the source cycle until all sit at ``v``."""
    while True:
        ms = rec.ms
        starts = [u for u in ms.source_order if u != v and _trail_edges_leaving(ms, u)]
        if not starts:
            return
        u = starts[-1]
        classes = [[ms.cycle_out_edge(u)]] + [[t] for t in _trail_edges_leaving(ms, u)]
        rec.run(out_split, {u: classes})


def _shorten_at_sink(rec: _Recorder) -> None:
    """In-amalgamate the last interior vertex of a long trail into the sink cycle."""
    while True:
        ms = rec.ms
        long_trails = [t for t in ms.trails if len(t) > 1]
        if not long_trails:
            return
        last = ms.graph.edge(long_trails[0][-1])
        rec.run(in_amalgamate, [[ms.sink_predecessor(last.dst), last.src]])


def is_quasi_normal(g: Graph) -> bool:
    ms = require_meteor(g)
    return all(len(t) == 1 for t in ms.trails)


def is_normal(g: Graph) -> bool:
    ms = require_meteor(g)
    return is_quasi_normal(g) and len({ms.graph.edge(t[0]).src for t in ms.trails}) == 1


def normalize(g: Graph) -> tuple[Graph, list[MoveRecord]]:
    """Normal form: every trail is one edge and all trails share one source.

    Phases: out-split interior multisources (sink side first); in-split
    interior vertices down to in-degree 1; move every trail source back to
    the source basepoint by out-splits on the source cycle; shorten trails
    by in-amalgamations at the sink cycle.
    """
    v = require_meteor(g).basepoint_v
    rec = _Recorder(g)
    _split_multisources(rec)
    _split_merges(rec)
    _gather_sources(rec, v)
    _shorten_at_sink(rec)
    return rec.g, rec.moves


def quasi_normalize(g: Graph) -> tuple[Graph, list[MoveRecord]]:
    """Quasi-normal form using only out-splits and out-amalgamations.

    Requires every interior vertex to have exactly one in-edge.
    """
    ms = require_meteor(g)
    bad = [u for u in ms.interior if g.in_degree(u) != 1]
    if bad:
        raise PreconditionError(f"interior vertices with in-degree != 1: {bad}")
    rec = _Recorder(g)
    _split_multisources(rec)
    while True:
        ms = rec.ms
        long_trails = [t for t in ms.trails if len(t) > 1]
        if not long_trails:
            break
        first = ms.graph.edge(long_trails[0][0])
        rec.run(out_amalgamate, [[ms.source_successor(first.src), first.dst]])
    return rec.g, rec.moves


# -- canonical form -------------------------------------------------------
def bezout_parameters(p: int, q: int) -> tuple[int, int]:
    """``(q_t, n)`` with ``q_t`` minimal positive, ``q_t*q = period (mod p)``
    and ``p + q_t*q = period + n*p``."""
    per = gcd(p, q)
    qt = next(k for k in range(1, p + 1) if (k * q - per) % p == 0)
    return qt, (p + qt * q - per) // p


def _composite(rec: _Recorder, edge: int) -> int:
    """Move the range of the one-edge trail ``edge`` back by one period.

    Lengthen by ``p`` at the source cycle, by ``q_t*q`` at the sink cycle,
    shorten by ``n*p`` at the source cycle and by ``period`` at the sink
    cycle. Returns the id of the resulting one-edge trail.
    """
    ms = rec.ms
    p, q, per = ms.p, ms.q, ms.period
    qt, n = bezout_parameters(p, q)
    first = last = edge
    for _ in range(p):
        ms = rec.ms
        s = ms.graph.edge(first).src
        others = [e.id for e in ms.graph.out_edges(s) if e.id != first]
        ce = ms.cycle_in_edge(s)
        r = rec.run(out_split, {s: [others, [first]]})
        first = r.edge_map()[ce][1]
    for _ in range(qt * q):
        ms = rec.ms
        r_ = ms.graph.edge(last).dst
        others = [e.id for e in ms.graph.in_edges(r_) if e.id != last]
        co = ms.cycle_out_edge(r_)
        r = rec.run(in_split, {r_: [others, [last]]})
        last = r.edge_map()[co][1]
    for _ in range(n * p):
        ms = rec.ms
        f = ms.graph.edge(first)
        (nxt,) = ms.graph.out_edges(f.dst)
        rec.run(out_amalgamate, [[ms.source_successor(f.src), f.dst]])
        first = nxt.id
    for _ in range(per):
        ms = rec.ms
        lst = ms.graph.edge(last)
        (prev,) = ms.graph.in_edges(lst.src)
        rec.run(in_amalgamate, [[ms.sink_predecessor(lst.dst), lst.src]])
        last = prev.id
    assert first == last
    return first


def canonical_basepoint_w(ms: MeteorStructure) -> int:
    """Sink basepoint making the raw counts equal their least rotation."""
    _, best = min_rotation(residue_counts(ms))
    t = (-best) % ms.period
    order = ms.sink_order
    return order[t % ms.q]


def canonicalize(g: Graph) -> tuple[Graph, list[MoveRecord], MeteorProfile]:
    """Normal form with every trail retuned to its canonical sink vertex."""
    prof = profile(require_meteor(g))
    h, moves = normalize(g)
    rec = _Recorder(h)
    rec.moves = list(moves)
    ms = rec.ms
    v = ms.graph.edge(ms.trails[0][0]).src if ms.trails else ms.basepoint_v
    ms = ms.with_basepoints(v=v)
    w = canonical_basepoint_w(ms)
    per, q = ms.period, ms.q
    for (eid,) in ms.trails:
        cur = rec.ms.with_basepoints(v=v, w=w)
        d = cur.sink_distance(cur.graph.edge(eid).dst, w)
        k = ((q - d + d % per) // per) % (q // per)
        for _ in range(k):
            eid = _composite(rec, eid)
    return rec.g, rec.moves, prof


def canonical_graph(prof: MeteorProfile) -> Graph:
    """The canonical representative of a profile.

    Source cycle ``a0 .. a{p-1}``, sink cycle ``b0 .. b{q-1}`` with basepoint
    ``b0``; each residue-``n`` trail is an edge from ``a0`` to the sink vertex
    ``(n - 1) mod period`` steps before ``b0``.
    """
    p, q = prof.p, prof.q
    verts = list(range(p + q))
    labels = {i: f"a{i}" for i in range(p)} | {p + i: f"b{i}" for i in range(q)}
    edges = [Edge(i, i, (i + 1) % p) for i in range(p)]
    edges += [Edge(p + i, p + i, p + (i + 1) % q) for i in range(q)]
    eid = p + q
    for n, count in enumerate(prof.counts):
        d = (n - 1) % prof.period
        target = p + (-d) % q
        for _ in range(count):
            edges.append(Edge(eid, 0, target))
            eid += 1
    return Graph(verts, edges, labels)


# -- witnesses ------------------------------------------------------------
@dataclass(frozen=True)
class Witness:
    moves: tuple[MoveRecord, ...]
    isomorphism: dict[int, int]

    def to_json(self) -> dict:
        return {
            "moves": [m.to_json() for m in self.moves],
            "isomorphism": {str(k): v for k, v in sorted(self.isomorphism.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "Witness":
        return cls(
            tuple(MoveRecord.from_json(m) for m in data["moves"]),
            {int(k): int(v) for k, v in data["isomorphism"].items()},
        )


def witness(g1: Graph, g2: Graph) -> Witness | None:
    """Moves taking ``g1`` to a graph isomorphic to ``g2``, or None if the
    two meteor graphs are not equivalent."""
    if profile(require_meteor(g1, "first graph")) != profile(require_meteor(g2, "second graph")):
        return None
    direct = is_isomorphic(g1, g2)
    if direct is not None:
        return Witness((), direct)
    c1, moves1, _ = canonicalize(g1)
    c2, moves2, _ = canonicalize(g2)
    iso = is_isomorphic(c2, c1)
    if iso is None:
        raise AssertionError("canonical graphs of equivalent inputs differ")
    back, end, vmap = undo_onto(g2, moves2, c1, iso, edge_bijection(c2, c1, iso))
    final = {b: a for a, b in vmap.items()}
    if not check_isomorphism(end, g2, final):
        raise AssertionError("witness replay is not isomorphic to the target")
    return Witness(tuple(moves1) + tuple(back), final)


def verify_witness(g1: Graph, g2: Graph, w: Witness) -> bool:
    """Replay ``w`` from ``g1`` and check its isomorphism onto ``g2``."""
    try:
        end = replay(g1, w.moves)
    except MoveError:
        return False
    return check_isomorphism(end, g2, w.isomorphism)


__all__ = [
    "NotMeteorError",
    "PreconditionError",
    "Witness",
    "bezout_parameters",
    "canonical_basepoint_w",
    "canonical_graph",
    "canonicalize",
    "is_normal",
    "is_quasi_normal",
    "normalize",
    "quasi_normalize",
    "verify_witness",
    "witness",
]
