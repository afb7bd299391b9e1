"""In-/out-splits and their inverse amalgamations as recorded graph moves.

Id discipline: the first copy of a split vertex (or edge) keeps the original
id; further copies get fresh ids counted upward from the current maximum, in
ascending order of the split vertex and class index (edges: ascending edge
id, then copy index). Amalgamation keeps the representative, which is the
first member listed in each block. With these rules replaying a record is
fully deterministic, and ``amalgamate(split(g))`` gives back ``g`` exactly.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .graph import Edge, Graph, edge_bijection, transpose

IN_SPLIT = "in_split"
OUT_SPLIT = "out_split"
IN_AMALGAMATION = "in_amalgamation"
OUT_AMALGAMATION = "out_amalgamation"
KINDS = (IN_SPLIT, OUT_SPLIT, IN_AMALGAMATION, OUT_AMALGAMATION)


class MoveError(ValueError):
    """A move cannot be applied to the given graph."""


class InvalidPartitionError(MoveError):
    pass


class EmptyClassError(InvalidPartitionError):
    pass


class OverlapError(InvalidPartitionError):
    pass


class CoverError(InvalidPartitionError):
    pass


class AmalgamationError(MoveError):
    def __init__(self, message: str, block: Sequence[int] = ()):
        self.block = tuple(block)
        super().__init__(message)


class ReplayError(MoveError):
    def __init__(self, index: int, cause: MoveError):
        self.index = index
        self.cause = cause
        super().__init__(f"move {index}: {cause}")


@dataclass(frozen=True, eq=True)
class MoveRecord:
    """One replayable graph move.

    ``partition`` (splits) maps each split vertex to its ordered edge classes;
    ``blocks`` (amalgamations) lists the merged vertex groups, representative
    first. ``id_map`` maps every old vertex/edge id to the list of new ids it
    became (several for split copies, one otherwise).
    """

    kind: str
    site: tuple[int, ...]
    partition: Mapping[int, tuple[tuple[int, ...], ...]] = field(default_factory=dict)
    blocks: tuple[tuple[int, ...], ...] = ()
    id_map: Mapping[str, Mapping[int, tuple[int, ...]]] = field(default_factory=dict)

    @property
    def is_split(self) -> bool:
        return self.kind in (IN_SPLIT, OUT_SPLIT)

    def vertex_map(self) -> dict[int, tuple[int, ...]]:
        return dict(self.id_map.get("vertices", {}))

    def edge_map(self) -> dict[int, tuple[int, ...]]:
        return dict(self.id_map.get("edges", {}))

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "site": list(self.site)}
        if self.is_split:
            out["partition"] = {str(v): [list(c) for c in cls] for v, cls in self.partition.items()}
        else:
            out["block_map"] = [list(b) for b in self.blocks]
        out["id_map"] = {
            part: {str(k): list(v) for k, v in mapping.items()}
            for part, mapping in self.id_map.items()
        }
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "MoveRecord":
        try:
            kind = data["kind"]
            if kind not in KINDS:
                raise MoveError(f"unknown move kind {kind!r}")
            partition = {
                int(v): tuple(tuple(int(e) for e in c) for c in classes)
                for v, classes in data.get("partition", {}).items()
            }
            blocks = tuple(tuple(int(v) for v in b) for b in data.get("block_map", []))
            id_map = {
                part: {int(k): tuple(int(x) for x in v) for k, v in mapping.items()}
                for part, mapping in data.get("id_map", {}).items()
            }
            return cls(kind, tuple(int(s) for s in data.get("site", [])), partition, blocks, id_map)
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            if isinstance(exc, MoveError):
                raise
            raise MoveError(f"malformed move record: {exc}") from exc


# -- label helpers --------------------------------------------------------
_COPY_SUFFIX = re.compile(r"^(.*)\.(\d+)$")


def _copy_label(base: str, i: int, m: int) -> str:
    return base if m == 1 else f"{base}.{i + 1}"


def _merged_label(labels: Sequence[str]) -> str:
    bases = set()
    for s in labels:
        match = _COPY_SUFFIX.match(s)
        bases.add(match.group(1) if match else None)
    if len(bases) == 1 and None not in bases and len(labels) > 1:
        return bases.pop()
    return labels[0]


# -- splits ---------------------------------------------------------------
def _normalize_partition(partition: Mapping[int, Iterable[Iterable[int]]]) -> dict[int, tuple[tuple[int, ...], ...]]:
    return {int(v): tuple(tuple(c) for c in classes) for v, classes in sorted(partition.items())}


def _validate_in_partition(g: Graph, partition: Mapping[int, Sequence[Sequence[int]]]) -> None:
    for v, classes in partition.items():
        if not g.has_vertex(v):
            raise InvalidPartitionError(f"vertex {v} is not in the graph")
        incoming = {e.id for e in g.in_edges(v)}
        seen: set[int] = set()
        for k, cls in enumerate(classes):
            if not cls:
                raise EmptyClassError(f"class {k} of vertex {v} is empty")
            for eid in cls:
                if eid in seen:
                    raise OverlapError(f"edge {eid} appears in two classes of vertex {v}")
                seen.add(eid)
        if seen != incoming:
            missing = sorted(incoming - seen)
            extra = sorted(seen - incoming)
            raise CoverError(
                f"classes of vertex {v} do not cover its edge set (missing {missing}, foreign {extra})"
            )


def _in_split_raw(g: Graph, partition: dict[int, tuple[tuple[int, ...], ...]]):
    _validate_in_partition(g, partition)
    mult = {v: (len(partition[v]) if partition.get(v) else 1) for v in g.vertices}
    class_of: dict[int, int] = {}
    for v, classes in partition.items():
        for k, cls in enumerate(classes):
            for eid in cls:
                class_of[eid] = k

    next_v = g.max_vertex_id() + 1
    copies: dict[int, tuple[int, ...]] = {}
    for v in g.vertices:
        ids = [v]
        for _ in range(1, mult[v]):
            ids.append(next_v)
            next_v += 1
        copies[v] = tuple(ids)

    next_e = g.max_edge_id() + 1
    new_edges: list[Edge] = []
    ecopies: dict[int, tuple[int, ...]] = {}
    elabels: dict[int, str] = {}
    for e in g.edges:
        m = mult[e.src]
        ids = []
        for j in range(m):
            if j == 0:
                eid = e.id
            else:
                eid = next_e
                next_e += 1
            ids.append(eid)
            new_edges.append(Edge(eid, copies[e.src][j], copies[e.dst][class_of.get(e.id, 0)]))
            elabels[eid] = _copy_label(g.edge_label(e.id), j, m)
        ecopies[e.id] = tuple(ids)

    vlabels = {}
    for v in g.vertices:
        for i, c in enumerate(copies[v]):
            vlabels[c] = _copy_label(g.label(v), i, mult[v])
    new_vertices = [c for v in g.vertices for c in copies[v]]
    h = Graph(new_vertices, new_edges, vlabels, elabels)
    return h, {"vertices": copies, "edges": ecopies}


def in_split(g: Graph, partition: Mapping[int, Iterable[Iterable[int]]]) -> tuple[Graph, MoveRecord]:
    """Split each partitioned vertex into one copy per class of its in-edges.

    Vertices left out of ``partition`` get the one-class partition. Copies of
    a vertex share its out-edges; an in-edge in class ``i`` lands on copy ``i``.
    """
    part = _normalize_partition(partition)
    h, id_map = _in_split_raw(g, part)
    site = tuple(v for v, cls in part.items() if cls)
    return h, MoveRecord(IN_SPLIT, site, part, (), id_map)


def out_split(g: Graph, partition: Mapping[int, Iterable[Iterable[int]]]) -> tuple[Graph, MoveRecord]:
    """Dual of :func:`in_split`: partition out-edges instead of in-edges."""
    part = _normalize_partition(partition)
    h, id_map = _in_split_raw(transpose(g), part)
    site = tuple(v for v, cls in part.items() if cls)
    return transpose(h), MoveRecord(OUT_SPLIT, site, part, (), id_map)


# -- amalgamations --------------------------------------------------------
def _complete_blocks(g: Graph, blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    out = []
    seen: set[int] = set()
    for b in blocks:
        b = tuple(b)
        if not b:
            raise AmalgamationError("empty block", b)
        for v in b:
            if not g.has_vertex(v):
                raise AmalgamationError(f"vertex {v} is not in the graph", b)
            if v in seen:
                raise AmalgamationError(f"vertex {v} appears in two blocks", b)
            seen.add(v)
        if len(b) > 1:
            out.append(b)
    return tuple(out)


def in_amalgamation_blocker(g: Graph, block: Sequence[int]) -> str | None:
    """Why ``block`` cannot be in-amalgamated, or None when it can."""
    if len(block) < 2:
        return None
    ref = Counter(e.dst for e in g.out_edges(block[0]))
    for v in block:
        if g.in_degree(v) == 0:
            return f"vertex {v} has no in-edges"
        if Counter(e.dst for e in g.out_edges(v)) != ref:
            return f"out-edges of {v} and {block[0]} do not match"
    return None


def _in_amalgamate_raw(g: Graph, blocks: tuple[tuple[int, ...], ...]):
    for b in blocks:
        why = in_amalgamation_blocker(g, b)
        if why:
            raise AmalgamationError(f"invalid block {list(b)}: {why}", b)
    rep = {v: v for v in g.vertices}
    for b in blocks:
        for v in b:
            rep[v] = b[0]

    kept: list[Edge] = []
    emap: dict[int, tuple[int, ...]] = {}
    for e in g.edges:
        if rep[e.src] == e.src:
            kept.append(Edge(e.id, e.src, rep[e.dst]))
            emap[e.id] = (e.id,)
    for b in blocks:
        ref = sorted(g.out_edges(b[0]), key=lambda e: (e.dst, e.id))
        for v in b[1:]:
            mine = sorted(g.out_edges(v), key=lambda e: (e.dst, e.id))
            for e, r in zip(mine, ref):
                emap[e.id] = (r.id,)

    vlabels = {v: g.label(v) for v in g.vertices if rep[v] == v}
    for b in blocks:
        vlabels[b[0]] = _merged_label([g.label(v) for v in b])
    elabels = {e.id: g.edge_label(e.id) for e in kept}
    h = Graph([v for v in g.vertices if rep[v] == v], kept, vlabels, elabels)
    vmap = {v: (rep[v],) for v in g.vertices}
    return h, {"vertices": vmap, "edges": dict(sorted(emap.items()))}


def in_amalgamate(g: Graph, blocks: Iterable[Iterable[int]]) -> tuple[Graph, MoveRecord]:
    """Merge each block into its first member, inverting an in-split.

    Valid only when all members of a block have the same multiset of out-edge
    destinations and each has at least one in-edge.
    """
    bl = _complete_blocks(g, blocks)
    h, id_map = _in_amalgamate_raw(g, bl)
    return h, MoveRecord(IN_AMALGAMATION, tuple(b[0] for b in bl), {}, bl, id_map)


def out_amalgamation_blocker(g: Graph, block: Sequence[int]) -> str | None:
    return in_amalgamation_blocker(transpose(g), block)


def out_amalgamate(g: Graph, blocks: Iterable[Iterable[int]]) -> tuple[Graph, MoveRecord]:
    """Dual of :func:`in_amalgamate` (matching in-edge sources)."""
    bl = _complete_blocks(g, blocks)
    h, id_map = _in_amalgamate_raw(transpose(g), bl)
    return transpose(h), MoveRecord(OUT_AMALGAMATION, tuple(b[0] for b in bl), {}, bl, id_map)


# -- replay / inversion ---------------------------------------------------
def apply_move(g: Graph, record: MoveRecord) -> tuple[Graph, MoveRecord]:
    """Re-execute ``record`` on ``g``; a recorded id_map must be reproduced."""
    if record.kind == IN_SPLIT:
        h, fresh = in_split(g, record.partition)
    elif record.kind == OUT_SPLIT:
        h, fresh = out_split(g, record.partition)
    elif record.kind == IN_AMALGAMATION:
        h, fresh = in_amalgamate(g, record.blocks)
    elif record.kind == OUT_AMALGAMATION:
        h, fresh = out_amalgamate(g, record.blocks)
    else:
        raise MoveError(f"unknown move kind {record.kind!r}")
    if record.id_map and _plain(record.id_map) != _plain(fresh.id_map):
        raise MoveError("recorded id_map does not match the graph")
    return h, fresh


def _plain(id_map) -> dict:
    return {k: {int(a): tuple(b) for a, b in v.items()} for k, v in id_map.items()}


def replay(g: Graph, seq: Sequence[MoveRecord]) -> Graph:
    for i, rec in enumerate(seq):
        try:
            g, _ = apply_move(g, rec)
        except MoveError as exc:
            raise ReplayError(i, exc) from exc
    return g


def replay_trace(g: Graph, seq: Sequence[MoveRecord]) -> list[Graph]:
    """All intermediate graphs, ``[g, g1, ..., gk]``."""
    out = [g]
    for i, rec in enumerate(seq):
        try:
            g, _ = apply_move(g, rec)
        except MoveError as exc:
            raise ReplayError(i, exc) from exc
        out.append(g)
    return out


def inverse_move(record: MoveRecord, g_before: Graph) -> MoveRecord:
    """A record undoing ``record``, expressed on the graph it produced.

    Inverting a split restores ``g_before`` exactly; inverting an
    amalgamation restores it up to the ids of the re-created copies.
    """
    if record.is_split:
        blocks = tuple(c for c in record.vertex_map().values() if len(c) > 1)
        kind = IN_AMALGAMATION if record.kind == IN_SPLIT else OUT_AMALGAMATION
        return MoveRecord(kind, tuple(b[0] for b in blocks), {}, blocks, {})
    g = g_before if record.kind == IN_AMALGAMATION else transpose(g_before)
    vmap = record.vertex_map()
    partition = {}
    for b in record.blocks:
        # edges that survive the merge are exactly those leaving representatives
        partition[b[0]] = tuple(
            tuple(sorted(e.id for e in g.in_edges(member) if vmap.get(e.src, (e.src,))[0] == e.src))
            for member in b
        )
    kind = IN_SPLIT if record.kind == IN_AMALGAMATION else OUT_SPLIT
    return MoveRecord(kind, tuple(partition), partition, (), {})


def _translate(record: MoveRecord, vmap: Mapping[int, int], emap: Mapping[int, int]) -> MoveRecord:
    """``record`` with every vertex/edge id renamed; id_map is dropped."""
    if record.is_split:
        part = {vmap[v]: tuple(tuple(emap[e] for e in c) for c in cls) for v, cls in record.partition.items()}
        return MoveRecord(record.kind, tuple(vmap[v] for v in record.site), part, (), {})
    blocks = tuple(tuple(vmap[v] for v in b) for b in record.blocks)
    return MoveRecord(record.kind, tuple(b[0] for b in blocks), {}, blocks, {})


def undo_onto(
    g: Graph,
    seq: Sequence[MoveRecord],
    start: Graph,
    vmap: Mapping[int, int],
    emap: Mapping[int, int],
) -> tuple[list[MoveRecord], Graph, dict[int, int]]:
    """Undo ``seq`` on a graph ``start`` isomorphic to ``replay(g, seq)``.

    ``vmap``/``emap`` identify ``replay(g, seq)`` with ``start``. Re-created
    split copies get fresh ids, so the identification is carried along move
    by move. Returns the applied records, the final graph and a vertex
    isomorphism from ``g`` onto it.
    """
    trace = replay_trace(g, seq)
    seq = [apply_move(before, rec)[1] for before, rec in zip(trace, seq)]
    vmap, emap = dict(vmap), dict(emap)
    cur = start
    out: list[MoveRecord] = []
    for fwd, before in zip(reversed(seq), reversed(trace[:-1])):
        inv = _translate(inverse_move(fwd, before), vmap, emap)
        cur, mine = apply_move(cur, inv)
        out.append(mine)
        mv = mine.vertex_map()
        if fwd.is_split:
            nv = {x: mv[vmap[fwd.vertex_map()[x][0]]][0] for x in before.vertices}
        else:
            nv = {}
            for b in fwd.blocks:
                for k, x in enumerate(b):
                    nv[x] = mv[vmap[b[0]]][k]
            for x in before.vertices:
                if x not in nv:
                    nv[x] = mv[vmap[x]][0]
        vmap = nv
        emap = edge_bijection(before, cur, vmap)
    return out, cur, vmap


def inverse_sequence(g: Graph, seq: Sequence[MoveRecord]) -> list[MoveRecord]:
    """Records taking ``replay(g, seq)`` back to a graph isomorphic to ``g``."""
    end = replay(g, seq)
    ident_v = {v: v for v in end.vertices}
    ident_e = {e.id: e.id for e in end.edges}
    return undo_onto(g, seq, end, ident_v, ident_e)[0]


# -- candidate enumeration ------------------------------------------------
def amalgamation_groups(g: Graph, kind: str) -> list[tuple[int, ...]]:
    """Maximal vertex groups that may be merged by an in- or out-amalgamation."""
    h = g if kind == IN_AMALGAMATION else transpose(g)
    groups: dict[tuple, list[int]] = {}
    for v in h.vertices:
        if h.in_degree(v) == 0:
            continue
        key = tuple(sorted(Counter(e.dst for e in h.out_edges(v)).items()))
        groups.setdefault(key, []).append(v)
    return [tuple(vs) for vs in groups.values() if len(vs) > 1]
