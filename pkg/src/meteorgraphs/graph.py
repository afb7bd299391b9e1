"""Finite directed multigraphs with stable integer ids.

A :class:`Graph` is an immutable value: a set of vertex ids, a set of edge
records ``(id, src, dst)`` and optional human-readable labels. Parallel edges
and self-loops are allowed. Vertices are always kept in ascending id order,
which fixes the row/column order of :func:`adjacency_matrix`.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

import networkx as nx

from .matrix import IntMatrix


class GraphError(ValueError):
    """Raised when a graph is structurally invalid."""


@dataclass(frozen=True, order=True)
class Edge:
    id: int
    src: int
    dst: int


class Graph:
    """Immutable finite directed multigraph."""

    __slots__ = ("_vertices", "_edges", "_by_id", "_out", "_in", "_vlabels", "_elabels")

    def __init__(
        self,
        vertices: Iterable[int],
        edges: Iterable[Edge | tuple[int, int, int]],
        vertex_labels: Mapping[int, str] | None = None,
        edge_labels: Mapping[int, str] | None = None,
    ):
        vs = list(vertices)
        if len(set(vs)) != len(vs):
            raise GraphError("duplicate vertex id")
        self._vertices = tuple(sorted(vs))
        es = [e if isinstance(e, Edge) else Edge(*e) for e in edges]
        es.sort(key=lambda e: e.id)
        by_id: dict[int, Edge] = {}
        vset = set(self._vertices)
        out: dict[int, list[Edge]] = {v: [] for v in self._vertices}
        inn: dict[int, list[Edge]] = {v: [] for v in self._vertices}
        for e in es:
            if e.id in by_id:
                raise GraphError(f"duplicate edge id {e.id}")
            if e.src not in vset or e.dst not in vset:
                raise GraphError(f"edge {e.id} has an endpoint outside the vertex set")
            by_id[e.id] = e
            out[e.src].append(e)
            inn[e.dst].append(e)
        self._edges = tuple(es)
        self._by_id = by_id
        self._out = {v: tuple(x) for v, x in out.items()}
        self._in = {v: tuple(x) for v, x in inn.items()}
        self._vlabels = {v: vertex_labels[v] for v in self._vertices if vertex_labels and v in vertex_labels}
        self._elabels = {e.id: edge_labels[e.id] for e in es if edge_labels and e.id in edge_labels}

    # -- basic access -----------------------------------------------------
    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def edge(self, eid: int) -> Edge:
        return self._by_id[eid]

    def has_vertex(self, v: int) -> bool:
        return v in self._out

    def has_edge(self, eid: int) -> bool:
        return eid in self._by_id

    def out_edges(self, v: int) -> tuple[Edge, ...]:
        return self._out[v]

    def in_edges(self, v: int) -> tuple[Edge, ...]:
        return self._in[v]

    def out_degree(self, v: int) -> int:
        return len(self._out[v])

    def in_degree(self, v: int) -> int:
        return len(self._in[v])

    def successors(self, v: int) -> list[int]:
        return [e.dst for e in self._out[v]]

    def label(self, v: int) -> str:
        return self._vlabels.get(v, str(v))

    def edge_label(self, eid: int) -> str:
        return self._elabels.get(eid, f"e{eid}")

    @property
    def vertex_labels(self) -> dict[int, str]:
        return dict(self._vlabels)

    @property
    def edge_labels(self) -> dict[int, str]:
        return dict(self._elabels)

    def vertex_by_label(self, name: str) -> int:
        for v in self._vertices:
            if self.label(v) == name:
                return v
        raise KeyError(name)

    def max_vertex_id(self) -> int:
        return self._vertices[-1] if self._vertices else -1

    def max_edge_id(self) -> int:
        return self._edges[-1].id if self._edges else -1

    def __len__(self) -> int:
        return len(self._vertices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._vertices, self._edges))

    def __repr__(self) -> str:
        return f"Graph(|V|={len(self._vertices)}, |E|={len(self._edges)})"

    def to_networkx(self) -> nx.MultiDiGraph:
        nxg = nx.MultiDiGraph()
        nxg.add_nodes_from(self._vertices)
        for e in self._edges:
            nxg.add_edge(e.src, e.dst, key=e.id)
        return nxg


@dataclass(frozen=True)
class Cycle:
    """A simple closed path, rotated so its smallest vertex id comes first."""

    edges: tuple[int, ...]
    vertex_order: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertex_order)


@dataclass(frozen=True)
class SccDecomposition:
    components: tuple[frozenset[int], ...]
    condensation: frozenset[tuple[int, int]]

    def component_of(self, v: int) -> int:
        for i, c in enumerate(self.components):
            if v in c:
                return i
        raise KeyError(v)


# -- constructors ---------------------------------------------------------
def adjacency_matrix(g: Graph) -> IntMatrix:
    index = {v: i for i, v in enumerate(g.vertices)}
    n = len(index)
    rows = [[0] * n for _ in range(n)]
    for e in g.edges:
        rows[index[e.src]][index[e.dst]] += 1
    return IntMatrix(rows)


def graph_from_matrix(m: IntMatrix, vertex_labels: Mapping[int, str] | None = None) -> Graph:
    """Graph with ``m[i][j]`` parallel edges i -> j; edge ids in row-major order."""
    if not m.is_square():
        raise GraphError(f"adjacency matrix must be square, got {m.shape}")
    edges = []
    eid = 0
    for i, row in enumerate(m.rows):
        for j, k in enumerate(row):
            for _ in range(k):
                edges.append(Edge(eid, i, j))
                eid += 1
    return Graph(range(m.nrows), edges, vertex_labels=vertex_labels)


def transpose(g: Graph) -> Graph:
    return Graph(
        g.vertices,
        [Edge(e.id, e.dst, e.src) for e in g.edges],
        g.vertex_labels,
        g.edge_labels,
    )


def relabel(g: Graph, vmap: Mapping[int, int], emap: Mapping[int, int] | None = None) -> Graph:
    """Rename vertex (and optionally edge) ids; labels follow their objects."""
    emap = emap or {e.id: e.id for e in g.edges}
    return Graph(
        [vmap[v] for v in g.vertices],
        [Edge(emap[e.id], vmap[e.src], vmap[e.dst]) for e in g.edges],
        {vmap[v]: s for v, s in g.vertex_labels.items()},
        {emap[k]: s for k, s in g.edge_labels.items()},
    )


# -- structural queries ---------------------------------------------------
def is_essential(g: Graph) -> bool:
    """No sinks and no sources. The graph with no vertices is not essential."""
    if not g.vertices:
        return False
    return all(g.out_degree(v) >= 1 and g.in_degree(v) >= 1 for v in g.vertices)


def sinks(g: Graph) -> list[int]:
    return [v for v in g.vertices if g.out_degree(v) == 0]


def sources(g: Graph) -> list[int]:
    return [v for v in g.vertices if g.in_degree(v) == 0]


def reachable(g: Graph, start: Iterable[int], reverse: bool = False) -> set[int]:
    """Vertices reachable from ``start`` by paths of length >= 0."""
    seen = set(start)
    stack = list(seen)
    while stack:
        v = stack.pop()
        nxt = [e.src for e in g.in_edges(v)] if reverse else [e.dst for e in g.out_edges(v)]
        for u in nxt:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def is_weakly_connected(g: Graph) -> bool:
    if not g.vertices:
        return False
    return nx.is_weakly_connected(g.to_networkx())


def scc_decomposition(g: Graph) -> SccDecomposition:
    """Strongly connected components in topological order of the condensation.

    Ties in the topological order are broken by the smallest vertex id of
    each component, so the result is deterministic.
    """
    nxg = g.to_networkx()
    comps = [frozenset(c) for c in nx.strongly_connected_components(nxg)]
    cond = nx.condensation(nx.DiGraph(nxg), scc=comps)
    order = list(nx.lexicographical_topological_sort(cond, key=lambda i: min(comps[i])))
    pos = {old: new for new, old in enumerate(order)}
    components = tuple(comps[i] for i in order)
    edges = frozenset((pos[a], pos[b]) for a, b in cond.edges)
    return SccDecomposition(components, edges)


def is_nontrivial_scc(g: Graph, comp: frozenset[int]) -> bool:
    if len(comp) > 1:
        return True
    (v,) = comp
    return any(e.dst == v for e in g.out_edges(v))


def _rotate_min_first(vertex_cycle: list[int]) -> list[int]:
    k = vertex_cycle.index(min(vertex_cycle))
    return vertex_cycle[k:] + vertex_cycle[:k]


def simple_cycles(g: Graph) -> list[Cycle]:
    """All simple cycles; parallel edges yield distinct cycles."""
    simple = nx.DiGraph()
    simple.add_nodes_from(g.vertices)
    simple.add_edges_from((e.src, e.dst) for e in g.edges)
    out: list[Cycle] = []
    for vc in nx.simple_cycles(simple):
        vc = _rotate_min_first(list(vc))
        hops = []
        for i, v in enumerate(vc):
            w = vc[(i + 1) % len(vc)]
            hops.append([e.id for e in g.out_edges(v) if e.dst == w])
        for choice in product(*hops):
            out.append(Cycle(tuple(choice), tuple(vc)))
    out.sort(key=lambda c: (len(c), c.vertex_order, c.edges))
    return out


def induced_cycle(g: Graph, comp: Iterable[int]) -> Cycle | None:
    """The cycle formed by ``comp`` when every member has exactly one edge
    staying inside ``comp`` and those edges close up into a single cycle."""
    comp = set(comp)
    nxt: dict[int, int] = {}
    via: dict[int, int] = {}
    for v in comp:
        inside = [e for e in g.out_edges(v) if e.dst in comp]
        if len(inside) != 1:
            return None
        nxt[v] = inside[0].dst
        via[v] = inside[0].id
    start = min(comp)
    order = [start]
    while nxt[order[-1]] != start:
        order.append(nxt[order[-1]])
        if len(order) > len(comp):
            return None
    if len(order) != len(comp):
        return None
    return Cycle(tuple(via[v] for v in order), tuple(order))


# -- isomorphism ----------------------------------------------------------
def _multiplicities(g: Graph) -> dict[tuple[int, int], int]:
    return Counter((e.src, e.dst) for e in g.edges)


def _invariant(g: Graph, mult, v: int) -> tuple[int, int, int]:
    return (g.out_degree(v), g.in_degree(v), mult.get((v, v), 0))


def is_isomorphic(g: Graph, h: Graph) -> dict[int, int] | None:
    """A vertex bijection g -> h preserving edge multiplicities, or None.

    Plain backtracking with degree/loop-count pruning; meant for the small
    graphs that appear as witness endpoints.
    """
    if len(g.vertices) != len(h.vertices) or len(g.edges) != len(h.edges):
        return None
    mg, mh = _multiplicities(g), _multiplicities(h)
    if sorted(mg.values()) != sorted(mh.values()):
        return None
    inv_g = {v: _invariant(g, mg, v) for v in g.vertices}
    inv_h = {v: _invariant(h, mh, v) for v in h.vertices}
    if Counter(inv_g.values()) != Counter(inv_h.values()):
        return None

    # most constrained first, then follow adjacency so checks bite early
    rarity = Counter(inv_g.values())
    order: list[int] = []
    remaining = set(g.vertices)
    while remaining:
        frontier = [v for v in remaining if any(
            (v, u) in mg or (u, v) in mg for u in order)]
        pool = frontier or list(remaining)
        v = min(pool, key=lambda x: (rarity[inv_g[x]], x))
        order.append(v)
        remaining.remove(v)

    candidates = {v: [w for w in h.vertices if inv_h[w] == inv_g[v]] for v in g.vertices}
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def consistent(v: int, w: int) -> bool:
        for u, x in mapping.items():
            if mg.get((v, u), 0) != mh.get((w, x), 0):
                return False
            if mg.get((u, v), 0) != mh.get((x, w), 0):
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in candidates[v]:
            if w in used or not consistent(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if search(i + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    return dict(mapping) if search(0) else None


def edge_bijection(g: Graph, h: Graph, vmap: Mapping[int, int]) -> dict[int, int]:
    """Extend a vertex isomorphism to edges by pairing parallel edges in id order."""
    buckets: dict[tuple[int, int], list[int]] = {}
    for e in h.edges:
        buckets.setdefault((e.src, e.dst), []).append(e.id)
    emap = {}
    for e in g.edges:
        bucket = buckets.get((vmap[e.src], vmap[e.dst]))
        if not bucket:
            raise GraphError("vertex map is not an isomorphism")
        emap[e.id] = bucket.pop(0)
    return emap


def check_isomorphism(g: Graph, h: Graph, vmap: Mapping[int, int]) -> bool:
    if sorted(vmap) != list(g.vertices) or sorted(vmap.values()) != list(h.vertices):
        return False
    mg = Counter((vmap[e.src], vmap[e.dst]) for e in g.edges)
    return mg == _multiplicities(h)
