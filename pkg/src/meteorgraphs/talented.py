"""The talented monoid T_E, leaf sets and Archimedean classes.

T_E is generated by symbols ``v(i)`` (vertex ``v``, integer shift ``i``)
subject to ``v(i) = sum over e in s^-1(v) of r(e)(i+1)`` for every non-sink
``v``. It is the graph monoid of the covering graph, whose vertices are the
pairs ``(v, i)``.

On a meteor graph every element has a unique presentation
``sum a_i v(j-i) + sum b_i w(i)`` (``0 <= i < p`` resp. ``q``) once the window
top ``j`` is fixed; :func:`vw_form` computes it with ``j`` maximal, and
:func:`talented_equal` compares two elements by pushing both into a common
window.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from math import lcm
from typing import Iterable, Mapping

from .graph import Cycle, Edge, Graph, GraphError, simple_cycles
from .meteor import MeteorStructure, require_meteor
from .monoid import FlowError, MonoidElement, Multiset, parse_terms
from .moves import IN_AMALGAMATION, IN_SPLIT, OUT_AMALGAMATION, OUT_SPLIT, MoveRecord, apply_move


class TalentedElement(Multiset):
    """Finitely supported multiset over ``(vertex, shift)`` pairs."""

    @classmethod
    def generator(cls, v: int, i: int = 0) -> "TalentedElement":
        return cls({(v, i): 1})

    def vertices(self) -> set[int]:
        return {v for (v, _), _c in self.items()}


def shift(x: TalentedElement, n: int) -> TalentedElement:
    """The Z-action ``v(i) -> v(i+n)``."""
    return TalentedElement([((v, i + n), c) for (v, i), c in x.items()])


def talented_flow_step(g: Graph, x: TalentedElement, at: tuple[int, int]) -> TalentedElement:
    v, i = at
    if x[at] < 1:
        raise FlowError(f"{at} is not in the support")
    if g.out_degree(v) == 0:
        raise FlowError(f"vertex {v} is a sink; flow is undefined")
    acc = dict(x.items())
    acc[at] -= 1
    for e in g.out_edges(v):
        key = (e.dst, i + 1)
        acc[key] = acc.get(key, 0) + 1
    return TalentedElement(acc)


def parse_talented_element(g: Graph, expr: str) -> TalentedElement:
    """Parse ``'2*v(0) + w(-3)'``; a bare name means shift 0."""
    acc: dict[tuple[int, int], int] = {}
    for coeff, name, sh in parse_terms(expr):
        try:
            v = g.vertex_by_label(name)
        except KeyError:
            raise ValueError(f"unknown vertex {name!r}") from None
        key = (v, 0 if sh is None else sh)
        acc[key] = acc.get(key, 0) + coeff
    return TalentedElement(acc)


def format_talented(g: Graph, x: TalentedElement) -> str:
    if not x:
        return "0"
    parts = []
    for (v, i), c in x.items():
        term = f"{g.label(v)}({i})"
        parts.append(term if c == 1 else f"{c}*{term}")
    return " + ".join(parts)


# -- covering graph -------------------------------------------------------
@dataclass(frozen=True)
class CoveringGraph:
    """Layers ``lo..hi`` of the covering graph, with the id correspondence."""

    graph: Graph
    base: Graph
    lo: int
    hi: int

    def vertex(self, v: int, i: int) -> int:
        if not self.lo <= i <= self.hi:
            raise KeyError(f"layer {i} outside window [{self.lo}, {self.hi}]")
        return (i - self.lo) * len(self.base.vertices) + self.base.vertices.index(v)

    def pair(self, cv: int) -> tuple[int, int]:
        layer, idx = divmod(cv, len(self.base.vertices))
        return self.base.vertices[idx], layer + self.lo

    def to_monoid(self, x: TalentedElement) -> MonoidElement:
        return MonoidElement([(self.vertex(v, i), c) for (v, i), c in x.items()])

    def to_talented(self, y: MonoidElement) -> TalentedElement:
        return TalentedElement([(self.pair(cv), c) for cv, c in y.items()])


def covering_graph(g: Graph, window: tuple[int, int]) -> CoveringGraph:
    """Vertices ``(v, i)`` for ``lo <= i <= hi``; edge ``(e, i)`` runs from
    ``(s(e), i)`` to ``(r(e), i+1)`` whenever both layers are in the window."""
    lo, hi = window
    if hi < lo:
        raise GraphError(f"empty window [{lo}, {hi}]")
    n = len(g.vertices)
    m = len(g.edges)
    verts, labels, edges = [], {}, []
    for layer in range(hi - lo + 1):
        for idx, v in enumerate(g.vertices):
            cv = layer * n + idx
            verts.append(cv)
            labels[cv] = f"{g.label(v)}({layer + lo})"
    index = {v: k for k, v in enumerate(g.vertices)}
    for layer in range(hi - lo):
        for k, e in enumerate(g.edges):
            edges.append(Edge(layer * m + k, layer * n + index[e.src], (layer + 1) * n + index[e.dst]))
    return CoveringGraph(Graph(verts, edges, labels), g, lo, hi)


# -- leaf sets ------------------------------------------------------------
def step_set(g: Graph, a: Iterable[int]) -> frozenset[int]:
    """``A^-> = r(s^-1(A))`` together with the sinks lying in ``A``."""
    out = set()
    for v in a:
        if g.out_degree(v) == 0:
            out.add(v)
        else:
            out.update(e.dst for e in g.out_edges(v))
    return frozenset(out)


def leaf_set(g: Graph, a: Iterable[int]) -> frozenset[int]:
    """``R(A)``: union of the sets on the eventual cycle of ``X -> X^->``."""
    x = frozenset(a)
    seen: dict[frozenset[int], int] = {}
    trajectory: list[frozenset[int]] = []
    while x not in seen:
        seen[x] = len(trajectory)
        trajectory.append(x)
        x = step_set(g, x)
    out: set[int] = set()
    for y in trajectory[seen[x]:]:
        out |= y
    return frozenset(out)


def is_hereditary(g: Graph, h: Iterable[int]) -> bool:
    h = set(h)
    return all(e.dst in h for v in h for e in g.out_edges(v))


def hereditary_closure(g: Graph, x: Iterable[int]) -> frozenset[int]:
    out = set(x)
    stack = list(out)
    while stack:
        v = stack.pop()
        for e in g.out_edges(v):
            if e.dst not in out:
                out.add(e.dst)
                stack.append(e.dst)
    return frozenset(out)


def saturation(g: Graph, x: Iterable[int]) -> frozenset[int]:
    """Smallest hereditary saturated set containing ``x``."""
    h = set(hereditary_closure(g, x))
    changed = True
    while changed:
        changed = False
        for v in g.vertices:
            if v in h or g.out_degree(v) == 0:
                continue
            if all(e.dst in h for e in g.out_edges(v)):
                h |= hereditary_closure(g, [v])
                changed = True
    return frozenset(h)


def is_saturated(g: Graph, h: Iterable[int]) -> bool:
    h = set(h)
    return all(
        v in h
        for v in g.vertices
        if g.out_degree(v) > 0 and all(e.dst in h for e in g.out_edges(v))
    )


def all_leaf_sets(g: Graph) -> set[frozenset[int]]:
    """The image of ``R`` over every vertex subset (exponential; small graphs only)."""
    vs = g.vertices
    out = set()
    for mask in range(1 << len(vs)):
        out.add(leaf_set(g, [v for k, v in enumerate(vs) if mask >> k & 1]))
    return out


def sink_cycle_closure(g: Graph, b: Iterable[int]) -> frozenset[int]:
    """Hereditary closure of the sinks and whole cycles lying inside ``b``."""
    b = frozenset(b)
    seeds = {v for v in b if g.out_degree(v) == 0}
    for c in simple_cycles(g):
        if c.vertex_set <= b:
            seeds |= c.vertex_set
    return hereditary_closure(g, seeds)


def archimedean_class(g: Graph, x: TalentedElement) -> frozenset[int]:
    """Leaf set of the support; equal leaf sets mean the same Archimedean class."""
    return leaf_set(g, x.vertices())


def in_order_ideal(g: Graph, x: TalentedElement, y: TalentedElement) -> bool:
    """Whether ``x`` lies in the order ideal generated by ``y``."""
    return archimedean_class(g, x) <= archimedean_class(g, y)


def minimal_periodic_orbits(g: Graph) -> list[Cycle]:
    """Cycles without exits."""
    return [c for c in simple_cycles(g) if all(g.out_degree(v) == 1 for v in c.vertex_order)]


# -- meteor graphs: v/w presentation ----------------------------------------
@dataclass(frozen=True)
class VWForm:
    """``sum a[i] v(j-i) + sum b[i] w(i)``; ``a[0] > 0`` unless ``a`` is zero."""

    j: int
    a: tuple[int, ...]
    b: tuple[int, ...]

    @property
    def has_v(self) -> bool:
        return any(self.a)

    def to_json(self) -> dict:
        return {"j": self.j, "a": list(self.a), "b": list(self.b)}


def _structure(g: Graph | MeteorStructure) -> MeteorStructure:
    return g if isinstance(g, MeteorStructure) else require_meteor(g)


def _reduce_to_cycles(
    ms: MeteorStructure, x: Mapping[tuple[int, int], int], rng: random.Random | None
) -> tuple[dict[int, int], list[int]]:
    """Flow everything off the sink cycle and off ``v`` until only ``v``-terms
    and ``w``-terms remain. Returns (v shift -> coeff, w residue counts)."""
    g = ms.graph
    v0 = ms.basepoint_v
    q = ms.q
    work = {k: c for k, c in x.items() if c}
    vterms: dict[int, int] = {}
    b = [0] * q
    while work:
        keys = sorted(work)
        key = rng.choice(keys) if rng is not None else keys[0]
        u, i = key
        c = work.pop(key)
        if u == v0:
            vterms[i] = vterms.get(i, 0) + c
        elif u in ms.sink_set:
            b[(i + ms.sink_distance(u, ms.basepoint_w)) % q] += c
        else:
            for e in g.out_edges(u):
                nk = (e.dst, i + 1)
                work[nk] = work.get(nk, 0) + c
    return vterms, b


@lru_cache(maxsize=512)
def push_template(ms: MeteorStructure) -> tuple[int, ...]:
    """w-residues produced by ``v(0) = v(p) + (w-terms)``."""
    acc: dict[tuple[int, int], int] = {}
    for e in ms.graph.out_edges(ms.basepoint_v):
        acc[(e.dst, 1)] = acc.get((e.dst, 1), 0) + 1
    vterms, b = _reduce_to_cycles(ms, acc, None)
    assert vterms == {ms.p: 1}, vterms
    return tuple(b)


def _slide(ms: MeteorStructure, form: VWForm) -> VWForm:
    """Raise the window top by one: ``v(j-p+1)`` is pushed to ``v(j+1)``."""
    p, q = ms.p, ms.q
    c = form.a[-1]
    b = list(form.b)
    if c:
        t = push_template(ms)
        off = form.j - p + 1
        for r, k in enumerate(t):
            if k:
                b[(r + off) % q] += c * k
    return VWForm(form.j + 1, (c,) + form.a[:-1], tuple(b))


def push_to(ms: Graph | MeteorStructure, form: VWForm, top: int) -> VWForm:
    """The same element presented with window top ``top >= form.j``."""
    ms = _structure(ms)
    if top < form.j:
        raise ValueError("pushing only moves the window upward")
    if not form.has_v:
        return VWForm(top, form.a, form.b)
    while form.j < top:
        form = _slide(ms, form)
    return form


def vw_form(g: Graph | MeteorStructure, x: TalentedElement, rng: random.Random | None = None) -> VWForm:
    """Normalized presentation of ``x`` with the largest possible window top.

    ``rng`` randomizes the order in which generators are rewritten; the
    result does not depend on it.
    """
    ms = _structure(g)
    p = ms.p
    vterms, b = _reduce_to_cycles(ms, dict(x.items()), rng)
    if not vterms:
        return VWForm(0, (0,) * p, tuple(b))
    j, lo = max(vterms), min(vterms)
    top = min(j, lo + p - 1)
    form = VWForm(top, tuple(vterms.get(top - i, 0) for i in range(p)), tuple(b))
    # slide the lowest window upward, absorbing higher terms as they enter
    while form.j < j:
        form = _slide(ms, form)
        extra = vterms.get(form.j, 0)
        if extra:
            form = VWForm(form.j, (form.a[0] + extra,) + form.a[1:], form.b)
    return form


def form_to_element(ms: Graph | MeteorStructure, form: VWForm) -> TalentedElement:
    ms = _structure(ms)
    acc: dict[tuple[int, int], int] = {}
    for i, c in enumerate(form.a):
        if c:
            acc[(ms.basepoint_v, form.j - i)] = c
    for i, c in enumerate(form.b):
        if c:
            acc[(ms.basepoint_w, i)] = acc.get((ms.basepoint_w, i), 0) + c
    return TalentedElement(acc)


def _aligned(ms: MeteorStructure, fx: VWForm, fy: VWForm) -> tuple[VWForm, VWForm]:
    top = max(fx.j, fy.j)
    return push_to(ms, fx, top), push_to(ms, fy, top)


def talented_equal(g: Graph | MeteorStructure, x: TalentedElement, y: TalentedElement) -> bool:
    """Exact equality in T_E for a meteor graph."""
    ms = _structure(g)
    fx, fy = vw_form(ms, x), vw_form(ms, y)
    if fx.has_v != fy.has_v:
        return False
    if not fx.has_v:
        return fx.b == fy.b
    fx, fy = _aligned(ms, fx, fy)
    return fx == fy


def talented_leq(g: Graph | MeteorStructure, x: TalentedElement, y: TalentedElement) -> bool:
    """Exact test of ``x <= y`` (``y = x + z`` for some z) in T_E for a meteor graph.

    Once both sides share a window, pushing further keeps the ``a`` parts
    in the same relation and never decreases ``b_y - b_x``, and after
    ``lcm(p, q)`` slides the increments repeat. So it suffices to try a
    bounded number of window tops.
    """
    ms = _structure(g)
    fx, fy = vw_form(ms, x), vw_form(ms, y)
    if fx.has_v and not fy.has_v:
        return False
    fx, fy = _aligned(ms, fx, fy)
    if any(ax > ay for ax, ay in zip(fx.a, fy.a)):
        return False
    deficit = sum(max(bx - by, 0) for bx, by in zip(fx.b, fy.b))
    rounds = lcm(ms.p, ms.q) * (deficit + 1) if fy.has_v else 0
    for _ in range(rounds + 1):
        if all(bx <= by for bx, by in zip(fx.b, fy.b)):
            return True
        fx = push_to(ms, fx, fx.j + 1)
        fy = push_to(ms, fy, fy.j + 1)
    return False


def minimum_element(g: Graph | MeteorStructure) -> TalentedElement:
    """``w(0)``: every nonzero element dominates some shift of it."""
    ms = _structure(g)
    return TalentedElement.generator(ms.basepoint_w, 0)


# -- move-induced monoid maps ----------------------------------------------
def move_monoid_map(record: MoveRecord, g_before: Graph, x: TalentedElement) -> TalentedElement:
    """Image of ``x`` under the Z-monoid isomorphism T_before -> T_after induced by a move.

    Out-splits send ``u`` to the sum of its copies, in-splits to its first
    copy; in-amalgamations send a copy to its block; out-amalgamations send
    a copy to the flow of its own out-edges one layer up.
    """
    vmap = record.vertex_map()
    acc: dict[tuple[int, int], int] = {}

    def add(key, c):
        acc[key] = acc.get(key, 0) + c

    if record.kind == OUT_SPLIT:
        for (u, i), c in x.items():
            for cp in vmap[u]:
                add((cp, i), c)
    elif record.kind == IN_SPLIT:
        for (u, i), c in x.items():
            add((vmap[u][0], i), c)
    elif record.kind == IN_AMALGAMATION:
        for (u, i), c in x.items():
            add((vmap[u][0], i), c)
    elif record.kind == OUT_AMALGAMATION:
        merged = {v for b in record.blocks for v in b}
        emap = record.edge_map()
        g_after, _ = apply_move(g_before, record)
        for (u, i), c in x.items():
            if u not in merged:
                add((vmap[u][0], i), c)
                continue
            targets = sorted({emap[e.id][0] for e in g_before.out_edges(u)})
            for eid in targets:
                add((g_after.edge(eid).dst, i + 1), c)
    else:
        raise ValueError(f"unknown move kind {record.kind!r}")
    return TalentedElement(acc)


def order_unit(g: Graph) -> TalentedElement:
    """``sum of v(0)`` over all vertices."""
    return TalentedElement({(v, 0): 1 for v in g.vertices})
