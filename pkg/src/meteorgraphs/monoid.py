"""The graph monoid M_E: free commutative monoid on vertices modulo flow.

Elements are finitely supported multisets. Equality in M_E is only
semi-decided here, by growing flow closures from both sides until they meet
(confluence); a bounded search may honestly answer ``unknown``.
"""

from __future__ import annotations

import enum
import re
from typing import Hashable, Iterable, Iterator, Mapping

from .graph import Graph


class FlowError(ValueError):
    pass


class Multiset:
    """Immutable finitely supported map key -> positive int."""

    __slots__ = ("_items", "_hash")

    def __init__(self, coefficients: Mapping[Hashable, int] | Iterable[tuple[Hashable, int]] = ()):
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        acc: dict = {}
        for k, c in items:
            if c < 0:
                raise ValueError("coefficients must be nonnegative")
            if c:
                acc[k] = acc.get(k, 0) + c
        self._items = tuple(sorted(acc.items()))
        self._hash = hash(self._items)

    @classmethod
    def of(cls, *keys: Hashable):
        acc: dict = {}
        for k in keys:
            acc[k] = acc.get(k, 0) + 1
        return cls(acc)

    def items(self) -> tuple:
        return self._items

    def support(self) -> list:
        return [k for k, _ in self._items]

    def __getitem__(self, key) -> int:
        for k, c in self._items:
            if k == key:
                return c
        return 0

    def __iter__(self) -> Iterator:
        for k, c in self._items:
            for _ in range(c):
                yield k

    def __len__(self) -> int:
        return sum(c for _, c in self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def __add__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return type(self)(list(self._items) + list(other._items))

    def scale(self, k: int):
        return type(self)([(key, c * k) for key, c in self._items])

    def __le__(self, other) -> bool:
        """Coefficientwise comparison in the free monoid (not in M_E)."""
        return all(c <= other[k] for k, c in self._items)

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if not self._items:
            return f"{type(self).__name__}(0)"
        return f"{type(self).__name__}({' + '.join(f'{c}*{k}' if c > 1 else str(k) for k, c in self._items)})"


class MonoidElement(Multiset):
    """Element of the free commutative monoid on vertex ids."""


class Equality(enum.Enum):
    EQUAL = "equal"
    UNEQUAL_WITHIN_BOUND = "unequal_within_bound"
    UNKNOWN = "unknown"


def flow_step(g: Graph, x: MonoidElement, at: int) -> MonoidElement:
    """Replace one copy of ``at`` by the ranges of its out-edges."""
    if x[at] < 1:
        raise FlowError(f"vertex {at} is not in the support")
    if g.out_degree(at) == 0:
        raise FlowError(f"vertex {at} is a sink; flow is undefined")
    acc = dict(x.items())
    acc[at] -= 1
    for e in g.out_edges(at):
        acc[e.dst] = acc.get(e.dst, 0) + 1
    return MonoidElement(acc)


def _one_step(g: Graph, x: MonoidElement) -> set[MonoidElement]:
    return {flow_step(g, x, v) for v in x.support() if g.out_degree(v) > 0}


def _closure_levels(g: Graph, x: MonoidElement, depth: int):
    """Yield (closure, frontier) after 0, 1, ..., depth sweeps."""
    seen = {x}
    frontier = {x}
    yield seen, frontier
    for _ in range(depth):
        nxt = set()
        for y in sorted(frontier, key=lambda m: m.items()):
            nxt |= _one_step(g, y)
        frontier = nxt - seen
        seen |= frontier
        yield seen, frontier


def flow_successors(g: Graph, x: MonoidElement, depth: int) -> set[MonoidElement]:
    """Everything reachable from ``x`` in at most ``depth`` single-vertex steps."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    seen: set[MonoidElement] = set()
    for seen, _ in _closure_levels(g, x, depth):
        pass
    return set(seen)


def monoid_equal(
    g: Graph, a: MonoidElement, b: MonoidElement, depth: int, max_states: int | None = None
) -> Equality:
    """Bounded confluence test for ``a == b`` in M_E.

    ``EQUAL`` is certain. ``UNEQUAL_WITHIN_BOUND`` means both flow closures
    were exhausted without meeting, which is also certain (by confluence the
    closures are complete). ``UNKNOWN`` means the depth or the state cap
    ran out first.
    """
    if not a or not b:
        # M_E is conical: only 0 equals 0
        return Equality.EQUAL if (not a and not b) else Equality.UNEQUAL_WITHIN_BOUND
    if a == b:
        return Equality.EQUAL
    la = _closure_levels(g, a, depth)
    lb = _closure_levels(g, b, depth)
    for (sa, fa), (sb, fb) in zip(la, lb):
        if sa & sb:
            return Equality.EQUAL
        if not fa and not fb:
            return Equality.UNEQUAL_WITHIN_BOUND
        if max_states is not None and len(sa) + len(sb) > max_states:
            break
    return Equality.UNKNOWN


_TERM = re.compile(r"^\s*(?:(\d+)\s*\*\s*)?([A-Za-z_][\w.]*)\s*(?:\(\s*(-?\d+)\s*\))?\s*$")


def parse_terms(expr: str) -> list[tuple[int, str, int | None]]:
    """Split ``'2*v + w(3)'`` into ``[(2, 'v', None), (1, 'w', 3)]``."""
    expr = expr.strip()
    if expr in ("", "0"):
        return []
    out = []
    for part in expr.split("+"):
        m = _TERM.match(part)
        if not m:
            raise ValueError(f"cannot parse term {part.strip()!r}")
        coeff = int(m.group(1)) if m.group(1) else 1
        shift = int(m.group(3)) if m.group(3) is not None else None
        out.append((coeff, m.group(2), shift))
    return out


def parse_monoid_element(g: Graph, expr: str) -> MonoidElement:
    acc: dict[int, int] = {}
    for coeff, name, shift in parse_terms(expr):
        if shift is not None:
            raise ValueError(f"shifted term {name}({shift}) is not a graph-monoid literal")
        try:
            v = g.vertex_by_label(name)
        except KeyError:
            raise ValueError(f"unknown vertex {name!r}") from None
        acc[v] = acc.get(v, 0) + coeff
    return MonoidElement(acc)
