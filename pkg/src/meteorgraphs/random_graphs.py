"""Random meteor graphs, moves and talented elements for property tests."""

from __future__ import annotations

import random

from .graph import Edge, Graph
from .moves import (
    IN_AMALGAMATION,
    OUT_AMALGAMATION,
    MoveRecord,
    amalgamation_groups,
    in_amalgamate,
    in_split,
    out_amalgamate,
    out_split,
)
from .talented import TalentedElement


def random_meteor_graph(
    rng: random.Random,
    max_vertices: int = 10,
    max_cycle: int = 3,
    max_direct: int = 2,
    shuffle_ids: bool = True,
) -> Graph:
    """A random meteor graph with at most ``max_vertices`` vertices.

    Interior vertices form a random DAG between the two cycles; each one
    gets at least one way in and one way out, so nothing is stranded.
    """
    p = rng.randint(1, max_cycle)
    q = rng.randint(1, max_cycle)
    k = rng.randint(0, max(0, max_vertices - p - q))
    src = list(range(p))
    snk = list(range(p, p + q))
    inner = list(range(p + q, p + q + k))
    edges: list[tuple[int, int]] = []
    edges += [(src[i], src[(i + 1) % p]) for i in range(p)]
    edges += [(snk[i], snk[(i + 1) % q]) for i in range(q)]
    for idx, u in enumerate(inner):
        ups = src + inner[:idx]
        downs = snk + inner[idx + 1 :]
        for _ in range(rng.randint(1, 2)):
            edges.append((rng.choice(ups), u))
        for _ in range(rng.randint(1, 2)):
            edges.append((u, rng.choice(downs)))
    for _ in range(rng.randint(0 if inner else 1, max_direct)):
        edges.append((rng.choice(src), rng.choice(snk)))

    n = p + q + k
    ids = list(range(n))
    if shuffle_ids:
        rng.shuffle(ids)
    labels = {ids[i]: f"a{i}" for i in range(p)}
    labels |= {ids[p + i]: f"b{i}" for i in range(q)}
    labels |= {ids[p + q + i]: f"u{i}" for i in range(k)}
    es = [Edge(j, ids[a], ids[b]) for j, (a, b) in enumerate(edges)]
    return Graph(ids, es, labels)


def _random_partition(rng: random.Random, items: list[int]) -> list[list[int]]:
    items = list(items)
    rng.shuffle(items)
    m = rng.randint(1, len(items))
    classes: list[list[int]] = [[x] for x in items[:m]]
    for x in items[m:]:
        rng.choice(classes).append(x)
    return [sorted(c) for c in classes]


def random_split(g: Graph, rng: random.Random, kind: str | None = None) -> tuple[Graph, MoveRecord]:
    """In- or out-split at one or two random vertices with random partitions."""
    kind = kind or rng.choice(["in", "out"])
    sites = rng.sample(list(g.vertices), k=min(len(g.vertices), rng.choice([1, 1, 2])))
    partition = {}
    for v in sites:
        es = [e.id for e in (g.in_edges(v) if kind == "in" else g.out_edges(v))]
        if es:
            partition[v] = _random_partition(rng, es)
    return (in_split if kind == "in" else out_split)(g, partition)


def random_amalgamation(g: Graph, rng: random.Random) -> tuple[Graph, MoveRecord] | None:
    options = [(k, grp) for k in (IN_AMALGAMATION, OUT_AMALGAMATION) for grp in amalgamation_groups(g, k)]
    if not options:
        return None
    kind, grp = rng.choice(options)
    block = rng.sample(list(grp), k=rng.randint(2, len(grp)))
    fn = in_amalgamate if kind == IN_AMALGAMATION else out_amalgamate
    return fn(g, [block])


def random_valid_move(g: Graph, rng: random.Random, amalgamate_bias: float = 0.5) -> tuple[Graph, MoveRecord]:
    if rng.random() < amalgamate_bias:
        out = random_amalgamation(g, rng)
        if out is not None:
            return out
    return random_split(g, rng)


def random_move_sequence(
    g: Graph, rng: random.Random, length: int, max_vertices: int = 16
) -> tuple[Graph, list[MoveRecord]]:
    """Random moves, preferring amalgamations once the graph gets large."""
    seq = []
    for _ in range(length):
        bias = 0.9 if len(g.vertices) >= max_vertices else 0.4
        g, rec = random_valid_move(g, rng, bias)
        seq.append(rec)
    return g, seq


def random_talented_element(
    g: Graph, rng: random.Random, terms: int = 3, shifts: tuple[int, int] = (-3, 3), max_coeff: int = 2
) -> TalentedElement:
    acc: dict[tuple[int, int], int] = {}
    for _ in range(rng.randint(1, terms)):
        key = (rng.choice(g.vertices), rng.randint(*shifts))
        acc[key] = acc.get(key, 0) + rng.randint(1, max_coeff)
    return TalentedElement(acc)
