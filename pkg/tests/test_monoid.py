import itertools
import random

import pytest

from meteorgraphs.graph import reachable
from meteorgraphs.monoid import (
    Equality,
    MonoidElement,
    flow_step,
    flow_successors,
    monoid_equal,
    parse_monoid_element,
    parse_terms,
)
from meteorgraphs.random_graphs import random_meteor_graph

from conftest import graph


def el(g, *names):
    return MonoidElement.of(*(g.vertex_by_label(n) for n in names))


def test_flow_step_examples(dumbbell):
    assert flow_step(dumbbell, el(dumbbell, "v"), dumbbell.vertex_by_label("v")) == el(dumbbell, "v", "w")
    loop = graph("edge e v -> v")
    assert flow_step(loop, el(loop, "v"), loop.vertex_by_label("v")) == el(loop, "v")
    two = graph("edge a u -> v\nedge b v -> u")
    assert flow_step(two, el(two, "u"), two.vertex_by_label("u")) == el(two, "v")


def test_flow_successors(dumbbell):
    x = el(dumbbell, "v")
    assert flow_successors(dumbbell, x, 0) == {x}
    assert flow_successors(dumbbell, x, 1) == {x, el(dumbbell, "v", "w")}


def test_monoid_equal_examples(dumbbell):
    v, w = el(dumbbell, "v"), el(dumbbell, "w")
    assert monoid_equal(dumbbell, v, v, 0) is Equality.EQUAL
    assert monoid_equal(dumbbell, v, el(dumbbell, "v", "w"), 3) is Equality.EQUAL
    assert monoid_equal(dumbbell, w, el(dumbbell, "w", "w"), 3) is Equality.UNEQUAL_WITHIN_BOUND


def test_unbounded_growth_is_unknown(dumbbell):
    v, w = el(dumbbell, "v"), el(dumbbell, "w")
    assert monoid_equal(dumbbell, v, w, 4) is Equality.UNKNOWN


def test_parse_terms():
    assert parse_terms("2*v + w(3)") == [(2, "v", None), (1, "w", 3)]
    assert parse_terms("0") == []
    with pytest.raises(ValueError):
        parse_terms("2v +")


def test_parse_monoid_element(dumbbell):
    assert parse_monoid_element(dumbbell, "2*v + w") == el(dumbbell, "v", "v", "w")
    with pytest.raises(ValueError, match="unknown vertex"):
        parse_monoid_element(dumbbell, "z")


def _random_flow(g, x, rnd, steps):
    for _ in range(steps):
        sup = [v for v in x.support() if g.out_degree(v)]
        if not sup:
            break
        x = flow_step(g, x, rnd.choice(sup))
    return x


def test_flow_paths_connect_summands():
    rnd = random.Random(4)
    for _ in range(40):
        g = random_meteor_graph(rnd, max_vertices=7)
        x = MonoidElement.of(*rnd.choices(g.vertices, k=2))
        y = _random_flow(g, x, rnd, rnd.randint(0, 5))
        for xi in x.support():
            assert reachable(g, [xi]) & set(y.support())
        for yj in y.support():
            assert yj in reachable(g, x.support())


def test_flow_additivity_small():
    rnd = random.Random(5)
    for _ in range(25):
        g = random_meteor_graph(rnd, max_vertices=5, max_cycle=2)
        a1 = MonoidElement.of(rnd.choice(g.vertices))
        a2 = MonoidElement.of(rnd.choice(g.vertices))
        b = _random_flow(g, a1 + a2, rnd, rnd.randint(0, 3))
        c1 = flow_successors(g, a1, 3)
        c2 = flow_successors(g, a2, 3)
        assert any(b1 + b2 == b for b1, b2 in itertools.product(c1, c2))


def test_state_cap_gives_unknown(dumbbell):
    v, w = el(dumbbell, "v"), el(dumbbell, "w")
    assert monoid_equal(dumbbell, v, w, 50, max_states=10) is Equality.UNKNOWN
