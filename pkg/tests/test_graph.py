import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meteorgraphs.graph import (
    Edge,
    Graph,
    adjacency_matrix,
    graph_from_matrix,
    is_essential,
    is_isomorphic,
    relabel,
    scc_decomposition,
    simple_cycles,
    transpose,
)
from meteorgraphs.io import ParseError, graph_to_json, graph_to_text, parse_graph_json, parse_graph_text, parse_matrix_text
from meteorgraphs.matrix import IntMatrix

from conftest import graph


@st.composite
def small_graphs(draw, max_vertices=6, max_edges=10):
    n = draw(st.integers(1, max_vertices))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=max_edges))
    return Graph(list(range(n)), [Edge(i, a, b) for i, (a, b) in enumerate(pairs)])


def test_adjacency_of_loop_and_empty():
    assert adjacency_matrix(graph("edge e v -> v")).tolist() == [[1]]
    assert adjacency_matrix(Graph([0, 1], [])).tolist() == [[0, 0], [0, 0]]


def test_dumbbell_matrix(dumbbell):
    assert adjacency_matrix(dumbbell).tolist() == [[1, 1], [0, 1]]


def test_graph_from_matrix_multiplicity():
    g = graph_from_matrix(IntMatrix([[0, 2], [0, 0]]))
    assert len(g.vertices) == 2
    assert sorted((e.src, e.dst) for e in g.edges) == [(0, 1), (0, 1)]
    assert len(graph_from_matrix(IntMatrix([[1]])).edges) == 1


def test_essential_examples(dumbbell):
    assert is_essential(dumbbell)
    assert not is_essential(Graph([0], []))
    assert not is_essential(graph("edge e v -> w"))
    assert not is_essential(Graph([], []))


def test_scc_examples(dumbbell):
    scc = scc_decomposition(dumbbell)
    assert sorted(len(c) for c in scc.components) == [1, 1]
    v, w = dumbbell.vertex_by_label("v"), dumbbell.vertex_by_label("w")
    assert (scc.component_of(v), scc.component_of(w)) in scc.condensation
    tri = graph("edge a x -> y\nedge b y -> z\nedge c z -> x")
    assert [len(c) for c in scc_decomposition(tri).components] == [3]
    path = graph("edge a x -> y\nedge b y -> z")
    assert sorted(len(c) for c in scc_decomposition(path).components) == [1, 1, 1]


def test_simple_cycles(dumbbell, three_cycle):
    assert sorted(len(c.vertex_order) for c in simple_cycles(dumbbell)) == [1, 1]
    assert sorted(len(c.vertex_order) for c in simple_cycles(three_cycle)) == [2, 3, 4]
    assert simple_cycles(graph("edge a x -> y\nedge b y -> z\nedge c x -> z")) == []
    n_cycle = graph("\n".join(f"edge e{i} v{i} -> v{(i + 1) % 5}" for i in range(5)))
    assert len(simple_cycles(n_cycle)) == 1


def test_isomorphism_examples(dumbbell):
    ident = is_isomorphic(dumbbell, dumbbell)
    assert ident == {v: v for v in dumbbell.vertices}
    moved = relabel(dumbbell, {v: v + 10 for v in dumbbell.vertices})
    assert is_isomorphic(dumbbell, moved) is not None
    doubled = graph("edge l1 v -> v\nedge t1 v -> w\nedge t2 v -> w\nedge l2 w -> w")
    assert is_isomorphic(dumbbell, doubled) is None


def test_transpose_examples():
    loop = graph("edge e v -> v")
    assert adjacency_matrix(transpose(loop)).tolist() == [[1]]
    (e,) = transpose(graph("edge e v -> w")).edges
    g = transpose(graph("edge e v -> w"))
    assert (g.label(e.src), g.label(e.dst)) == ("w", "v")


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_matrix_roundtrip(g):
    a = adjacency_matrix(g)
    assert adjacency_matrix(graph_from_matrix(a)) == a


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_transpose_properties(g):
    assert adjacency_matrix(transpose(g)) == adjacency_matrix(g).transpose()
    assert adjacency_matrix(transpose(transpose(g))) == adjacency_matrix(g)
    assert is_essential(g) == is_essential(transpose(g))


@settings(max_examples=60, deadline=None)
@given(small_graphs(), st.randoms(use_true_random=False))
def test_isomorphism_reflexive_symmetric(g, rnd):
    perm = list(g.vertices)
    rnd.shuffle(perm)
    h = relabel(g, dict(zip(g.vertices, perm)))
    assert is_isomorphic(g, g) is not None
    assert (is_isomorphic(g, h) is None) == (is_isomorphic(h, g) is None)
    assert is_isomorphic(g, h) is not None


def test_text_and_json_roundtrip(six_four):
    again = parse_graph_text(graph_to_text(six_four))
    assert is_isomorphic(six_four, again) is not None
    back = parse_graph_json(graph_to_json(six_four))
    assert is_isomorphic(six_four, back) is not None


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError, match="line 2"):
        parse_graph_text("edge a x -> y\nedge b y => z")
    with pytest.raises(ParseError):
        parse_matrix_text("2\n1 0\n")


def test_matrix_text():
    m = parse_matrix_text("2\n1 1\n0 1\n")
    assert m.tolist() == [[1, 1], [0, 1]]


def test_canonical_form_is_permutation_invariant():
    rnd = random.Random(3)
    for _ in range(20):
        n = rnd.randint(1, 4)
        m = IntMatrix([[rnd.randint(0, 2) for _ in range(n)] for _ in range(n)])
        perm = list(range(n))
        rnd.shuffle(perm)
        assert m.permuted(perm).canonical_form() == m.canonical_form()
