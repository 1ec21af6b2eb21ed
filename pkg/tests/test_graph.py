import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parmbe.gen import gen_er
from parmbe.graph import (Biclique, Graph, GraphError, ParseError, build_cluster,
                          common_neighborhood, induced_subgraph, load_edge_list, neighborhood,
                          two_neighborhood, write_labels)

from conftest import A, B, C, D, graph_of


def test_load_two_edge_path():
    g = load_edge_list("1 2\n2 3")
    assert (g.n, g.m) == (3, 2)
    assert g.adjacency(2) == (1, 3)


def test_load_drops_duplicates_and_self_loops():
    g = load_edge_list("1 2\n2 1\n1 1")
    assert (g.n, g.m) == (2, 1)


def test_load_skips_comments_and_blank_lines():
    g = load_edge_list("# Directed graph\n# FromNodeId\tToNodeId\n\n0\t1\n1\t2\n")
    assert (g.n, g.m) == (3, 2)


def test_load_malformed_line_names_line_number():
    with pytest.raises(ParseError) as exc:
        load_edge_list("1 2\n3\n")
    assert exc.value.lineno == 2
    assert "line 2" in str(exc.value)


def test_load_empty_input():
    with pytest.raises(GraphError, match="empty graph"):
        load_edge_list("# only a comment\n")


def test_load_string_labels_map_in_sorted_order():
    g = load_edge_list("bob alice\ncarol bob\n")
    assert g.labels == {0: "alice", 1: "bob", 2: "carol"}
    assert g.adjacency(1) == (0, 2)
    buf = io.StringIO()
    write_labels(g, buf)
    assert buf.getvalue() == "0\talice\n1\tbob\n2\tcarol\n"


def test_graph_invariants_hold_for_random_graph():
    g = gen_er(60, 0.1, seed=3)
    total = 0
    for v in g.vertices:
        nb = g.adjacency(v)
        assert list(nb) == sorted(set(nb))
        assert v not in nb
        for u in nb:
            assert v in g.adjacency(u)
        total += len(nb)
    assert total == 2 * g.m


def test_neighborhood(path3):
    assert neighborhood(path3, B) == (A, C)
    iso = Graph({0: [1], 5: []})
    assert neighborhood(iso, 5) == ()
    with pytest.raises(GraphError):
        neighborhood(path3, 99)


def test_two_neighborhood(path3, star, c4):
    assert two_neighborhood(path3, A) == {A, B, C}
    x = ord("x") - ord("a")
    assert two_neighborhood(star, x) == set(star.vertices)
    assert two_neighborhood(c4, A) == {A, B, C, D}
    assert two_neighborhood(Graph({0: [1], 5: []}), 5) == frozenset()


def test_common_neighborhood(path3, triangle):
    assert common_neighborhood(graph_of("a-b"), [B]) == {A}
    assert common_neighborhood(path3, [A, C]) == {B}
    assert common_neighborhood(triangle, [A, B]) == {C}
    with pytest.raises(GraphError):
        common_neighborhood(triangle, [])


def test_induced_subgraph(triangle, c4, k4):
    sub = induced_subgraph(triangle, [A, B])
    assert list(sub.edges()) == [(A, B)]
    assert induced_subgraph(k4, k4.vertices) == k4
    # C4 has no a-c chord, so {a, b, c} induces the path a-b-c
    assert sorted(induced_subgraph(c4, [A, B, C]).edges()) == [(A, B), (B, C)]


def test_biclique_canonical_form():
    b1, b2 = Biclique((5, 3), (1, 9)), Biclique((9, 1), (3, 5))
    assert b1 == b2 and hash(b1) == hash(b2)
    assert b1.left == (1, 9) and b1.right == (3, 5)
    assert b1.edge_weight() == 4
    assert Biclique.parse(b1.format()) == b1


@pytest.mark.parametrize("left,right", [((), (1,)), ((1,), ()), ((1, 2), (2, 3))])
def test_biclique_rejects_bad_sides(left, right):
    with pytest.raises(GraphError):
        Biclique(left, right)


def test_cluster_is_induced_two_neighborhood(c4):
    cl = build_cluster(c4, A)
    assert cl.center == A
    assert set(cl.subgraph.vertices) == {A, B, C, D}
    assert cl.subgraph == c4


graphs = st.builds(
    lambda n, p, seed: gen_er(n, p, seed),
    st.integers(2, 64), st.sampled_from([0.05, 0.1, 0.3, 0.6]), st.integers(0, 10_000),
)


@settings(max_examples=60, deadline=None)
@given(graphs, st.data())
def test_neighborhood_properties(g, data):
    v = data.draw(st.sampled_from(g.vertices))
    if g.degree(v):
        eta2 = two_neighborhood(g, v)
        assert set(g.adjacency(v)) <= eta2 and v in eta2
    u_small = data.draw(st.sets(st.sampled_from(g.vertices), min_size=1, max_size=4))
    u_big = u_small | data.draw(st.sets(st.sampled_from(g.vertices), max_size=3))
    assert common_neighborhood(g, u_big) <= common_neighborhood(g, u_small)
    gamma = common_neighborhood(g, u_small)
    assert gamma.isdisjoint(u_small)
    if gamma:
        assert common_neighborhood(g, common_neighborhood(g, gamma)) == gamma
