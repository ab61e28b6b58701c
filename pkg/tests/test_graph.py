import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tvcn.graph import (DirectedGraph, FrozenGraphError, GraphError, complete_digraph,
                        graph_from_dict, graph_to_dict, load_graph, save_graph)


def test_add_node_dense_ids():
    g = DirectedGraph()
    assert g.add_node() == 0
    assert g.num_nodes == 1
    g = DirectedGraph(5)
    v = g.add_node()
    assert v == 5
    assert g.in_degree(v) == g.out_degree(v) == 0


def test_add_edge_and_duplicate():
    g = DirectedGraph(2)
    assert g.add_edge(0, 1) is True
    assert g.edge_count == 1
    assert g.add_edge(0, 1) is False
    assert g.edge_count == 1


def test_self_loop_and_unknown_node_rejected():
    g = DirectedGraph(2)
    with pytest.raises(GraphError):
        g.add_edge(0, 0)
    with pytest.raises(GraphError):
        g.add_edge(0, 7)


def test_rewire_conserves_edges():
    g = DirectedGraph(3)
    g.add_edge(0, 1)
    assert g.rewire_edge(0, 1, 2)
    assert g.edge_count == 1
    assert g.has_edge(0, 2) and not g.has_edge(0, 1)


def test_remove_is_idempotent():
    g = DirectedGraph(2)
    g.add_edge(0, 1)
    assert g.remove_edge(0, 1) is True
    assert g.remove_edge(0, 1) is False
    assert g.edge_count == 0


def test_rewire_onto_existing_edge_fails_cleanly():
    g = DirectedGraph(3)
    g.add_edge(0, 1)
    g.add_edge(0, 2)
    before = list(g.edges())
    with pytest.raises(GraphError):
        g.rewire_edge(0, 1, 2)
    with pytest.raises(GraphError):
        g.rewire_edge(0, 1, 0)
    assert list(g.edges()) == before
    assert g.rewire_edge(1, 0, 2) is False


def test_snapshot_is_frozen_and_isolated():
    g = complete_digraph(4)
    snap = g.snapshot(timestamp=3)
    before = list(snap.graph.edges())
    g.remove_edge(0, 1)
    g.add_node()
    assert list(snap.graph.edges()) == before
    assert snap.graph.num_nodes == 4
    with pytest.raises(FrozenGraphError):
        snap.graph.add_edge(0, 1)
    with pytest.raises(FrozenGraphError):
        snap.graph.add_node()


def test_undirected_view_merges_directions():
    g = DirectedGraph(3)
    g.add_edge(0, 1)
    g.add_edge(1, 0)
    g.add_edge(2, 1)
    assert g.undirected_adjacency() == [[1], [0, 2], [1]]


@st.composite
def operations(draw):
    return draw(st.lists(st.tuples(st.sampled_from(["add", "remove", "rewire", "node"]),
                                   st.integers(0, 9), st.integers(0, 9), st.integers(0, 9)),
                         max_size=60))


@settings(max_examples=100, deadline=None)
@given(operations())
def test_degree_bookkeeping_invariants(ops):
    g = DirectedGraph(4)
    for op, a, b, c in ops:
        n = g.num_nodes
        a, b, c = a % n, b % n, c % n
        try:
            if op == "add":
                g.add_edge(a, b)
            elif op == "remove":
                g.remove_edge(a, b)
            elif op == "rewire":
                g.rewire_edge(a, b, c)
            else:
                g.add_node()
        except GraphError:
            pass
        assert int(g.in_degrees().sum()) == int(g.out_degrees().sum()) == g.edge_count
        assert max(g.nodes()) == g.num_nodes - 1
    for v in g.nodes():
        assert g.in_degree(v) == len(g.predecessors(v))
        assert g.out_degree(v) == len(g.successors(v))
        assert g.degree(v) == g.in_degree(v) + g.out_degree(v)
        assert v not in g.successors(v)
        for w in g.successors(v):
            assert v in g.predecessors(w)


def test_json_round_trip_is_identical(tmp_path):
    g = complete_digraph(5)
    g.remove_edge(0, 2)
    g.rewire_edge(0, 1, 2)
    g.remove_edge(3, 4)
    for _ in range(3):
        g.add_node()
    g.add_edge(6, 0)
    g.add_edge(7, 3)
    g.remove_edge(2, 0)
    g.add_edge(2, 0)
    path = tmp_path / "g.json"
    save_graph(g, path, n0=5, steps=3, params={"beta": 0.5})
    h, doc = load_graph(path)
    assert h == g
    assert [list(e) for e in g.edges()] == doc["edges"]
    assert doc["n0"] == 5 and doc["steps"] == 3 and doc["params"] == {"beta": 0.5}
    assert [h.successors(v) for v in h.nodes()] == [g.successors(v) for v in g.nodes()]
    assert [h.predecessors(v) for v in h.nodes()] == [g.predecessors(v) for v in g.nodes()]


def test_dict_without_num_nodes_uses_n0_plus_steps():
    doc = json.loads(json.dumps(graph_to_dict(DirectedGraph(3), n0=2, steps=1)))
    del doc["num_nodes"]
    assert graph_from_dict(doc).num_nodes == 3


def test_degree_views_are_read_only():
    g = complete_digraph(3)
    with pytest.raises(ValueError):
        g.in_degrees()[0] = 7
    np.testing.assert_array_equal(g.degrees(), [4, 4, 4])
