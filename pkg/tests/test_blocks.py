from __future__ import annotations

import networkx as nx
import pytest
from hypothesis import assume, given

from detour.blocks import biconnected_blocks, block_cut_tree, relevant_part
from detour.brute import enumerate_st_paths
from detour.graph import Graph, GraphError, is_connected, path_graph

from conftest import graphs, graphs_with_terminals


def _nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def test_triangle_with_pendant():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    bct = block_cut_tree(g)
    assert set(bct.blocks) == {frozenset({0, 1, 2}), frozenset({2, 3})}
    assert bct.cut_vertices == (2,)
    assert set(relevant_part(g, 0, 1).to_host) == {0, 1, 2}


def test_single_edge_and_bowtie():
    bct = block_cut_tree(path_graph(2))
    assert bct.blocks == (frozenset({0, 1}),) and bct.cut_vertices == ()
    bowtie = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    bct = block_cut_tree(bowtie)
    assert len(bct.blocks) == 2 and bct.cut_vertices == (2,)
    path = bct.tree_path(bct.node_of(0), bct.node_of(4))
    assert [kind for kind, _ in path] == ["B", "C", "B"]
    assert set(relevant_part(bowtie, 0, 4).to_host) == set(range(5))


def test_rejects_directed_disconnected_and_equal_terminals():
    with pytest.raises(GraphError):
        block_cut_tree(Graph.from_edges(2, [(0, 1)], directed=True))
    with pytest.raises(GraphError):
        block_cut_tree(Graph.from_edges(3, [(0, 1)]))
    with pytest.raises(GraphError):
        relevant_part(path_graph(3), 1, 1)
    with pytest.raises(GraphError):
        relevant_part(Graph.from_edges(3, [(0, 1)]), 0, 2)


@given(graphs(max_n=9))
def test_blocks_match_networkx(g):
    blocks, cuts = biconnected_blocks(g)
    h = _nx(g)
    expected = {frozenset(c) for c in nx.biconnected_components(h)}
    expected |= {frozenset({v}) for v in range(g.n) if h.degree(v) == 0}
    assert set(blocks) == expected
    assert cuts == set(nx.articulation_points(h))


@given(graphs(max_n=9))
def test_block_cut_tree_invariants(g):
    assume(g.n > 0 and is_connected(g))
    bct = block_cut_tree(g)
    assert set().union(*bct.blocks) == set(range(g.n))
    for u, v in g.edges:
        assert sum(1 for b in bct.blocks if u in b and v in b) == 1
    for x in range(g.n):
        rest = g.remove_edges([e for e in g.edges if x in e])
        others = [y for y in range(g.n) if y != x]
        comps = {frozenset(nx.node_connected_component(_nx(rest), y)) for y in others}
        assert (len(comps) > 1) == (x in bct.cut_vertices)


@given(graphs_with_terminals(max_n=9))
def test_relevant_part_is_exactly_the_vertices_on_paths(case):
    g, s, t = case
    paths = enumerate_st_paths(g, s, t)
    assume(paths)
    sub = relevant_part(g, s, t)
    assert set(sub.to_host) == {v for p in paths for v in p}
    lifted = sorted(sub.lift(p) for p in enumerate_st_paths(sub.graph, sub.local(s), sub.local(t)))
    assert lifted == sorted(paths)
