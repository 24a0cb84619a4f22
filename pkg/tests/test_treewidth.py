from __future__ import annotations

import itertools

import pytest
from hypothesis import given

from detour.graph import Graph, complete_graph, cycle_graph, grid_graph, path_graph
from detour.treewidth import (
    DecompositionError,
    TreeDecomposition,
    TreewidthBudgetExceeded,
    decomposition_from_order,
    exact_treewidth_small,
    format_td,
    heuristic_decomposition,
    parse_td,
    treewidth_lower_bound,
    validate_decomposition,
)

from conftest import graphs


def _best_order_width(g: Graph) -> int:
    # independent oracle: minimum over all elimination orders
    return min(decomposition_from_order(g, order).width for order in itertools.permutations(range(g.n)))


def test_validation_examples():
    g = path_graph(4)
    whole = TreeDecomposition((frozenset(range(4)),), ())
    assert validate_decomposition(g, whole).valid and whole.width == 3
    chain = TreeDecomposition(tuple(frozenset({i, i + 1}) for i in range(3)), ((0, 1), (1, 2)))
    assert validate_decomposition(g, chain).valid and chain.width == 1
    short = TreeDecomposition((frozenset({0, 1}), frozenset({1, 2}), frozenset({3})), ((0, 1), (1, 2)))
    rep = validate_decomposition(g, short)
    assert not rep.t2 and rep.uncovered_edge == (2, 3)


def test_validation_reports_t1_and_t3():
    g = path_graph(3)
    missing = TreeDecomposition((frozenset({0, 1}),), ())
    rep = validate_decomposition(g, missing)
    assert not rep.t1 and rep.uncovered_vertex == 2
    split = TreeDecomposition(
        (frozenset({0, 1}), frozenset({2}), frozenset({1, 2})), ((0, 1), (1, 2))
    )
    rep = validate_decomposition(g, split)
    assert not rep.t3 and rep.disconnected_vertex == 1


def test_structural_errors_come_first():
    g = path_graph(3)
    cyc = TreeDecomposition((frozenset({0, 1}), frozenset({1, 2}), frozenset({2})), ((0, 1), (1, 2), (2, 0)))
    with pytest.raises(DecompositionError):
        validate_decomposition(g, cyc)
    forest = TreeDecomposition((frozenset({0, 1}), frozenset({1, 2}), frozenset({2})), ((0, 1), (1, 1)))
    with pytest.raises(DecompositionError):
        validate_decomposition(g, forest)


@pytest.mark.parametrize("strategy", ["min-fill", "min-degree"])
def test_heuristic_examples(strategy):
    tree = Graph.from_edges(6, [(0, 1), (0, 2), (2, 3), (2, 4), (4, 5)])
    assert heuristic_decomposition(tree, strategy).width == 1
    assert heuristic_decomposition(cycle_graph(7), strategy).width == 2
    assert heuristic_decomposition(complete_graph(5), strategy).width == 4


def test_exact_examples():
    assert exact_treewidth_small(grid_graph(3, 3)).width == 3
    assert exact_treewidth_small(complete_graph(4)).width == 3
    star = Graph.from_edges(6, [(0, i) for i in range(1, 6)])
    assert exact_treewidth_small(star).width == 1
    with pytest.raises(TreewidthBudgetExceeded):
        exact_treewidth_small(grid_graph(5, 5), budget=16)


def test_lower_bound_examples():
    assert treewidth_lower_bound(complete_graph(5)) >= 4
    assert treewidth_lower_bound(path_graph(2)) >= 1
    assert treewidth_lower_bound(cycle_graph(6)) >= 2


@given(graphs(max_n=7))
def test_exact_matches_order_enumeration(g):
    assert exact_treewidth_small(g).width == _best_order_width(g)


@given(graphs(max_n=10))
def test_bounds_sandwich_and_validity(g):
    exact = exact_treewidth_small(g)
    assert validate_decomposition(g, exact).valid
    lb = treewidth_lower_bound(g)
    for strategy in ("min-fill", "min-degree"):
        td = heuristic_decomposition(g, strategy)
        assert validate_decomposition(g, td).valid
        assert lb <= exact.width <= td.width
        assert heuristic_decomposition(g, strategy) == td


@given(graphs(max_n=9))
def test_td_round_trip(g):
    td = heuristic_decomposition(g)
    text = format_td(td, g.n)
    assert text.startswith(f"s td {len(td.bags)} {td.width + 1} {g.n}\n")
    back, n = parse_td(text)
    assert n == g.n and back == td


def test_td_is_one_based():
    td = TreeDecomposition((frozenset({0, 1}), frozenset({1, 2})), ((0, 1),))
    assert format_td(td, 3) == "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n"
