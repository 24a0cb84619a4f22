"""Block-cut trees and the (s, t)-relevant part of a graph."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .graph import Graph, GraphError, Subgraph, connected_component, induced_subgraph

# Tree nodes are ("B", block_index) or ("C", vertex).
Node = tuple[str, int]


@dataclass(frozen=True)
class BlockCutTree:
    blocks: tuple[frozenset[int], ...]
    cut_vertices: tuple[int, ...]
    tree_edges: tuple[tuple[int, int], ...]  # (block index, cut vertex)

    def neighbors(self, node: Node) -> list[Node]:
        kind, x = node
        if kind == "B":
            return [("C", c) for b, c in self.tree_edges if b == x]
        return [("B", b) for b, c in self.tree_edges if c == x]

    def blocks_of(self, v: int) -> list[int]:
        return [i for i, b in enumerate(self.blocks) if v in b]

    def node_of(self, v: int) -> Node:
        """The tree node representing ``v``: its cut node, else its unique block."""
        if v in self.cut_vertices:
            return ("C", v)
        (b,) = self.blocks_of(v)
        return ("B", b)

    def tree_path(self, a: Node, b: Node) -> list[Node]:
        parent: dict[Node, Node | None] = {a: None}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            if x == b:
                break
            for y in self.neighbors(x):
                if y not in parent:
                    parent[y] = x
                    queue.append(y)
        path = [b]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        return path[::-1]


def biconnected_blocks(g: Graph) -> tuple[list[frozenset[int]], set[int]]:
    """Hopcroft-Tarjan on an undirected graph, iterative.

    Returns the blocks (bridges are 2-vertex blocks, isolated vertices are
    singleton blocks) and the articulation points.
    """
    disc = [-1] * g.n
    low = [0] * g.n
    blocks: list[frozenset[int]] = []
    cuts: set[int] = set()
    timer = 0
    for root in range(g.n):
        if disc[root] != -1:
            continue
        if not g.adj[root]:
            disc[root] = timer
            timer += 1
            blocks.append(frozenset([root]))
            continue
        disc[root] = low[root] = timer
        timer += 1
        root_children = 0
        edge_stack: list[tuple[int, int]] = []
        # frames: (vertex, parent, neighbour iterator position)
        stack = [(root, -1, 0)]
        while stack:
            u, parent, i = stack[-1]
            nbrs = g.adj[u]
            if i < len(nbrs):
                stack[-1] = (u, parent, i + 1)
                w = nbrs[i]
                if disc[w] == -1:
                    disc[w] = low[w] = timer
                    timer += 1
                    edge_stack.append((u, w))
                    stack.append((w, u, 0))
                    if u == root:
                        root_children += 1
                elif w != parent and disc[w] < disc[u]:
                    edge_stack.append((u, w))
                    low[u] = min(low[u], disc[w])
                continue
            stack.pop()
            if not stack:
                break
            p = stack[-1][0]
            low[p] = min(low[p], low[u])
            if low[u] >= disc[p]:
                comp: set[int] = set()
                while True:
                    a, b = edge_stack.pop()
                    comp.update((a, b))
                    if (a, b) == (p, u):
                        break
                blocks.append(frozenset(comp))
                if p != root:
                    cuts.add(p)
        if root_children > 1:
            cuts.add(root)
    return blocks, cuts


def block_cut_tree(g: Graph) -> BlockCutTree:
    if g.directed:
        raise GraphError("block-cut trees are defined for undirected graphs")
    if g.n == 0 or len(connected_component(g, 0)) != g.n:
        raise GraphError("block-cut tree needs a connected, non-empty graph")
    blocks, cuts = biconnected_blocks(g)
    blocks.sort(key=lambda b: sorted(b))
    tree_edges = tuple(
        (i, c) for i, b in enumerate(blocks) for c in sorted(cuts) if c in b
    )
    return BlockCutTree(tuple(blocks), tuple(sorted(cuts)), tree_edges)


def blocks_between(g: Graph, s: int, t: int) -> tuple[Subgraph, BlockCutTree, list[Node]]:
    """Component of ``s``, its block-cut tree and the tree path from s to t.

    The path is expressed in the component's local ids.
    """
    comp = induced_subgraph(g, connected_component(g, s))
    if t not in comp:
        raise GraphError(f"vertices {s} and {t} are disconnected")
    bct = block_cut_tree(comp.graph)
    ls, lt = comp.local(s), comp.local(t)
    return comp, bct, bct.tree_path(bct.node_of(ls), bct.node_of(lt))


def relevant_part(g: Graph, s: int, t: int) -> Subgraph:
    """Induced subgraph on the vertices that lie on some (s, t)-path.

    Vertices outside the connected component of ``s`` are ignored.
    """
    if g.directed:
        raise GraphError("the relevant part is defined for undirected graphs")
    g.check_vertex(s)
    g.check_vertex(t)
    if s == t:
        raise GraphError("relevant part needs s != t")
    comp, bct, path = blocks_between(g, s, t)
    keep: set[int] = set()
    for kind, x in path:
        if kind == "B":
            keep |= bct.blocks[x]
    return induced_subgraph(g, (comp.to_host[v] for v in keep))
