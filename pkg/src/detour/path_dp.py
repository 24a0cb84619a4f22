"""Longest (s, t)-path by dynamic programming over a tree decomposition.

The decomposition is converted to a nice one (leaf / introduce vertex /
introduce edge / forget / join) with ``s`` and ``t`` added to every bag, so
both terminals stay visible until the root and are pinned to degree <= 1.

A DP state assigns each bag vertex a code:

* ``-1``  -- degree 0 in the partial solution,
* ``-2``  -- degree 2 (interior of a partial path),
* ``p >= 0`` -- degree 1, and ``p`` is the bag vertex at the other end of the
  same partial path.

Every partial-path endpoint is a bag vertex, because a forgotten vertex must
have degree 0 or 2 and the terminals are never forgotten.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Graph, GraphError, Path, bfs_distances
from .treewidth import TreeDecomposition, require_valid

DEG0 = -1
DEG2 = -2


@dataclass
class _Nice:
    kind: str  # leaf | intro | forget | edge | join
    bag: tuple[int, ...]
    children: tuple[int, ...] = ()
    u: int = -1
    v: int = -1


def _nice_decomposition(g: Graph, td: TreeDecomposition, s: int, t: int) -> list[_Nice]:
    """Nice decomposition in post-order; the last node is the root with bag {s, t}."""
    extra = {s, t}
    bags = [frozenset(b) | extra for b in td.bags]
    nbrs = td.neighbors()
    adj = g.adj
    nodes: list[_Nice] = []
    introduced: set[tuple[int, int]] = set()

    def add(node: _Nice) -> int:
        nodes.append(node)
        return len(nodes) - 1

    def intro_edges_of(x: int, cur: set[int], top: int) -> int:
        for y in adj[x]:
            e = (min(x, y), max(x, y))
            if y in cur and e not in introduced:
                introduced.add(e)
                top = add(_Nice("edge", tuple(sorted(cur)), (top,), e[0], e[1]))
        return top

    def chain(top: int, src: frozenset[int], dst: frozenset[int]) -> int:
        cur = set(src)
        for x in sorted(src - dst):
            top = intro_edges_of(x, cur, top)
            cur.discard(x)
            top = add(_Nice("forget", tuple(sorted(cur)), (top,), x))
        for x in sorted(dst - src):
            cur.add(x)
            top = add(_Nice("intro", tuple(sorted(cur)), (top,), x))
        return top

    # iterative post-order over the decomposition tree rooted at node 0
    order: list[int] = []
    parent = {0: -1}
    stack = [0]
    while stack:
        x = stack.pop()
        order.append(x)
        for y in nbrs[x]:
            if y not in parent:
                parent[y] = x
                stack.append(y)
    built: dict[int, int] = {}
    for x in reversed(order):
        kids = [y for y in nbrs[x] if parent.get(y) == x]
        if not kids:
            leaf = add(_Nice("leaf", ()))
            built[x] = chain(leaf, frozenset(), bags[x])
            continue
        tops = [chain(built[y], bags[y], bags[x]) for y in kids]
        top = tops[0]
        for other in tops[1:]:
            top = add(_Nice("join", tuple(sorted(bags[x])), (top, other)))
        built[x] = top
    top = chain(built[0], bags[0], frozenset(extra))
    cur = set(extra)
    for x in sorted(extra):
        top = intro_edges_of(x, cur, top)
    return nodes


def _degree(code: int) -> int:
    if code == DEG0:
        return 0
    if code == DEG2:
        return 2
    return 1


def _join(ls: dict[int, int], rs: dict[int, int], s: int, t: int) -> dict[int, int] | None:
    new: dict[int, int] = {}
    aux: dict[int, list[int]] = {}
    for v, cl in ls.items():
        cr = rs[v]
        d = _degree(cl) + _degree(cr)
        if d > 2 or (d > 1 and (v == s or v == t)):
            return None
        new[v] = DEG0 if d == 0 else DEG2
        if cl >= 0:
            aux.setdefault(v, []).append(cl)
        if cr >= 0:
            aux.setdefault(v, []).append(cr)
    visited = set()
    for v, links in aux.items():
        if len(links) != 1 or v in visited:
            continue
        prev, cur = v, links[0]
        visited.add(v)
        while True:
            visited.add(cur)
            nxt = aux[cur]
            if len(nxt) == 1:
                break
            # joint: the two links are the two sides; step away from prev
            a, b = nxt
            step = b if a == prev else a
            if a == b:
                return None
            prev, cur = cur, step
        new[v] = cur
        new[cur] = v
    if len(visited) != len(aux):
        return None  # some segments closed into a cycle
    return new


def _solve_tables(nodes: list[_Nice], s: int, t: int):
    tables: list[dict[tuple, tuple[int, object]]] = []
    for node in nodes:
        bag = node.bag
        table: dict[tuple, tuple[int, object]] = {}

        def offer(state: dict[int, int], value: int, back: object) -> None:
            key = tuple(state[v] for v in bag)
            old = table.get(key)
            if old is None or value > old[0]:
                table[key] = (value, back)

        if node.kind == "leaf":
            table[()] = (0, None)
        elif node.kind in ("intro", "forget"):
            # pure re-indexing: map child keys to this bag positionally
            child = nodes[node.children[0]]
            pos = {v: i for i, v in enumerate(child.bag)}
            picks = [pos.get(v) for v in bag]
            drop = pos[node.u] if node.kind == "forget" else None
            for key, (val, _) in tables[node.children[0]].items():
                if drop is not None and key[drop] >= 0:
                    continue  # a forgotten vertex must not be a dangling end
                new = tuple(DEG0 if i is None else key[i] for i in picks)
                old = table.get(new)
                if old is None or val > old[0]:
                    table[new] = (val, key)
        elif node.kind == "edge":
            pos = {v: i for i, v in enumerate(bag)}
            u, v = node.u, node.v
            iu, iv = pos[u], pos[v]
            u_end, v_end = u in (s, t), v in (s, t)
            for key, (val, _) in tables[node.children[0]].items():
                old = table.get(key)
                if old is None or val > old[0]:
                    table[key] = (val, (key, False))
                cu, cv = key[iu], key[iv]
                if cu == DEG2 or cv == DEG2 or cu == v:
                    continue
                if (u_end and cu != DEG0) or (v_end and cv != DEG0):
                    continue
                a = u if cu == DEG0 else cu
                b = v if cv == DEG0 else cv
                st = list(key)
                if cu != DEG0:
                    st[iu] = DEG2
                if cv != DEG0:
                    st[iv] = DEG2
                st[pos[a]] = b
                st[pos[b]] = a
                new = tuple(st)
                old = table.get(new)
                if old is None or val + 1 > old[0]:
                    table[new] = (val + 1, (key, True))
        else:  # join
            left, right = node.children
            ltab, rtab = tables[left], tables[right]
            rlist = [(dict(zip(bag, k)), k, vr) for k, (vr, _) in rtab.items()]
            for lk, (vl, _) in ltab.items():
                lst = dict(zip(bag, lk))
                for rst, rk, vr in rlist:
                    st = _join(lst, rst, s, t)
                    if st is not None:
                        offer(st, vl + vr, (lk, rk))
        tables.append(table)
    return tables


def longest_st_path(g: Graph, td: TreeDecomposition, s: int, t: int, check: bool = True) -> Path | None:
    """A maximum-length (s, t)-path, or None if t is unreachable from s."""
    if g.directed:
        raise GraphError("longest_st_path needs an undirected graph")
    g.check_vertex(s)
    g.check_vertex(t)
    if s == t:
        raise GraphError("longest_st_path needs s != t")
    if check:
        require_valid(g, td)
    if t not in bfs_distances(g, s):
        return None
    nodes = _nice_decomposition(g, td, s, t)
    tables = _solve_tables(nodes, s, t)
    root = len(nodes) - 1
    rbag = nodes[root].bag
    final = tuple(t if v == s else s for v in rbag)
    if final not in tables[root]:
        return None
    used = _collect_edges(nodes, tables, root, final)
    return _edges_to_path(used, s, t)


def _collect_edges(nodes, tables, root, key) -> list[tuple[int, int]]:
    used = []
    stack = [(root, key)]
    while stack:
        i, k = stack.pop()
        node = nodes[i]
        back = tables[i][k][1]
        if node.kind == "leaf":
            continue
        if node.kind == "join":
            lk, rk = back
            stack.append((node.children[0], lk))
            stack.append((node.children[1], rk))
        elif node.kind == "edge":
            prev, took = back
            if took:
                used.append((node.u, node.v))
            stack.append((node.children[0], prev))
        else:
            stack.append((node.children[0], back))
    return used


def _edges_to_path(edges: list[tuple[int, int]], s: int, t: int) -> Path:
    nb: dict[int, list[int]] = {}
    for a, b in edges:
        nb.setdefault(a, []).append(b)
        nb.setdefault(b, []).append(a)
    path = [s]
    prev = -1
    while path[-1] != t:
        cur = path[-1]
        nxt = [w for w in nb[cur] if w != prev]
        prev = cur
        path.append(nxt[0])
    if len(path) - 1 != len(edges):
        raise AssertionError("DP reconstruction produced a disconnected edge set")
    return tuple(path)
