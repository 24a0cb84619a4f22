"""Subdivided tetrahedra: generation, (u, v)-path census, long reroutes inside
a model, routing terminals into a model, and a small exhaustive model finder."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

from .blocks import block_cut_tree, relevant_part
from .brute import iter_st_paths
from .graph import Graph, GraphError, Path, bfs_distances, induced_subgraph, is_path

# K4 edges in the fixed order b1b2, b1b3, b1b4, b2b3, b2b4, b3b4
PAIRS: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PAIR_INDEX = {p: i for i, p in enumerate(PAIRS)}

# every (u, v)-path for interior u, v, written as branch-vertex sequences
ROUTE_LABELS: dict[str, frozenset[str]] = {
    "a": frozenset({"u v", "u b1 b4 b2 v", "u b1 b3 b2 v", "u b1 b3 b4 b2 v", "u b1 b4 b3 b2 v"}),
    "b": frozenset({
        "u b1 v", "u b2 b3 v", "u b1 b4 b3 v", "u b2 b4 b3 v",
        "u b2 b4 b1 v", "u b1 b4 b2 b3 v", "u b2 b3 b4 b1 v",
    }),
    "c": frozenset({
        "u b1 b3 v", "u b1 b4 v", "u b2 b3 v", "u b2 b4 v",
        "u b1 b3 b2 b4 v", "u b1 b4 b2 b3 v", "u b2 b3 b1 b4 v", "u b2 b4 b1 b3 v",
    }),
}


class TetraError(GraphError):
    """A model is malformed or violates a routing precondition."""


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class TetraModel:
    """Four branch vertices and six realizing paths, in ``PAIRS`` order.

    ``k`` is the claimed subdivision floor: every path has >= k + 1 edges.
    """

    branches: tuple[int, int, int, int]
    paths: tuple[Path, ...]
    k: int | None = None

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(p) - 1 for p in self.paths)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(p) - 2 for p in self.paths)

    def vertices(self) -> frozenset[int]:
        return frozenset(v for p in self.paths for v in p)

    def edges(self) -> set[tuple[int, int]]:
        return {_pair(a, b) for p in self.paths for a, b in zip(p, p[1:])}

    def path(self, i: int, j: int) -> Path:
        """Realizing path from branch i to branch j (0-based)."""
        if i < j:
            return self.paths[PAIR_INDEX[(i, j)]]
        return self.paths[PAIR_INDEX[(j, i)]][::-1]

    def carriers(self, x: int) -> list[int]:
        """Indices of the realizing paths that contain ``x``."""
        return [i for i, p in enumerate(self.paths) if x in p]

    def validate(self, host: Graph | None = None) -> None:
        if len(self.branches) != 4 or len(set(self.branches)) != 4:
            raise TetraError("a model needs four distinct branch vertices")
        if len(self.paths) != 6:
            raise TetraError(f"a model needs six paths, got {len(self.paths)}")
        seen: dict[int, int] = {}
        for idx, ((i, j), p) in enumerate(zip(PAIRS, self.paths)):
            if len(p) < 2 or p[0] != self.branches[i] or p[-1] != self.branches[j]:
                raise TetraError(f"path {idx} does not join b{i + 1} and b{j + 1}")
            if len(set(p)) != len(p):
                raise TetraError(f"path {idx} repeats a vertex")
            for x in p[1:-1]:
                if x in self.branches:
                    raise TetraError(f"path {idx} passes through branch vertex {x}")
                if x in seen:
                    raise TetraError(f"paths {seen[x]} and {idx} share interior vertex {x}")
                seen[x] = idx
            if self.k is not None and len(p) - 1 < self.k + 1:
                raise TetraError(f"path {idx} has {len(p) - 1} edges, fewer than k + 1 = {self.k + 1}")
            if host is not None and not is_path(host, p):
                raise TetraError(f"path {idx} is not a path of the host graph")
        deg: dict[int, int] = {}
        for a, b in self.edges():
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        for b in self.branches:
            if deg[b] != 3:
                raise TetraError(f"branch vertex {b} has degree {deg[b]} in the model")

    def as_graph(self):
        """The model's own edge set as a subgraph over host ids (not induced)."""
        verts = sorted(self.vertices())
        index = {v: i for i, v in enumerate(verts)}
        g = Graph(len(verts), tuple((index[a], index[b]) for a, b in sorted(self.edges())))
        return g, tuple(verts), index


def gen_subdivided_k4(counts: Sequence[int], k: int | None = None) -> tuple[Graph, TetraModel]:
    """K4 on branches 0..3 with ``counts[i]`` subdivision vertices on ``PAIRS[i]``.

    Subdivision vertices are numbered from 4 upward, path by path.
    """
    counts = tuple(counts)
    if len(counts) != 6 or any(c < 0 for c in counts):
        raise GraphError("need six non-negative subdivision counts")
    nxt = 4
    paths = []
    edges = []
    for (i, j), c in zip(PAIRS, counts):
        p = (i, *range(nxt, nxt + c), j)
        nxt += c
        paths.append(p)
        edges.extend(zip(p, p[1:]))
    g = Graph.from_edges(nxt, edges)
    model = TetraModel((0, 1, 2, 3), tuple(paths), k)
    model.validate(g)
    return g, model


# ---------------------------------------------------------------------------
# Position cases


@dataclass(frozen=True)
class PositionCase:
    """``labels[i]`` is the host vertex playing b(i+1) after normalization.

    Case a: u, v on the b1b2 path in the order b1, u, v, b2.  Case b: u on
    b1b2, v on b1b3.  Case c: u on b1b2, v on b3b4.
    """

    tag: str
    carrier_u: int
    carrier_v: int
    labels: tuple[int, int, int, int]


def classify_positions(model: TetraModel, u: int, v: int) -> PositionCase:
    verts = model.vertices()
    for x in (u, v):
        if x not in verts:
            raise TetraError(f"vertex {x} is not in the model")
    if u == v:
        raise TetraError("u and v must differ")
    br = model.branches
    cu, cv = model.carriers(u), model.carriers(v)
    # prefer the most specific case when a branch vertex offers several carriers
    for pu in cu:
        if pu in cv:
            i, j = PAIRS[pu]
            p = model.paths[pu]
            if p.index(u) > p.index(v):
                i, j = j, i
            rest = [x for x in range(4) if x not in (i, j)]
            return PositionCase("a", pu, pu, (br[i], br[j], br[rest[0]], br[rest[1]]))
    for pu, pv in itertools.product(cu, cv):
        shared = set(PAIRS[pu]) & set(PAIRS[pv])
        if shared:
            (a,) = shared
            x = PAIRS[pu][0] + PAIRS[pu][1] - a
            y = PAIRS[pv][0] + PAIRS[pv][1] - a
            (w,) = set(range(4)) - {a, x, y}
            return PositionCase("b", pu, pv, (br[a], br[x], br[y], br[w]))
    pu, pv = cu[0], cv[0]
    i, j = PAIRS[pu]
    x, y = PAIRS[pv]
    return PositionCase("c", pu, pv, (br[i], br[j], br[x], br[y]))


def enumerate_uv_paths(model: TetraModel, u: int, v: int) -> list[Path]:
    """Every simple (u, v)-path in the model, by DFS."""
    g, verts, index = model.as_graph()
    if u not in index or v not in index:
        raise TetraError("u and v must lie in the model")
    return [tuple(verts[x] for x in p) for p in iter_st_paths(g, index[u], index[v])]


def branch_sequence(path: Path, case: PositionCase) -> str:
    """Project a (u, v)-path onto the labelled branch vertices it visits."""
    name = {b: f"b{i + 1}" for i, b in enumerate(case.labels)}
    inner = [name[x] for x in path[1:-1] if x in name]
    return " ".join(["u", *inner, "v"])


# ---------------------------------------------------------------------------
# Longest reroute inside a model


def _segment_graph(model: TetraModel, u: int, v: int):
    """Contract degree-2 runs: nodes are branches plus u and v, edges are
    vertex runs between consecutive nodes along a realizing path."""
    special = set(model.branches) | {u, v}
    segs: list[Path] = []
    for p in model.paths:
        cut = [i for i, x in enumerate(p) if x in special]
        segs.extend(p[a:b + 1] for a, b in zip(cut, cut[1:]))
    inc: dict[int, list[int]] = {x: [] for x in special}
    for i, sg in enumerate(segs):
        inc[sg[0]].append(i)
        inc[sg[-1]].append(i)
    return segs, inc


def _segment_routes(segs, inc, u: int, v: int) -> Iterator[tuple[int, list[tuple[int, bool]]]]:
    """(length, [(segment, reversed?)]) for every simple (u, v)-route."""
    stack = [(u, 0, [], {u})]
    while stack:
        x, ln, route, seen = stack.pop()
        if x == v:
            yield ln, route
            continue
        for i in inc[x]:
            sg = segs[i]
            rev = sg[0] != x
            y = sg[0] if rev else sg[-1]
            if y in seen:
                continue
            stack.append((y, ln + len(sg) - 1, route + [(i, rev)], seen | {y}))


def detour_in_k4(model: TetraModel, u: int, v: int) -> Path:
    """A longest (u, v)-path of the model."""
    if u == v:
        raise TetraError("u and v must differ")
    verts = model.vertices()
    if u not in verts or v not in verts:
        raise TetraError("u and v must lie in the model")
    segs, inc = _segment_graph(model, u, v)
    best = max(_segment_routes(segs, inc, u, v), key=lambda r: r[0])
    out = [u]
    for i, rev in best[1]:
        sg = segs[i][::-1] if rev else segs[i]
        out.extend(sg[1:])
    return tuple(out)


# ---------------------------------------------------------------------------
# Routing s and t into a model


def _two_disjoint_paths(g: Graph, sources: tuple[int, int], targets: set[int]) -> tuple[Path, Path]:
    """Vertex-disjoint paths from each source into ``targets`` (unit vertex
    capacities, two augmentations of a split-vertex flow network)."""
    n = g.n
    src, snk = 2 * n, 2 * n + 1
    cap: dict[tuple[int, int], int] = {}
    out: dict[int, list[int]] = {x: [] for x in range(2 * n + 2)}

    def arc(a: int, b: int) -> None:
        if (a, b) not in cap:
            cap[(a, b)] = 0
            cap.setdefault((b, a), 0)
            out[a].append(b)
            out[b].append(a)
        cap[(a, b)] += 1

    for x in range(n):
        arc(2 * x, 2 * x + 1)  # x_in -> x_out
    for a, b in g.edges:
        arc(2 * a + 1, 2 * b)
        arc(2 * b + 1, 2 * a)
    for x in sources:
        arc(src, 2 * x)
    for x in targets:
        arc(2 * x + 1, snk)
    orig = dict(cap)
    flow = 0
    while flow < 2:
        prev = {src: src}
        q = deque([src])
        while q and snk not in prev:
            a = q.popleft()
            for b in out[a]:
                if b not in prev and cap[(a, b)] > 0:
                    prev[b] = a
                    q.append(b)
        if snk not in prev:
            raise TetraError("no two disjoint paths into the model inside its block")
        b = snk
        while b != src:
            a = prev[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1
    paths = []
    for x in sources:
        walk = [x]
        node = 2 * x + 1
        while walk[-1] not in targets:
            # the unique edge arc leaving x_out that carries flow
            nxt = next(b for b in out[node] if b < 2 * n and b % 2 == 0 and orig.get((node, b), 0) > cap[(node, b)])
            walk.append(nxt // 2)
            node = nxt + 1
        paths.append(tuple(walk))
    return paths[0], paths[1]


def _first_hit(path: Path, targets: set[int]) -> Path:
    for i, x in enumerate(path):
        if x in targets:
            return path[: i + 1]
    raise TetraError("path never reaches the model")


def route_through_model(g: Graph, s: int, t: int, model: TetraModel) -> tuple[Path, int, int, Path]:
    """Disjoint stubs P_s = s..u and P_t = v..t meeting the model only at u, v."""
    if g.directed:
        raise TetraError("routing needs an undirected graph")
    rel = relevant_part(g, s, t)
    mverts = model.vertices()
    if not all(x in rel for x in mverts):
        raise TetraError("the model is not inside the relevant part of (s, t)")
    h = rel.graph
    ls, lt = rel.local(s), rel.local(t)
    lm = {rel.local(x) for x in mverts}
    bct = block_cut_tree(h)
    home = [i for i, b in enumerate(bct.blocks) if lm <= b]
    if len(home) != 1:
        raise TetraError("the model does not lie in a single block")
    c = home[0]
    tp = bct.tree_path(bct.node_of(ls), bct.node_of(lt))
    at = tp.index(("B", c))
    s1 = tp[at - 1][1] if at > 0 and tp[at - 1][0] == "C" else ls
    t1 = tp[at + 1][1] if at + 1 < len(tp) and tp[at + 1][0] == "C" else lt
    block = bct.blocks[c]

    # p_s and p_t avoid the block except at s', t'
    def stub(a: int, b: int, banned: set[int]) -> Path:
        sub = induced_subgraph(h, [x for x in range(h.n) if x not in banned])
        dist = bfs_distances(sub.graph, sub.local(a))
        if sub.local(b) not in dist:
            raise TetraError("terminal cannot reach the model's block")
        path = [sub.local(b)]
        while dist[path[-1]] > 0:
            path.append(next(y for y in sub.graph.adj[path[-1]] if dist.get(y) == dist[path[-1]] - 1))
        return sub.lift(path[::-1])

    ps = stub(ls, s1, set(block) - {s1})
    pt = stub(t1, lt, (set(block) - {t1}) | set(ps))

    inner = induced_subgraph(h, block)
    a, b = _two_disjoint_paths(inner.graph, (inner.local(s1), inner.local(t1)), {inner.local(x) for x in lm})
    p1 = _first_hit(inner.lift(a), lm)
    p2 = _first_hit(inner.lift(b), lm)
    u, v = p1[-1], p2[-1]
    full_s = rel.lift(ps[:-1] + p1)
    full_t = rel.lift(p2[::-1] + pt[1:])
    return full_s, rel.to_host[u], rel.to_host[v], full_t


def build_detour_via_k4(g: Graph, s: int, t: int, model: TetraModel) -> Path:
    """An (s, t)-path of length >= d(s, t) + k through a K4^(k) model."""
    if model.k is None:
        raise TetraError("the model needs a declared subdivision floor k")
    model.validate(g)
    ps, u, v, pt = route_through_model(g, s, t, model)
    q = detour_in_k4(model, u, v)
    path = ps[:-1] + q + pt[1:]
    d = bfs_distances(g, s)[t]
    if not is_path(g, path, s, t):
        raise TetraError(f"assembled sequence {path} is not an (s, t)-path")
    if len(path) - 1 < d + model.k:
        raise TetraError(f"assembled path has length {len(path) - 1} < {d + model.k}")
    return path


# ---------------------------------------------------------------------------
# Exhaustive model search (small graphs)


class _Budget(Exception):
    pass


def _paths_exact(g: Graph, a: int, b: int, length: int, blocked: set[int], tick) -> Iterator[Path]:
    path = [a]
    on = set(blocked) | {a}
    iters = [iter(g.adj[a])]
    while iters:
        for w in iters[-1]:
            tick()
            if w in on and w != b:
                continue
            if w == b:
                if len(path) == length:
                    yield tuple(path) + (b,)
                continue
            if len(path) < length:
                path.append(w)
                on.add(w)
                iters.append(iter(g.adj[w]))
                break
        else:
            iters.pop()
            on.discard(path.pop())


def _carve(g, quad, k, tick, used: set[int], done: list[Path], i: int) -> list[Path] | None:
    if i == 6:
        return list(done)
    x, y = PAIRS[i]
    a, b = quad[x], quad[y]
    others = set(quad) - {a, b}
    for length in range(k + 1, g.n):
        for p in _paths_exact(g, a, b, length, used | others, tick):
            inner = set(p[1:-1])
            done.append(p)
            got = _carve(g, quad, k, tick, used | inner, done, i + 1)
            if got is not None:
                return got
            done.pop()
    return None


def find_k4_subdivision(
    g: Graph, k: int, budget: int = 1_000_000, per_quad: int = 1_000
) -> tuple[TetraModel | None, bool]:
    """Search for a K4^(k) subgraph; returns (model, inconclusive).

    Candidate branch quadruples are vertices of degree >= 3 inside a common
    block, highest degree first; the six paths are carved one at a time by
    increasing length with backtracking.  Each quadruple gets at most
    ``per_quad`` search steps and the whole search at most ``budget``.
    ``inconclusive`` is False only when every quadruple was exhausted.
    """
    if g.directed:
        raise TetraError("model search needs an undirected graph")
    total = [0]
    local = [0]
    truncated = False

    def tick() -> None:
        total[0] += 1
        local[0] += 1
        if total[0] > budget or local[0] > per_quad:
            raise _Budget

    for block in _blocks(g):
        sub = induced_subgraph(g, block)
        h = sub.graph
        cands = sorted((x for x in range(h.n) if len(h.adj[x]) >= 3), key=lambda x: (-len(h.adj[x]), x))
        for quad in itertools.combinations(cands, 4):
            local[0] = 0
            try:
                found = _carve(h, quad, k, tick, set(), [], 0)
            except _Budget:
                truncated = True
                if total[0] > budget:
                    return None, True
                continue
            if found is not None:
                model = TetraModel(
                    tuple(sub.to_host[x] for x in quad),
                    tuple(sub.lift(p) for p in found),
                    k,
                )
                model.validate(g)
                return model, False
    return None, truncated


def _blocks(g: Graph) -> list[frozenset[int]]:
    from .blocks import biconnected_blocks

    blocks, _ = biconnected_blocks(g)
    return [b for b in blocks if len(b) >= 4]


def planted_host(k: int, rng, extra: int = 6, stub: int = 2) -> tuple[Graph, int, int, TetraModel]:
    """A K4^(k) with random counts in {k, k+1, k+2}, grown by random ears,
    with pendant paths to two distinct host vertices as terminals s and t.

    ``rng`` is a ``random.Random``.
    """
    g, model = gen_subdivided_k4([rng.randint(k, k + 2) for _ in range(6)], k)
    edges = set(g.edges)
    n = g.n
    for _ in range(extra):
        # an ear: a fresh path between two existing vertices keeps the host biconnected
        a, b = rng.sample(range(n), 2)
        inner = list(range(n, n + rng.randint(1, 3)))
        n += len(inner)
        chain = [a, *inner, b]
        edges.update(_pair(x, y) for x, y in zip(chain, chain[1:]))
    for _ in range(rng.randint(0, 3)):
        a, b = rng.sample(range(n), 2)
        if a != b:
            edges.add(_pair(a, b))
    x, y = rng.sample(range(n), 2)
    ends = []
    for anchor in (x, y):
        chain = [anchor, *range(n, n + rng.randint(1, stub))]
        n += len(chain) - 1
        edges.update(_pair(p, q) for p, q in zip(chain, chain[1:]))
        ends.append(chain[-1])
    host = Graph.from_edges(n, sorted(edges))
    return host, ends[0], ends[1], model
