"""Graph representation, BFS layers, layer-induced subgraphs and text I/O.

Vertices are dense integers ``0..n-1``.  Paths are plain tuples of vertex ids;
the length of a path is ``len(path) - 1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

Path = tuple[int, ...]


class GraphError(ValueError):
    """Malformed graph input or an invalid vertex argument."""


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph, directed or undirected.

    Undirected edges are stored as ``(min, max)`` pairs.  Adjacency lists are
    sorted so that every traversal in the package is deterministic.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    directed: bool = False
    adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    radj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _edge_set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphError("vertex count must be non-negative")
        out: list[list[int]] = [[] for _ in range(self.n)]
        inc: list[list[int]] = [[] for _ in range(self.n)]
        seen: set[tuple[int, int]] = set()
        normalized = []
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside [0, {self.n})")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            e = (u, v) if self.directed else (min(u, v), max(u, v))
            if e in seen:
                raise GraphError(f"duplicate edge ({u}, {v})")
            seen.add(e)
            normalized.append(e)
            out[u].append(v)
            inc[v].append(u)
            if not self.directed:
                out[v].append(u)
                inc[u].append(v)
        normalized.sort()
        object.__setattr__(self, "edges", tuple(normalized))
        object.__setattr__(self, "adj", tuple(tuple(sorted(a)) for a in out))
        object.__setattr__(self, "radj", tuple(tuple(sorted(a)) for a in inc))
        object.__setattr__(self, "_edge_set", frozenset(seen))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], directed: bool = False) -> "Graph":
        return cls(n, tuple((int(u), int(v)) for u, v in edges), directed)

    @property
    def m(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(self.n)

    def has_edge(self, u: int, v: int) -> bool:
        if not self.directed and u > v:
            u, v = v, u
        return (u, v) in self._edge_set

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def check_vertex(self, v: int) -> None:
        if not isinstance(v, int) or not 0 <= v < self.n:
            raise GraphError(f"vertex {v!r} is not in [0, {self.n})")

    def remove_edges(self, removed: Iterable[tuple[int, int]]) -> "Graph":
        drop = set()
        for u, v in removed:
            drop.add((u, v) if self.directed else (min(u, v), max(u, v)))
        return Graph(self.n, tuple(e for e in self.edges if e not in drop), self.directed)

    def add_vertices_and_edges(self, extra: int, new_edges: Iterable[tuple[int, int]]) -> "Graph":
        return Graph(self.n + extra, self.edges + tuple(new_edges), self.directed)

    def to_undirected(self) -> "Graph":
        if not self.directed:
            return self
        pairs = {(min(u, v), max(u, v)) for u, v in self.edges}
        return Graph(self.n, tuple(sorted(pairs)), False)


def is_path(g: Graph, seq: Sequence[int], s: int | None = None, t: int | None = None) -> bool:
    """True if ``seq`` is a simple path in ``g`` (respecting direction)."""
    if not seq:
        return False
    if any(not 0 <= v < g.n for v in seq):
        return False
    if len(set(seq)) != len(seq):
        return False
    if s is not None and seq[0] != s:
        return False
    if t is not None and seq[-1] != t:
        return False
    return all(g.has_edge(a, b) for a, b in zip(seq, seq[1:]))


def path_length(path: Sequence[int]) -> int:
    return len(path) - 1


# ---------------------------------------------------------------------------
# Induced subgraphs with id translation


@dataclass(frozen=True)
class Subgraph:
    """An induced subgraph together with its translation back to the host."""

    graph: Graph
    to_host: tuple[int, ...]
    host: Graph = field(repr=False, compare=False)

    @property
    def index(self) -> dict[int, int]:
        return {h: i for i, h in enumerate(self.to_host)}

    def local(self, host_vertex: int) -> int:
        try:
            return self.to_host.index(host_vertex)
        except ValueError:
            raise GraphError(f"vertex {host_vertex} is not in the subgraph") from None

    def lift(self, path: Sequence[int]) -> Path:
        return tuple(self.to_host[v] for v in path)

    def __contains__(self, host_vertex: int) -> bool:
        return host_vertex in self.to_host


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> Subgraph:
    keep = sorted(set(vertices))
    index = {v: i for i, v in enumerate(keep)}
    edges = tuple(
        (index[u], index[v]) for u, v in g.edges if u in index and v in index
    )
    return Subgraph(Graph(len(keep), edges, g.directed), tuple(keep), g)


# ---------------------------------------------------------------------------
# BFS layers


@dataclass(frozen=True)
class LayerMap(Mapping[int, int]):
    """Distances from a fixed source.  Unreachable vertices are absent."""

    source: int
    dist: Mapping[int, int]

    def __getitem__(self, v: int) -> int:
        return self.dist[v]

    def __iter__(self) -> Iterator[int]:
        return iter(self.dist)

    def __len__(self) -> int:
        return len(self.dist)

    def layer(self, i: int) -> list[int]:
        return sorted(v for v, d in self.dist.items() if d == i)


def bfs_distances(g: Graph, s: int) -> dict[int, int]:
    dist = {s: 0}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in g.adj[u]:
            if w not in dist:
                dist[w] = du
                queue.append(w)
    return dist


def bfs_layers(g: Graph, s: int) -> LayerMap:
    g.check_vertex(s)
    return LayerMap(s, bfs_distances(g, s))


def shortest_path(g: Graph, s: int, t: int) -> Path | None:
    """A shortest (s, t)-path, lexicographically smallest among BFS parents."""
    g.check_vertex(s)
    g.check_vertex(t)
    parent = {s: -1}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if u == t:
            break
        for w in g.adj[u]:
            if w not in parent:
                parent[w] = u
                queue.append(w)
    if t not in parent:
        return None
    path = [t]
    while path[-1] != s:
        path.append(parent[path[-1]])
    return tuple(reversed(path))


def distance(g: Graph, s: int, t: int) -> int | None:
    return bfs_distances(g, s).get(t)


def _layer_of(layers: LayerMap, v: int) -> int:
    if v not in layers:
        raise GraphError(f"vertex {v} is unreachable from the layer source {layers.source}")
    return layers[v]


def layer_slice(g: Graph, layers: LayerMap, u: int, v: int) -> Subgraph:
    """Induced subgraph on ``{u, v}`` and every x with d(u) < d(x) < d(v)."""
    du, dv = _layer_of(layers, u), _layer_of(layers, v)
    if du >= dv:
        raise GraphError(f"layer slice needs d({u}) < d({v}), got {du} >= {dv}")
    keep = [x for x, dx in layers.items() if du < dx < dv]
    keep += [u, v]
    return induced_subgraph(g, keep)


def layer_tail(g: Graph, layers: LayerMap, u: int) -> Subgraph:
    """Induced subgraph on ``{u}`` and every x with d(x) > d(u)."""
    du = _layer_of(layers, u)
    keep = [x for x, dx in layers.items() if dx > du]
    keep.append(u)
    return induced_subgraph(g, keep)


def check_layer_property(g: Graph, layers: LayerMap) -> None:
    """Raise AssertionError if some edge violates the BFS layer property."""
    for a, b in g.edges:
        if g.directed:
            if a in layers:
                assert b in layers and layers[b] <= layers[a] + 1, (a, b)
        elif a in layers and b in layers:
            assert abs(layers[a] - layers[b]) <= 1, (a, b)


def connected_component(g: Graph, s: int) -> set[int]:
    """Vertices weakly connected to ``s``."""
    seen = {s}
    stack = [s]
    while stack:
        u = stack.pop()
        for w in g.adj[u] + (g.radj[u] if g.directed else ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def is_connected(g: Graph) -> bool:
    return g.n == 0 or len(connected_component(g, 0)) == g.n


# ---------------------------------------------------------------------------
# Text formats


def parse_graph(text: str) -> Graph:
    """Parse the native ``n m directed|undirected`` format or DIMACS ``p edge``.

    Errors carry the 1-based line number of the offending line.
    """
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, toks) for i, toks in lines if toks and not toks[0].startswith("#")]
    if not lines:
        raise GraphError("empty graph file")
    if lines[0][1][0] in ("c", "p"):
        return _parse_dimacs(lines)
    return _parse_native(lines)


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphError(f"line {lineno}: expected an integer, got {tok!r}") from None


def _parse_native(lines: list[tuple[int, list[str]]]) -> Graph:
    lineno, header = lines[0]
    if len(header) != 3 or header[2] not in ("directed", "undirected"):
        raise GraphError(f"line {lineno}: header must be 'n m directed|undirected'")
    n, m = _int(header[0], lineno), _int(header[1], lineno)
    directed = header[2] == "directed"
    body = lines[1:]
    if len(body) != m:
        raise GraphError(f"line {lineno}: header declares {m} edges, found {len(body)}")
    return _build(n, directed, [(i, _int(t[0], i), _int(t[1], i)) for i, t in body if _pair(i, t)])


def _pair(lineno: int, toks: list[str]) -> bool:
    if len(toks) != 2:
        raise GraphError(f"line {lineno}: expected 'u v', got {' '.join(toks)!r}")
    return True


def _parse_dimacs(lines: list[tuple[int, list[str]]]) -> Graph:
    n = None
    directed = False
    edges: list[tuple[int, int, int]] = []
    for lineno, toks in lines:
        tag = toks[0]
        if tag == "c":
            continue
        if tag == "p":
            if len(toks) != 4 or toks[1] not in ("edge", "arc", "col"):
                raise GraphError(f"line {lineno}: expected 'p edge <n> <m>'")
            n = _int(toks[2], lineno)
            directed = toks[1] == "arc"
        elif tag in ("e", "a"):
            if n is None:
                raise GraphError(f"line {lineno}: edge before problem line")
            if len(toks) != 3:
                raise GraphError(f"line {lineno}: expected 'e u v'")
            edges.append((lineno, _int(toks[1], lineno) - 1, _int(toks[2], lineno) - 1))
        else:
            raise GraphError(f"line {lineno}: unknown DIMACS line type {tag!r}")
    if n is None:
        raise GraphError("missing DIMACS problem line")
    return _build(n, directed, edges)


def _build(n: int, directed: bool, edges: list[tuple[int, int, int]]) -> Graph:
    seen: dict[tuple[int, int], int] = {}
    for lineno, u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"line {lineno}: vertex out of range in edge ({u}, {v})")
        if u == v:
            raise GraphError(f"line {lineno}: self-loop at vertex {u}")
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            raise GraphError(f"line {lineno}: duplicate edge ({u}, {v}), first seen on line {seen[key]}")
        seen[key] = lineno
    return Graph(n, tuple((u, v) for _, u, v in edges), directed)


def format_graph(g: Graph) -> str:
    kind = "directed" if g.directed else "undirected"
    out = [f"{g.n} {g.m} {kind}"]
    out += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Small generators used by the CLI and the tests


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int, directed: bool = False) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], directed)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def grid_graph(rows: int, cols: int) -> Graph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges)


def random_graph(n: int, p: float, rng, directed: bool = False) -> Graph:
    """G(n, p) using ``rng.random()``; ``rng`` is a ``random.Random``."""
    if directed:
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    else:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return Graph.from_edges(n, [e for e in pairs if rng.random() < p], directed)
