"""Tree decompositions: validation, elimination heuristics, exact small-n DP,
minor-based lower bounds and PACE ``.td`` I/O."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .graph import Graph, GraphError


class DecompositionError(ValueError):
    """The decomposition is structurally broken (not a tree, bad vertex ids)."""


class TreewidthBudgetExceeded(RuntimeError):
    """The exact search would exceed its size budget; fall back to a heuristic."""


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def neighbors(self) -> list[list[int]]:
        nbrs: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.tree_edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        return [sorted(x) for x in nbrs]


@dataclass
class ValidityReport:
    t1: bool = True
    t2: bool = True
    t3: bool = True
    uncovered_vertex: int | None = None
    uncovered_edge: tuple[int, int] | None = None
    disconnected_vertex: int | None = None
    messages: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.t1 and self.t2 and self.t3


def _check_tree(td: TreeDecomposition) -> None:
    k = len(td.bags)
    if k == 0:
        raise DecompositionError("decomposition has no nodes")
    if len(td.tree_edges) != k - 1:
        raise DecompositionError(f"{k} nodes need {k - 1} tree edges, got {len(td.tree_edges)}")
    for a, b in td.tree_edges:
        if not (0 <= a < k and 0 <= b < k) or a == b:
            raise DecompositionError(f"bad tree edge ({a}, {b})")
    nbrs = td.neighbors()
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in nbrs[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != k:
        raise DecompositionError("decomposition tree is disconnected")


def validate_decomposition(g: Graph, td: TreeDecomposition) -> ValidityReport:
    _check_tree(td)
    rep = ValidityReport()
    for bag in td.bags:
        for v in bag:
            if not 0 <= v < g.n:
                raise DecompositionError(f"bag vertex {v} is not a vertex of the graph")
    occurs: list[list[int]] = [[] for _ in range(g.n)]
    for i, bag in enumerate(td.bags):
        for v in bag:
            occurs[v].append(i)
    for v in range(g.n):
        if not occurs[v]:
            rep.t1 = False
            rep.uncovered_vertex = v
            rep.messages.append(f"(T1) vertex {v} is in no bag")
            break
    for u, v in g.edges:
        if not any(u in td.bags[i] for i in occurs[v]):
            rep.t2 = False
            rep.uncovered_edge = (u, v)
            rep.messages.append(f"(T2) edge ({u}, {v}) is in no bag")
            break
    nbrs = td.neighbors()
    for v in range(g.n):
        nodes = set(occurs[v])
        if not nodes:
            continue
        start = next(iter(nodes))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                if y in nodes and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen != nodes:
            rep.t3 = False
            rep.disconnected_vertex = v
            rep.messages.append(f"(T3) bags containing {v} are not connected")
            break
    return rep


def require_valid(g: Graph, td: TreeDecomposition) -> None:
    rep = validate_decomposition(g, td)
    if not rep.valid:
        raise DecompositionError("; ".join(rep.messages))


# ---------------------------------------------------------------------------
# Elimination orderings


def decomposition_from_order(g: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Bags ``{v} + later neighbours in the fill graph``, one per vertex, in order.

    Each bag hangs below the bag of its earliest-eliminated later neighbour;
    the roots of the resulting forest are chained into a single tree.
    """
    if g.n == 0:
        return TreeDecomposition((frozenset(),), ())
    pos = {v: i for i, v in enumerate(order)}
    nbrs = [set(a) for a in g.to_undirected().adj]
    bags = []
    parent: list[int | None] = []
    for i, v in enumerate(order):
        later = nbrs[v]
        bags.append(frozenset(later | {v}))
        for a in later:
            nbrs[a].discard(v)
            nbrs[a] |= later - {a}
        parent.append(min((pos[a] for a in later), default=None))
    edges = []
    roots = []
    for i, p in enumerate(parent):
        if p is None:
            roots.append(i)
        else:
            edges.append((i, p))
    edges += [(a, b) for a, b in zip(roots, roots[1:])]
    return TreeDecomposition(tuple(bags), tuple(edges))


def elimination_order(g: Graph, strategy: str = "min-fill") -> list[int]:
    if strategy not in ("min-fill", "min-degree"):
        raise ValueError(f"unknown strategy {strategy!r}")
    nbrs = [set(a) for a in g.to_undirected().adj]
    alive = set(range(g.n))
    order = []
    while alive:
        if strategy == "min-degree":
            v = min(alive, key=lambda x: (len(nbrs[x]), x))
        else:
            v = min(alive, key=lambda x: (_fill_in(nbrs, x), x))
        order.append(v)
        later = nbrs[v]
        for a in later:
            nbrs[a].discard(v)
            nbrs[a] |= later - {a}
        alive.discard(v)
    return order


def _fill_in(nbrs: list[set[int]], v: int) -> int:
    nb = sorted(nbrs[v])
    missing = 0
    for i, a in enumerate(nb):
        na = nbrs[a]
        for b in nb[i + 1:]:
            if b not in na:
                missing += 1
    return missing


def heuristic_decomposition(g: Graph, strategy: str = "min-fill") -> TreeDecomposition:
    return decomposition_from_order(g, elimination_order(g, strategy))


# ---------------------------------------------------------------------------
# Exact treewidth by DP over vertex subsets


def exact_treewidth_small(g: Graph, budget: int = 16) -> TreeDecomposition:
    """Optimal decomposition via TW(S) = min_v max(TW(S - v), |Q(S - v, v)|).

    Q(S, v) is the set of vertices outside S + v reachable from v through S,
    i.e. the later neighbours of v in the fill graph when S is eliminated first.
    """
    if g.n > budget:
        raise TreewidthBudgetExceeded(f"n = {g.n} exceeds the exact-search budget {budget}")
    n = g.n
    if n == 0:
        return TreeDecomposition((frozenset(),), ())
    adjm = [0] * n
    for u, v in g.to_undirected().edges:
        adjm[u] |= 1 << v
        adjm[v] |= 1 << u
    full = (1 << n) - 1

    def q_size(s: int, v: int) -> int:
        # component of v inside s | {v}, then its outside neighbourhood
        comp = 1 << v
        frontier = comp
        while frontier:
            nb = 0
            f = frontier
            while f:
                low = f & -f
                nb |= adjm[low.bit_length() - 1]
                f ^= low
            new = nb & s & ~comp
            comp |= new
            frontier = new
        nb = 0
        f = comp
        while f:
            low = f & -f
            nb |= adjm[low.bit_length() - 1]
            f ^= low
        return bin(nb & ~comp & ~s & full).count("1")

    tw = [0] * (1 << n)
    choice = [0] * (1 << n)
    tw[0] = -1
    for s in range(1, 1 << n):
        best = n + 1
        bestv = -1
        f = s
        while f:
            low = f & -f
            v = low.bit_length() - 1
            f ^= low
            rest = s ^ low
            val = tw[rest]
            if val >= best:
                continue
            q = q_size(rest, v)
            if q > val:
                val = q
            if val < best:
                best, bestv = val, v
        tw[s] = best
        choice[s] = bestv
    order = []
    s = full
    while s:
        v = choice[s]
        order.append(v)
        s ^= 1 << v
    order.reverse()
    return decomposition_from_order(g, order)


# ---------------------------------------------------------------------------
# Lower bound


def treewidth_lower_bound(g: Graph) -> int:
    """MMD+ (min-d): repeatedly contract a minimum-degree vertex into its
    minimum-degree neighbour; the largest minimum degree seen is a lower bound
    on the treewidth of every minor, hence of ``g``."""
    nbrs = {v: set(a) for v, a in enumerate(g.to_undirected().adj)}
    best = 0
    while len(nbrs) > 1:
        v = min(nbrs, key=lambda x: (len(nbrs[x]), x))
        dv = len(nbrs[v])
        best = max(best, dv)
        if dv == 0:
            del nbrs[v]
            continue
        u = min(nbrs[v], key=lambda x: (len(nbrs[x]), x))
        for w in nbrs[v]:
            nbrs[w].discard(v)
            if w != u:
                nbrs[w].add(u)
                nbrs[u].add(w)
        del nbrs[v]
    return best


# ---------------------------------------------------------------------------
# PACE .td format (1-based bag ids and vertices)


def format_td(td: TreeDecomposition, n: int) -> str:
    lines = [f"s td {len(td.bags)} {td.width + 1} {n}"]
    for i, bag in enumerate(td.bags):
        lines.append(" ".join(["b", str(i + 1)] + [str(v + 1) for v in sorted(bag)]))
    lines += [f"{a + 1} {b + 1}" for a, b in td.tree_edges]
    return "\n".join(lines) + "\n"


def parse_td(text: str) -> tuple[TreeDecomposition, int]:
    bags: dict[int, frozenset[int]] = {}
    edges = []
    header = None
    for lineno, line in enumerate(text.splitlines(), 1):
        toks = line.split()
        if not toks or toks[0] == "c":
            continue
        try:
            if toks[0] == "s":
                if len(toks) != 5 or toks[1] != "td":
                    raise GraphError(f"line {lineno}: expected 's td <bags> <width+1> <n>'")
                header = tuple(int(x) for x in toks[2:])
            elif toks[0] == "b":
                bags[int(toks[1]) - 1] = frozenset(int(x) - 1 for x in toks[2:])
            else:
                a, b = toks
                edges.append((int(a) - 1, int(b) - 1))
        except ValueError:
            raise GraphError(f"line {lineno}: malformed .td line {line!r}") from None
    if header is None:
        raise GraphError("missing .td header line")
    nbags, _, n = header
    if sorted(bags) != list(range(nbags)):
        raise GraphError(f"expected bags 1..{nbags}")
    return TreeDecomposition(tuple(bags[i] for i in range(nbags)), tuple(edges)), n
