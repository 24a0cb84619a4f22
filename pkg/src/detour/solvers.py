"""Longest Detour (win/win over treewidth), Exact Detour (layered DP over an
Exact Path oracle) and the search-to-decision reduction."""

from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Callable

from .blocks import relevant_part
from .graph import (
    Graph,
    GraphError,
    Path,
    bfs_distances,
    bfs_layers,
    is_path,
    layer_slice,
    layer_tail,
    shortest_path,
)
from .exact_path import ExactPathOracle, OracleConfig
from .path_dp import longest_st_path
from .treewidth import heuristic_decomposition, treewidth_lower_bound

SCHEMA_VERSION = 1


class ConsistencyError(RuntimeError):
    """A decision oracle gave answers that no graph could produce."""


def detour_enforcing_bound(k: int) -> int:
    """Treewidth above which the relevant part must contain a k-detour."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return 32 * k + 2


@dataclass(frozen=True)
class DetourInstance:
    graph: Graph
    s: int
    t: int
    k: int

    def __post_init__(self) -> None:
        self.graph.check_vertex(self.s)
        self.graph.check_vertex(self.t)
        if self.s == self.t:
            raise GraphError("detour instances need s != t")
        if self.k < 0:
            raise GraphError("k must be non-negative")


@dataclass
class SolveStats:
    oracle_calls: int = 0
    max_query_len: int = 0
    tw_upper: int | None = None
    tw_lower: int | None = None
    branch: str | None = None
    seed: int | None = None
    elapsed_ms: float = 0.0
    gate: str | None = None
    trials: int = 0
    decision_calls: int = 0


@dataclass
class SolveResult:
    problem: str
    answer: bool
    k: int
    distance: int | None
    witness: Path | None = None
    stats: SolveStats = field(default_factory=SolveStats)
    diagnostic: str | None = None
    gate_override: bool = False
    label: str | None = None

    def to_json(self) -> dict:
        st = asdict(self.stats)
        st["elapsed_ms"] = round(st["elapsed_ms"], 3)
        doc = {
            "schema": SCHEMA_VERSION,
            "problem": self.problem,
            "answer": "yes" if self.answer else "no",
            "k": self.k,
            "distance": self.distance,
            "witness": list(self.witness) if self.witness is not None else None,
            "stats": st,
            "gate_override": self.gate_override,
        }
        if self.label:
            doc["label"] = self.label
        if self.diagnostic:
            doc["diagnostic"] = self.diagnostic
        return doc


def _check_witness(g: Graph, s: int, t: int, path: Path, minimum: int, exact: bool) -> None:
    if not is_path(g, path, s, t):
        raise ConsistencyError(f"witness {path} is not an ({s},{t})-path")
    ln = len(path) - 1
    if ln < minimum or (exact and ln != minimum):
        raise ConsistencyError(f"witness length {ln} misses the target {minimum}")


# ---------------------------------------------------------------------------
# Longest Detour


def solve_longest_detour(
    inst: DetourInstance,
    *,
    gate_override: int | None = None,
    strategy: str = "min-fill",
    construct: bool = False,
    k4_budget: int = 1_000_000,
) -> SolveResult:
    start = time.perf_counter()
    g, s, t, k = inst.graph, inst.s, inst.t, inst.k
    if g.directed:
        raise GraphError("Longest Detour is only supported on undirected graphs")
    res = SolveResult("longest-detour", False, k, None, gate_override=gate_override is not None)
    st = res.stats

    def done() -> SolveResult:
        st.elapsed_ms = (time.perf_counter() - start) * 1000
        return res

    if t not in bfs_distances(g, s):
        res.diagnostic = f"t={t} is unreachable from s={s}"
        st.branch = "unreachable"
        return done()
    if k == 0:
        res.answer = True
        res.witness = shortest_path(g, s, t)
        res.distance = len(res.witness) - 1
        st.branch = "k0"
        return done()

    # D1, D2
    rel = relevant_part(g, s, t)
    h = rel.graph
    hs, ht = rel.local(s), rel.local(t)
    d = bfs_distances(h, hs)[ht]
    res.distance = d

    # D3: a certified lower bound above f(k) stands in for LARGE
    bound = detour_enforcing_bound(k) if gate_override is None else gate_override
    st.tw_lower = treewidth_lower_bound(h)
    if st.tw_lower > bound:
        res.answer = True
        st.branch = "D3b"
        st.gate = "large"
        if gate_override is not None and gate_override < detour_enforcing_bound(k):
            res.label = "unsound_gate"
        if construct:
            res.witness = _construct_large(g, s, t, k, rel, k4_budget, st)
        return done()

    td = heuristic_decomposition(h, strategy)
    st.tw_upper = td.width
    st.gate = "small" if td.width <= bound else "inconclusive"
    st.branch = "D3a"
    best = longest_st_path(h, td, hs, ht, check=False)
    if best is not None and len(best) - 1 >= d + k:
        res.answer = True
        res.witness = rel.lift(best)
        _check_witness(g, s, t, res.witness, d + k, exact=False)
    return done()


def _construct_large(g: Graph, s: int, t: int, k: int, rel, budget: int, st: SolveStats) -> Path | None:
    from .tetra import build_detour_via_k4, find_k4_subdivision

    model, _ = find_k4_subdivision(rel.graph, k, budget)
    d = bfs_distances(g, s)[t]
    if model is not None:
        path = rel.lift(build_detour_via_k4(rel.graph, rel.local(s), rel.local(t), model))
        st.branch = "D3b+k4"
    else:
        calls = [0]

        def decider(gg: Graph, a: int, b: int, kk: int) -> bool:
            calls[0] += 1
            return solve_longest_detour(DetourInstance(gg, a, b, kk)).answer

        path = search_to_decision(DetourInstance(g, s, t, k), decider)
        st.decision_calls = calls[0]
        st.branch = "D3b+search"
    if path is not None:
        _check_witness(g, s, t, path, d + k, exact=False)
    return path


# ---------------------------------------------------------------------------
# Exact Detour


@dataclass
class DetourTable:
    """T[x] for every x with d(x) <= d(t), plus witnesses for stored lengths."""

    target: int
    k: int
    dist: dict[int, int]
    entries: dict[int, set[int]]
    _back: dict[tuple[int, int], tuple] = field(default_factory=dict, repr=False)

    def window(self, x: int) -> tuple[int, int]:
        lo = self.dist[self.target] - self.dist[x]
        return lo, lo + self.k

    def witness(self, x: int, length: int) -> Path:
        """An (x, t)-path of the stored length inside G[x, inf)."""
        out: list[int] = []
        while True:
            entry = self._back[(x, length)]
            if entry[0] == "tail":
                out.extend(entry[1])
                return tuple(out)
            _, y, head, rest = entry
            out.extend(head[:-1])
            x, length = y, rest


def exact_detour_table(g: Graph, s: int, t: int, k: int, oracle: ExactPathOracle, delta: float | None = None) -> DetourTable | None:
    """Fill the table of achievable (x, t)-path lengths layer by layer.

    Returns None when t is unreachable from s.
    """
    layers = bfs_layers(g, s)
    if t not in layers:
        return None
    dist = dict(layers.dist)
    top = dist[t]
    by_layer: dict[int, list[int]] = defaultdict(list)
    for x in sorted(dist):
        if dist[x] <= top:
            by_layer[dist[x]].append(x)
    table = DetourTable(t, k, dist, {x: set() for i in by_layer for x in by_layer[i]})
    T, back = table.entries, table._back

    # last k+1 layers: query the tail graph directly
    for i in range(max(0, top - k), top + 1):
        for x in by_layer[i]:
            if x != t and i == top:
                continue  # t is not in G[x, inf)
            lo, hi = table.window(x)
            tail = layer_tail(g, layers, x)
            for ln, p in oracle.query_sub(tail, x, t, range(lo, hi + 1), delta).items():
                T[x].add(ln)
                back[(x, ln)] = ("tail", p)

    # earlier layers: split at the first layer in reach that the path meets once
    for i in range(top - k - 1, -1, -1):
        lo, hi = top - i, top - i + k
        for x in by_layer[i]:
            for j in range(i + 1, i + k + 2):
                gap = j - i
                for y in by_layer[j]:
                    ty = T[y]
                    if not ty:
                        continue
                    needed = {
                        w - r for w in range(lo, hi + 1) for r in ty if gap <= w - r <= 2 * k + 1
                    }
                    if not needed:
                        continue
                    sl = layer_slice(g, layers, x, y)
                    found = oracle.query_sub(sl, x, y, needed, delta)
                    for ln, head in sorted(found.items()):
                        for r in sorted(ty):
                            w = ln + r
                            if lo <= w <= hi and w not in T[x]:
                                T[x].add(w)
                                back[(x, w)] = ("via", y, head, r)
    return table


def solve_exact_detour(
    inst: DetourInstance,
    cfg: OracleConfig | None = None,
    *,
    oracle: ExactPathOracle | None = None,
) -> SolveResult:
    """Exact Detour on directed or undirected graphs.

    ``cfg.delta`` bounds the total error; it is split evenly over at most
    n(n+1)(k+1) length queries.  Pass a shared ``oracle`` to reuse its cache
    across instances on the same graph.
    """
    start = time.perf_counter()
    g, s, t, k = inst.graph, inst.s, inst.t, inst.k
    if oracle is None:
        oracle = ExactPathOracle(cfg)
    cfg = oracle.cfg
    before_calls, before_trials = oracle.stats.calls, oracle.stats.trials
    oracle.stats.max_query_len = 0
    res = SolveResult("exact-detour", False, k, None)
    st = res.stats
    st.seed = oracle.seed
    st.branch = "A"
    delta_q = cfg.delta / (g.n * (g.n + 1) * (k + 1))
    table = exact_detour_table(g, s, t, k, oracle, delta_q)
    if table is None:
        res.diagnostic = f"t={t} is unreachable from s={s}"
        st.branch = "unreachable"
    else:
        d = table.dist[t]
        res.distance = d
        if d + k in table.entries[s]:
            res.answer = True
            res.witness = table.witness(s, d + k)
            _check_witness(g, s, t, res.witness, d + k, exact=True)
    st.oracle_calls = oracle.stats.calls - before_calls
    st.max_query_len = oracle.stats.max_query_len
    st.trials = oracle.stats.trials - before_trials
    st.elapsed_ms = (time.perf_counter() - start) * 1000
    return res


def query_parameter_audit(stats: SolveStats) -> int:
    """Largest path length asked of the Exact Path oracle (0 if none)."""
    return stats.max_query_len if stats.oracle_calls else 0


# ---------------------------------------------------------------------------
# Search to decision

Decider = Callable[[Graph, int, int, int], bool]


def longest_decider(g: Graph, s: int, t: int, k: int) -> bool:
    return solve_longest_detour(DetourInstance(g, s, t, k)).answer


def exact_decider(g: Graph, s: int, t: int, k: int) -> bool:
    cfg = OracleConfig(deterministic=True)
    return solve_exact_detour(DetourInstance(g, s, t, k), cfg).answer


def search_to_decision(inst: DetourInstance, decider: Decider | None = None, exact: bool = False) -> Path | None:
    """Build a detour from yes/no answers by deleting every removable edge.

    A fresh shortest path is planted first so that deletions never change
    d(s, t); when d(s, t) = 1 the existing edge st plays that role (a simple
    graph cannot hold a parallel copy, and no path longer than 1 uses it).
    """
    g, s, t, k = inst.graph, inst.s, inst.t, inst.k
    if decider is None:
        decider = exact_decider if exact else longest_decider
    if not decider(g, s, t, k):
        return None
    d = bfs_distances(g, s)[t]
    if k == 0:
        return shortest_path(g, s, t)
    n0 = g.n
    if d == 1:
        planted = {(min(s, t), max(s, t))}
        work = g
    else:
        chain = [s] + list(range(n0, n0 + d - 1)) + [t]
        new_edges = list(zip(chain, chain[1:]))
        work = g.add_vertices_and_edges(d - 1, new_edges)
        planted = {(min(a, b), max(a, b)) if not g.directed else (a, b) for a, b in new_edges}
    for e in g.edges:
        if e in planted:
            continue
        trial = work.remove_edges([e])
        if decider(trial, s, t, k):
            work = trial
    survivor = [e for e in work.edges if e not in planted]
    path = _edges_as_path(survivor, s, t, g.directed)
    if path is None:
        raise ConsistencyError(f"survivor edges {survivor} do not form a single ({s},{t})-path")
    ln = len(path) - 1
    if ln < d + k or (exact and ln != d + k):
        raise ConsistencyError(f"surviving path has length {ln}, needed {d + k}")
    return path


def _edges_as_path(edges: list[tuple[int, int]], s: int, t: int, directed: bool) -> Path | None:
    nxt: dict[int, list[int]] = defaultdict(list)
    deg: dict[int, int] = defaultdict(int)
    for a, b in edges:
        nxt[a].append(b)
        if not directed:
            nxt[b].append(a)
        deg[a] += 1
        deg[b] += 1
    path = [s]
    seen = {s}
    prev = None
    while path[-1] != t:
        options = [w for w in nxt[path[-1]] if w != prev]
        if len(options) != 1 or options[0] in seen:
            return None
        prev = path[-1]
        path.append(options[0])
        seen.add(options[0])
    if len(path) - 1 != len(edges):
        return None
    return tuple(path)
