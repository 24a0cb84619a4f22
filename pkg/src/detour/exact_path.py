"""Exact Path oracle: find an (s, t)-path with exactly ``len`` edges.

Randomized colour coding (one-sided error) with a deterministic exhaustive
fallback for small graphs.  Both directed and undirected graphs are handled.

The colour-coding DP runs all requested lengths at once.  For a colouring
``col`` with ``c`` colours, ``reach[j][v]`` is a bitset over colour masks: bit
``m`` is set iff some colourful (s, v)-walk with ``j`` edges uses exactly the
colour set ``m``.  Colourful walks are paths.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from .blocks import relevant_part
from .brute import iter_st_paths
from .graph import Graph, Path, Subgraph, bfs_distances, induced_subgraph

DEFAULT_SEED = 0


def default_seed() -> int:
    env = os.environ.get("DETOUR_SEED")
    return int(env) if env else DEFAULT_SEED


@dataclass(frozen=True)
class OracleConfig:
    """``delta`` is the false-negative probability allowed per query."""

    delta: float = 0.01
    trials: int | None = None
    fallback_threshold: int = 12
    seed: int | None = None
    deterministic: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.fallback_threshold < 0:
            raise ValueError("fallback threshold must be non-negative")
        if self.trials is not None and self.trials < 1:
            raise ValueError("trial override must be positive")

    def resolved_seed(self) -> int:
        return default_seed() if self.seed is None else self.seed


def trial_count(colors: int, delta: float) -> int:
    """Colourings needed so a fixed ``colors``-vertex path is missed w.p. <= delta.

    A uniform colouring makes a fixed path colourful with probability
    c!/c^c >= e^-c, hence ``ceil(e^c ln(1/delta))`` trials suffice.
    """
    return max(1, math.ceil(math.exp(colors) * math.log(1.0 / delta)))


def _restrict(g: Graph, s: int, t: int) -> Subgraph | None:
    """Vertices that can lie on an (s, t)-path (exact for undirected graphs)."""
    fwd = bfs_distances(g, s)
    if t not in fwd:
        return None
    if g.directed:
        rev = Graph(g.n, tuple((b, a) for a, b in g.edges), True)
        back = bfs_distances(rev, t)
        return induced_subgraph(g, [v for v in fwd if v in back])
    if s == t:
        return induced_subgraph(g, [s])
    return relevant_part(g, s, t)


def _brute_lengths(g: Graph, s: int, t: int, wanted: set[int]) -> dict[int, Path]:
    found: dict[int, Path] = {}
    for p in iter_st_paths(g, s, t, max_len=max(wanted)):
        ln = len(p) - 1
        if ln in wanted and ln not in found:
            found[ln] = p
            if len(found) == len(wanted):
                break
    return found


@lru_cache(maxsize=None)
def _mask_filters(c: int) -> tuple[int, ...]:
    """Entry x has bit m set iff colour mask m does not contain colour x."""
    out = []
    for x in range(c):
        # masks lacking bit x come in runs of 2^x, every 2^(x+1)
        block = (1 << (1 << x)) - 1
        bits = 0
        for start in range(0, 1 << c, 1 << (x + 1)):
            bits |= block << start
        out.append(bits)
    return tuple(out)


def _colourful_lengths(
    g: Graph, s: int, t: int, wanted: set[int], rng: np.random.Generator, trials: int
) -> tuple[dict[int, Path], int]:
    top = max(wanted)
    c = top + 1
    notc = _mask_filters(c)
    adj, radj = g.adj, g.radj
    n = g.n
    found: dict[int, Path] = {}
    used = 0
    batch = 256
    while used < trials and len(found) < len(wanted):
        cols = rng.integers(0, c, size=(min(batch, trials - used), n)).tolist()
        for col in cols:
            used += 1
            first = [0] * n
            first[s] = 1 << (1 << col[s])
            reach = [first]
            live = [s]
            for j in range(1, top + 1):
                prev = reach[-1]
                acc: dict[int, int] = {}
                for u in live:
                    bits = prev[u]
                    for w in adj[u]:
                        acc[w] = acc.get(w, 0) | bits
                cur = [0] * n
                live = []
                for w, bits in acc.items():
                    cw = col[w]
                    bits = (bits & notc[cw]) << (1 << cw)
                    if bits:
                        cur[w] = bits
                        live.append(w)
                reach.append(cur)
                if j in wanted and j not in found and cur[t]:
                    found[j] = _trace(reach, j, s, t, col, radj)
                if not live:
                    break
            if len(found) == len(wanted):
                break
    return found, used


def _trace(reach, j, s, t, col, radj) -> Path:
    bits = reach[j][t]
    mask = (bits & -bits).bit_length() - 1
    path = [t]
    cur = t
    for i in range(j, 0, -1):
        mask ^= 1 << col[cur]
        prev = reach[i - 1]
        cur = next(u for u in radj[cur] if prev[u] >> mask & 1)
        path.append(cur)
    assert cur == s
    return tuple(reversed(path))


@dataclass
class OracleStats:
    calls: int = 0
    max_query_len: int = 0
    query_lengths: list[int] = field(default_factory=list)
    trials: int = 0
    randomized_queries: int = 0
    cache_hits: int = 0


class ExactPathOracle:
    """Stateful Exact Path oracle with statistics, a seeded RNG and a cache.

    Answers are cached per (host graph, induced vertex set, s, t, length), so
    one oracle may be shared across instances on the same host graph.
    """

    def __init__(self, cfg: OracleConfig | None = None, record_lengths: bool = False):
        self.cfg = cfg or OracleConfig()
        self.seed = self.cfg.resolved_seed()
        self.rng = np.random.Generator(np.random.Philox(self.seed))
        self.stats = OracleStats()
        self.record_lengths = record_lengths
        self._cache: dict[tuple, tuple[Path | None, float]] = {}
        self._hosts: dict[int, Graph] = {}

    def reset_stats(self) -> None:
        self.stats = OracleStats()

    def query(self, g: Graph, s: int, t: int, lengths: Iterable[int], delta: float | None = None) -> dict[int, Path]:
        """Answer ``ExactPath(g, s, t, l)`` for every ``l`` in ``lengths``."""
        wanted = sorted(set(lengths))
        st = self.stats
        for ln in wanted:
            if ln < 0:
                raise ValueError("path length must be non-negative")
            st.calls += 1
            if ln > st.max_query_len:
                st.max_query_len = ln
            if self.record_lengths:
                st.query_lengths.append(ln)
        if not wanted:
            return {}
        return self._answer(g, s, t, set(wanted), self.cfg.delta if delta is None else delta)

    def query_sub(self, sub: Subgraph, s: int, t: int, lengths: Iterable[int], delta: float | None = None) -> dict[int, Path]:
        """Like :meth:`query` on an induced subgraph; ids in and out are host ids.

        A cached "no" is reused only if it was computed at an error bound no
        looser than ``delta``; cached paths are always reusable.
        """
        lengths = sorted(set(lengths))
        delta = self.cfg.delta if delta is None else delta
        key = (id(sub.host), sub.to_host, s, t)
        self._hosts[id(sub.host)] = sub.host
        out: dict[int, Path] = {}
        missing = []
        st = self.stats
        for ln in lengths:
            hit = self._cache.get(key + (ln,))
            if hit is None or (hit[0] is None and hit[1] > delta):
                missing.append(ln)
                continue
            # cached lengths still count as issued queries
            st.cache_hits += 1
            st.calls += 1
            st.max_query_len = max(st.max_query_len, ln)
            if self.record_lengths:
                st.query_lengths.append(ln)
            if hit[0] is not None:
                out[ln] = hit[0]
        if missing:
            index = sub.index
            local = self.query(sub.graph, index[s], index[t], missing, delta)
            for ln in missing:
                p = local.get(ln)
                lifted = sub.lift(p) if p is not None else None
                self._cache[key + (ln,)] = (lifted, delta)
                if lifted is not None:
                    out[ln] = lifted
        return out

    def _answer(self, g: Graph, s: int, t: int, wanted: set[int], delta: float) -> dict[int, Path]:
        if s == t:
            return {0: (s,)} if 0 in wanted else {}
        wanted.discard(0)
        if not wanted:
            return {}
        sub = _restrict(g, s, t)
        if sub is None:
            return {}
        h = sub.graph
        ls, lt = sub.local(s), sub.local(t)
        dist = bfs_distances(h, ls)[lt]
        wanted = {ln for ln in wanted if dist <= ln <= h.n - 1}
        if not wanted:
            return {}
        if self.cfg.deterministic or h.n <= self.cfg.fallback_threshold:
            found = _brute_lengths(h, ls, lt, wanted)
        else:
            trials = self.cfg.trials or trial_count(max(wanted) + 1, delta)
            found, used = _colourful_lengths(h, ls, lt, wanted, self.rng, trials)
            self.stats.trials += used
            self.stats.randomized_queries += 1
        return {ln: sub.lift(p) for ln, p in found.items()}


def exact_path(g: Graph, s: int, t: int, length: int, cfg: OracleConfig | None = None) -> Path | None:
    g.check_vertex(s)
    g.check_vertex(t)
    if length < 0:
        raise ValueError("path length must be non-negative")
    return ExactPathOracle(cfg).query(g, s, t, [length]).get(length)


def exact_path_decide(g: Graph, s: int, t: int, length: int, cfg: OracleConfig | None = None) -> bool:
    return exact_path(g, s, t, length, cfg) is not None
