"""Exhaustive path enumeration, used as a test oracle and by the CLI ``oracle``."""

from __future__ import annotations

from .graph import Graph, Path


class PathLimitExceeded(RuntimeError):
    """More paths exist than the caller allowed; distinct from an empty result."""


def iter_st_paths(g: Graph, s: int, t: int, max_len: int | None = None):
    """Yield every simple (s, t)-path in lexicographic order of vertex sequence."""
    g.check_vertex(s)
    g.check_vertex(t)
    if s == t:
        yield (s,)
        return
    limit = g.n - 1 if max_len is None else min(max_len, g.n - 1)
    path = [s]
    on_path = [False] * g.n
    on_path[s] = True
    iters = [iter(g.adj[s])]
    while iters:
        for w in iters[-1]:
            if on_path[w]:
                continue
            if w == t:
                if len(path) <= limit:
                    yield tuple(path) + (t,)
                continue
            if len(path) < limit:
                path.append(w)
                on_path[w] = True
                iters.append(iter(g.adj[w]))
                break
        else:
            iters.pop()
            on_path[path.pop()] = False


def enumerate_st_paths(g: Graph, s: int, t: int, max_count: int | None = 1_000_000) -> list[Path]:
    out = []
    for p in iter_st_paths(g, s, t):
        if max_count is not None and len(out) >= max_count:
            raise PathLimitExceeded(f"more than {max_count} ({s},{t})-paths")
        out.append(p)
    return out


def path_lengths(g: Graph, s: int, t: int) -> set[int]:
    """Set of lengths of all simple (s, t)-paths."""
    return {len(p) - 1 for p in iter_st_paths(g, s, t)}


def all_pair_path_lengths(g: Graph) -> dict[tuple[int, int], set[int]]:
    """Achievable (s, t)-path lengths for every ordered pair, by one DFS per source."""
    out: dict[tuple[int, int], set[int]] = {(s, t): set() for s in range(g.n) for t in range(g.n)}
    for s in range(g.n):
        out[(s, s)].add(0)
        path = [s]
        on_path = [False] * g.n
        on_path[s] = True
        iters = [iter(g.adj[s])]
        while iters:
            for w in iters[-1]:
                if on_path[w]:
                    continue
                out[(s, w)].add(len(path))
                path.append(w)
                on_path[w] = True
                iters.append(iter(g.adj[w]))
                break
            else:
                iters.pop()
                on_path[path.pop()] = False
    return out


def longest_st_path_length(g: Graph, s: int, t: int) -> int | None:
    lengths = path_lengths(g, s, t)
    return max(lengths) if lengths else None
