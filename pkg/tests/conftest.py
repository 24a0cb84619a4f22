from __future__ import annotations

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from detour.graph import Graph

settings.register_profile(
    "default",
    max_examples=120,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def graphs(draw, min_n: int = 2, max_n: int = 8, directed: bool = False) -> Graph:
    n = draw(st.integers(min_n, max_n))
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b and (directed or a < b)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    return Graph.from_edges(n, edges, directed)


@st.composite
def graphs_with_terminals(draw, max_n: int = 8, directed: bool = False):
    g = draw(graphs(min_n=2, max_n=max_n, directed=directed))
    s = draw(st.integers(0, g.n - 1))
    t = draw(st.integers(0, g.n - 1).filter(lambda x: x != s))
    return g, s, t
