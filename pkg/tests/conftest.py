import sys
from pathlib import Path

import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from hitwalk.graphs import Graph  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


@st.composite
def connected_graphs(draw, min_n=2, max_n=12):
    """Random connected simple graphs: a random tree plus extra edges."""
    n = draw(st.integers(min_n, max_n))
    adj = np.zeros((n, n))
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        adj[u, v] = adj[v, u] = 1
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if not adj[u, v]]
    if pairs:
        extra = draw(st.lists(st.sampled_from(pairs), max_size=min(len(pairs), 2 * n), unique=True))
        for u, v in extra:
            adj[u, v] = adj[v, u] = 1
    return Graph(adj)


def random_regular(n, k, seed, attempts=500):
    """Random simple connected k-regular graph by the configuration model, or None."""
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        stubs = rng.permutation(np.repeat(np.arange(n), k)).reshape(-1, 2)
        adj = np.zeros((n, n))
        if np.any(stubs[:, 0] == stubs[:, 1]):
            continue
        adj[stubs[:, 0], stubs[:, 1]] += 1
        adj[stubs[:, 1], stubs[:, 0]] += 1
        if adj.max() > 1:
            continue
        try:
            return Graph(adj)
        except ValueError:
            continue
    return None


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
