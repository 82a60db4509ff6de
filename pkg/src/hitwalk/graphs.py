"""Dense graph representation, generators and file formats.

Adjacency follows the column convention used throughout the package: the
weight of the arc ``j -> i`` is ``adj[i, j]``. For undirected input graphs the
matrix is symmetric so the distinction only matters for quotient graphs.

Vertex orderings of the generators are part of the public contract:

==================  ==========================================================
family              ordering
==================  ==========================================================
cycle n             0..n-1 around the cycle
path n              0..n-1 along the path
complete n          0..n-1
complete_bipartite  side A is 0..a-1, side B is a..a+b-1
hypercube d         binary counter: i ~ i XOR 2^bit
petersen            outer 5-cycle 0..4, inner pentagram 5..9, spokes i ~ i+5
star m              hub 0, leaves 1..m
wheel n             rim 0..n-1 (a cycle), hub n  (= cone over the cycle)
johnson v k         k-subsets of range(v) in lexicographic order
circulant n jumps   i ~ i +/- s (mod n) for each jump s
subdivision         original vertices first, then one vertex per edge
==================  ==========================================================
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadParams,
    DisconnectedGraph,
    DuplicateEdge,
    IndexOutOfRange,
    InputError,
    UnknownFamily,
)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable finite graph.

    Undirected graphs must be simple (symmetric 0/1, zero diagonal). Directed
    graphs carry non-negative real weights and may have loops; they model
    quotient graphs. Every ``Graph`` is (strongly) connected.
    """

    adj: np.ndarray
    directed: bool = False
    labels: tuple[str, ...] | None = None
    n: int = field(init=False)

    def __post_init__(self):
        adj = np.array(self.adj, dtype=float, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise InputError(f"adjacency must be square, got shape {adj.shape}")
        if not np.all(np.isfinite(adj)) or np.any(adj < 0):
            raise InputError("adjacency entries must be finite and non-negative")
        if not self.directed:
            if not np.array_equal(adj, adj.T):
                raise InputError("undirected adjacency must be symmetric")
            if np.any(np.diag(adj) != 0):
                raise InputError("undirected input graphs may not have loops")
            if not np.all((adj == 0) | (adj == 1)):
                raise InputError("undirected input graphs must be 0/1")
        n = adj.shape[0]
        if n == 0:
            raise InputError("graph must have at least one vertex")
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != n:
                raise InputError("labels must have one entry per vertex")
            object.__setattr__(self, "labels", labels)
        if not is_connected(adj):
            raise DisconnectedGraph(
                "graph is not %sconnected" % ("strongly " if self.directed else "")
            )
        adj.setflags(write=False)
        object.__setattr__(self, "adj", adj)
        object.__setattr__(self, "n", n)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.directed == other.directed and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash((self.n, self.directed, self.adj.tobytes()))

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.n}, {kind}, edges={self.edge_count()})"

    def degrees(self) -> np.ndarray:
        """Column sums (out-weight under the column convention)."""
        return self.adj.sum(axis=0)

    def neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.adj[:, v])

    def edge_count(self) -> int:
        nz = int(np.count_nonzero(self.adj))
        if self.directed:
            return nz
        return nz // 2

    def edges(self) -> list[tuple[int, int]]:
        if self.directed:
            return [(int(j), int(i)) for i, j in zip(*np.nonzero(self.adj))]
        iu, ju = np.nonzero(np.triu(self.adj))
        return [(int(i), int(j)) for i, j in zip(iu, ju)]

    def is_regular(self) -> bool:
        d = self.degrees()
        return bool(np.all(d == d[0]))

    def bipartition(self) -> tuple[list[int], list[int]] | None:
        """The two colour classes if the graph is bipartite, else ``None``."""
        side = bfs_distances(self, 0) % 2
        a = np.flatnonzero(side == 0)
        b = np.flatnonzero(side == 1)
        if np.any(self.adj[np.ix_(a, a)]) or np.any(self.adj[np.ix_(b, b)]):
            return None
        return a.tolist(), b.tolist()

    def is_biregular(self) -> bool:
        """Bipartite with constant degree on each side (regular bipartite counts)."""
        if self.directed:
            return False
        parts = self.bipartition()
        if parts is None:
            return False
        d = self.degrees()
        return all(np.all(d[p] == d[p[0]]) for p in parts if p)


def is_connected(adj: np.ndarray) -> bool:
    """Strong connectivity of the digraph with arcs where ``adj > 0``."""
    mask = np.asarray(adj) > 0
    n = mask.shape[0]
    if n == 0:
        return False

    def reach(m):
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        frontier = seen.copy()
        while frontier.any():
            nxt = m[:, frontier].any(axis=1) & ~seen
            seen |= nxt
            frontier = nxt
        return seen.all()

    return reach(mask) and reach(mask.T)


def bfs_distances(g: Graph, v: int) -> np.ndarray:
    """Distances from ``v`` along arcs (``-1`` never occurs: graphs are connected)."""
    check_vertex(g, v)
    mask = g.adj > 0
    dist = np.full(g.n, -1, dtype=int)
    dist[v] = 0
    frontier = np.zeros(g.n, dtype=bool)
    frontier[v] = True
    d = 0
    while frontier.any():
        d += 1
        nxt = mask[:, frontier].any(axis=1) & (dist < 0)
        dist[nxt] = d
        frontier = nxt
    return dist


def distance_matrix(g: Graph) -> np.ndarray:
    """``D[v, u]`` is the distance from ``v`` to ``u``."""
    return np.array([bfs_distances(g, v) for v in range(g.n)])


def check_vertex(g: Graph, v) -> int:
    if isinstance(v, (bool, np.bool_)) or not isinstance(v, (int, np.integer)):
        raise IndexOutOfRange(f"vertex must be an integer, got {v!r}")
    if not 0 <= v < g.n:
        raise IndexOutOfRange(f"vertex {v} out of range [0, {g.n})")
    return int(v)


def build_graph(edges: Iterable[Sequence[int]], n: int, labels=None) -> Graph:
    """Simple undirected graph on ``n`` vertices from an edge list.

    Raises ``IndexOutOfRange`` for bad endpoints, ``DuplicateEdge`` for a
    repeated edge or a loop, and ``DisconnectedGraph`` if not connected.
    """
    if n < 1:
        raise BadParams("n must be positive")
    adj = np.zeros((n, n))
    for e in edges:
        u, v = (int(x) for x in e)
        if not (0 <= u < n and 0 <= v < n):
            raise IndexOutOfRange(f"edge ({u}, {v}) out of range [0, {n})")
        if u == v:
            raise DuplicateEdge(f"loop at vertex {u}")
        if adj[u, v]:
            raise DuplicateEdge(f"duplicate edge ({u}, {v})")
        adj[u, v] = adj[v, u] = 1
    return Graph(adj, labels=labels)


# -- generators ----------------------------------------------------------------


def cycle(n: int) -> Graph:
    if n < 3:
        raise BadParams("cycle needs n >= 3")
    return build_graph(((i, (i + 1) % n) for i in range(n)), n)


def path(n: int) -> Graph:
    if n < 1:
        raise BadParams("path needs n >= 1")
    return build_graph(((i, i + 1) for i in range(n - 1)), n)


def complete(n: int) -> Graph:
    if n < 1:
        raise BadParams("complete graph needs n >= 1")
    return build_graph(combinations(range(n), 2), n)


def complete_bipartite(a: int, b: int) -> Graph:
    if a < 1 or b < 1:
        raise BadParams("complete bipartite graph needs a, b >= 1")
    return build_graph(((i, a + j) for i in range(a) for j in range(b)), a + b)


def hypercube(d: int) -> Graph:
    if d < 1:
        raise BadParams("hypercube needs d >= 1")
    n = 1 << d
    return build_graph(((i, i ^ (1 << b)) for i in range(n) for b in range(d) if i < i ^ (1 << b)), n)


def petersen() -> Graph:
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    return build_graph(edges, 10)


def star(m: int) -> Graph:
    if m < 1:
        raise BadParams("star needs m >= 1 leaves")
    return build_graph(((0, i) for i in range(1, m + 1)), m + 1)


def johnson(v: int, k: int) -> Graph:
    """Johnson graph J(v, k): k-subsets adjacent when they share k-1 elements."""
    if not 1 <= k < v:
        raise BadParams("johnson needs 1 <= k < v")
    subsets = list(combinations(range(v), k))
    edges = [
        (i, j)
        for i, j in combinations(range(len(subsets)), 2)
        if len(set(subsets[i]) & set(subsets[j])) == k - 1
    ]
    return build_graph(edges, len(subsets))


def circulant(n: int, jumps: Sequence[int]) -> Graph:
    if n < 2:
        raise BadParams("circulant needs n >= 2")
    adj = np.zeros((n, n))
    for s in jumps:
        s = int(s) % n
        if s == 0:
            raise BadParams("circulant jumps must be non-zero mod n")
        for i in range(n):
            adj[i, (i + s) % n] = adj[(i + s) % n, i] = 1
    return Graph(adj)


def cone(g: Graph) -> Graph:
    """Cone over ``g``: a new apex ``n`` joined to every original vertex."""
    if g.directed:
        raise InputError("cone is defined for undirected graphs")
    n = g.n
    adj = np.zeros((n + 1, n + 1))
    adj[:n, :n] = g.adj
    adj[n, :n] = adj[:n, n] = 1
    return Graph(adj)


def wheel(n: int) -> Graph:
    return cone(cycle(n))


def subdivision(g: Graph) -> Graph:
    """Replace every edge ``{u, v}`` by a path ``u - w - v`` through a new vertex."""
    if g.directed:
        raise InputError("subdivision is defined for undirected graphs")
    edges = g.edges()
    new = []
    for idx, (u, v) in enumerate(edges):
        w = g.n + idx
        new += [(u, w), (w, v)]
    return build_graph(new, g.n + len(edges))


def random_connected(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p) sample, re-drawn until connected, with a spanning path
    fallback after 100 attempts so the call always terminates."""
    if n < 1 or not 0 <= p <= 1:
        raise BadParams("random graph needs n >= 1 and 0 <= p <= 1")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        upper = np.triu(rng.random((n, n)) < p, k=1)
        adj = (upper | upper.T).astype(float)
        if is_connected(adj):
            return Graph(adj)
    order = rng.permutation(n)
    adj[order[:-1], order[1:]] = adj[order[1:], order[:-1]] = 1
    return Graph(adj)


_FAMILIES = {
    "cycle": (cycle, 1),
    "path": (path, 1),
    "complete": (complete, 1),
    "complete_bipartite": (complete_bipartite, 2),
    "hypercube": (hypercube, 1),
    "petersen": (petersen, 0),
    "star": (star, 1),
    "wheel": (wheel, 1),
    "johnson": (johnson, 2),
}

FAMILIES = tuple(sorted(_FAMILIES) + ["circulant"])


def generate(family: str, *params) -> Graph:
    """Instance of a named family, e.g. ``generate("cycle", 5)``.

    ``circulant`` takes ``n`` followed by one or more jumps.
    """
    if family == "circulant":
        if len(params) < 2:
            raise BadParams("circulant needs n and at least one jump")
        return circulant(_as_int(params[0]), [_as_int(s) for s in params[1:]])
    try:
        fn, arity = _FAMILIES[family]
    except KeyError:
        raise UnknownFamily(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}") from None
    if len(params) != arity:
        raise BadParams(f"{family} takes {arity} parameter(s), got {len(params)}")
    return fn(*(_as_int(x) for x in params))


def _as_int(x) -> int:
    try:
        value = int(x)
    except (TypeError, ValueError):
        raise BadParams(f"expected an integer parameter, got {x!r}") from None
    if isinstance(x, float) and value != x:
        raise BadParams(f"expected an integer parameter, got {x!r}")
    return value


# -- serialization ---------------------------------------------------------------


def parse_edge_list(text: str) -> Graph:
    """Parse ``u v`` lines (0-indexed, ``#`` comments, optional ``n <count>`` header)."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if len(parts) != 2 or n is not None or edges:
                raise InputError(f"line {lineno}: malformed header {raw!r}")
            n = _parse_index(parts[1], lineno)
            continue
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected 'u v', got {raw!r}")
        edges.append((_parse_index(parts[0], lineno), _parse_index(parts[1], lineno)))
    if n is None:
        if not edges:
            raise InputError("empty edge list")
        n = max(max(e) for e in edges) + 1
    return build_graph(edges, n)


def _parse_index(token: str, lineno: int) -> int:
    if not re.fullmatch(r"[0-9]+", token):
        raise InputError(f"line {lineno}: bad vertex index {token!r}")
    return int(token)


def format_edge_list(g: Graph) -> str:
    if g.directed:
        raise InputError("edge-list format holds undirected simple graphs only")
    lines = [f"n {g.n}"] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def to_dict(g: Graph) -> dict:
    adj = [[int(x) if float(x).is_integer() else float(x) for x in row] for row in g.adj]
    d = {"n": g.n, "directed": g.directed, "adj": adj}
    if g.labels is not None:
        d["labels"] = list(g.labels)
    return d


def from_dict(d: dict) -> Graph:
    try:
        adj = np.array(d["adj"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"graph JSON needs a numeric 'adj' matrix: {exc}") from None
    if "n" in d and (adj.ndim != 2 or int(d["n"]) != adj.shape[0]):
        raise InputError("'n' does not match the adjacency size")
    return Graph(adj, directed=bool(d.get("directed", False)), labels=d.get("labels"))


def dumps(g: Graph) -> str:
    from . import jsonio

    return jsonio.dumps(to_dict(g))


def loads(text: str) -> Graph:
    return from_dict(json.loads(text))


def read_graph(path) -> Graph:
    """Load a graph; ``.json`` files use the JSON schema, anything else is an edge list."""
    p = Path(path)
    text = p.read_text()
    if p.suffix.lower() == ".json":
        try:
            return loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{p}: invalid JSON: {exc}") from None
    return parse_edge_list(text)


def write_graph(g: Graph, path) -> None:
    p = Path(path)
    if p.suffix.lower() == ".json":
        p.write_text(dumps(g) + "\n")
    else:
        p.write_text(format_edge_list(g))
