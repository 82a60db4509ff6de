"""Independent reference computations used only by the tests.

These deliberately avoid the package's own solvers: hitting times come from an
exact rational Gauss-Jordan elimination of the first-step equations, and the
Perron pair from a symmetric eigendecomposition.
"""

from fractions import Fraction

import numpy as np


def exact_hitting_times(adj, target):
    """Simple-walk hitting times to ``target`` as exact Fractions.

    Solves ``h[u] = 1 + sum_x P(u -> x) h[x]`` with ``h[target] = 0`` where
    ``P(u -> x) = adj[x][u] / deg(u)``.
    """
    n = len(adj)
    deg = [sum(Fraction(adj[x][u]) for x in range(n)) for u in range(n)]
    others = [u for u in range(n) if u != target]
    pos = {u: i for i, u in enumerate(others)}
    m = len(others)
    rows = []
    for u in others:
        row = [Fraction(0)] * (m + 1)
        row[pos[u]] += 1
        for x in range(n):
            if x != target and adj[x][u]:
                row[pos[x]] -= Fraction(adj[x][u]) / deg[u]
        row[m] = Fraction(1)
        rows.append(row)
    for c in range(m):
        piv = next(r for r in range(c, m) if rows[r][c] != 0)
        rows[c], rows[piv] = rows[piv], rows[c]
        inv = 1 / rows[c][c]
        rows[c] = [x * inv for x in rows[c]]
        for r in range(m):
            if r != c and rows[r][c] != 0:
                f = rows[r][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
    h = [Fraction(0)] * n
    for u in others:
        h[u] = rows[pos[u]][m]
    return h


def eigh_perron(adj):
    """Largest eigenvalue and positive unit eigenvector of a symmetric matrix."""
    w, V = np.linalg.eigh(np.asarray(adj, dtype=float))
    v = V[:, -1]
    return float(w[-1]), v * np.sign(v.sum())


def merw_by_definition(adj):
    """``(1/lambda) D A D^{-1}`` written out entrywise from the eigh oracle."""
    lam, nu = eigh_perron(adj)
    A = np.asarray(adj, dtype=float)
    n = len(A)
    return np.array([[nu[i] * A[i, j] / (lam * nu[j]) for j in range(n)] for i in range(n)])


def girth(adj):
    """Length of a shortest cycle by BFS from every vertex."""
    A = np.asarray(adj)
    n = len(A)
    best = np.inf
    for s in range(n):
        dist, parent = {s: 0}, {s: -1}
        queue = [s]
        for u in queue:
            for w in np.flatnonzero(A[u]):
                w = int(w)
                if w not in dist:
                    dist[w], parent[w] = dist[u] + 1, u
                    queue.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


def merw_hitting_mp(adj, target, dps=50):
    """MERW hitting times to ``target`` in ``dps``-digit arithmetic (mpmath)."""
    import mpmath as mp

    with mp.workdps(dps):
        A = mp.matrix([[int(x) for x in row] for row in adj])
        n = A.rows
        E, Q = mp.eigsy(A)
        k = max(range(n), key=lambda i: E[i])
        nu = [abs(Q[i, k]) for i in range(n)]
        others = [u for u in range(n) if u != target]
        M = mp.matrix(n - 1, n - 1)
        for a, u in enumerate(others):
            out = sum(A[u, x] * nu[x] for x in range(n))
            for b, x in enumerate(others):
                M[a, b] = (1 if a == b else 0) - A[u, x] * nu[x] / out
        h = mp.lu_solve(M, mp.matrix([1] * (n - 1)))
        times = np.zeros(n)
        times[others] = [float(x) for x in h]
        return times
