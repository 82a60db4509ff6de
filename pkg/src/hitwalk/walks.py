"""Simple and maximal-entropy random walks and their average hitting times.

Transition matrices are column-stochastic: ``T[i, j]`` is the probability of
stepping from ``j`` to ``i``. The hitting-time vector of a substochastic
matrix ``M`` is ``H(M) = -1^T (M - I)^{-1}``, i.e. the column sums of
``(I - M)^{-1}``; entry ``u`` of ``H(T_{-v})`` is the expected number of steps
from ``u`` to ``v``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, WalkLimitExceeded
from .graphs import Graph, check_vertex
from .numerics import LU, PerronData, perron

WALK_KINDS = ("simple", "merw")
METHODS = ("full", "quotient", "monte_carlo")

MAX_WALK_STEPS = 10**9
RNG_ALGORITHM = "numpy.random.PCG64/SeedSequence"
MC_BATCH = 8192


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    matrix: np.ndarray
    kind: str

    def column_sum_error(self) -> float:
        return float(np.abs(self.matrix.sum(axis=0) - 1).max())


@dataclass(eq=False)
class HittingReport:
    """Expected hitting times to ``target``; ``times[u]`` is the value from ``u``.

    Monte Carlo reports carry ``source``, ``samples``, ``stderr``, ``seed`` and
    ``rng``; their ``times`` are NaN except at the target and the source.
    """

    target: int
    times: np.ndarray
    method: str
    walk: str
    residual: float | None = None
    source: int | None = None
    samples: int | None = None
    stderr: float | None = None
    seed: int | None = None
    rng: str | None = None
    extra: dict | None = None

    @property
    def value(self) -> float | None:
        return None if self.source is None else float(self.times[self.source])

    def to_dict(self) -> dict:
        d = {
            "target": self.target,
            "method": self.method,
            "walk": self.walk,
            "times": [None if np.isnan(t) else float(t) for t in self.times],
            "residual": self.residual,
        }
        if self.source is not None:
            d["source"] = self.source
            d["value"] = self.value
        if self.method == "monte_carlo":
            d.update(samples=self.samples, stderr=self.stderr, seed=self.seed, rng=self.rng)
        if self.extra:
            d.update(self.extra)
        return d


def transition_simple(g: Graph) -> TransitionMatrix:
    """``T(A)``: each column of the adjacency divided by its sum."""
    return TransitionMatrix(_normalize_columns(g.adj), "simple")


def transition_merw(g: Graph, p: PerronData | None = None) -> TransitionMatrix:
    """``T(D_nu A)``, the maximal-entropy walk; equals ``D_nu A D_nu^{-1} / lambda1``."""
    if p is None:
        p = perron(g)
    return TransitionMatrix(_normalize_columns(p.nu[:, None] * g.adj), "merw")


def transition_matrix(g: Graph, kind: str = "simple", p: PerronData | None = None) -> TransitionMatrix:
    if kind == "simple":
        return transition_simple(g)
    if kind == "merw":
        return transition_merw(g, p)
    raise InputError(f"unknown walk kind {kind!r}; expected one of {WALK_KINDS}")


def _normalize_columns(M: np.ndarray) -> np.ndarray:
    s = M.sum(axis=0)
    if np.any(s <= 0):
        raise InputError("every column needs positive total weight")
    T = M / s
    T.setflags(write=False)
    return T


def column_normalize(M) -> np.ndarray:
    """``T(M)`` for an arbitrary non-negative matrix (quotient matrices included)."""
    return _normalize_columns(np.asarray(M, dtype=float))


def delete_index(M: np.ndarray, x: int) -> np.ndarray:
    """``M_{-x}``: drop row and column ``x``."""
    keep = np.arange(M.shape[0]) != x
    return M[np.ix_(keep, keep)]


def hitting_vector(M) -> np.ndarray:
    """``H(M) = -1^T (M - I)^{-1}`` as a 1-d array.

    Solved as ``(I - M)^T h = 1`` with one LU factorization. Raises
    ``SingularMatrix`` when ``M - I`` is singular.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError("hitting_vector needs a square matrix")
    n = M.shape[0]
    return LU(np.eye(n) - M).solve(np.ones(n), trans=True)


def absorbing_hitting_times(T, target: int) -> np.ndarray:
    """Hitting times to ``target`` for a column-stochastic ``T``, zero at ``target``.

    Equivalent to ``H(T_{-target})`` but the diagonal of ``I - T_{-target}`` is
    rebuilt in extended precision as the sum of the column's other entries,
    target row included. Rounding in ``T`` then changes the chain, not its
    stochasticity, so the tiny escape rates behind very long hitting times are
    kept (MERW towards a low-weight vertex reaches 1e4 steps on 30 vertices).
    """
    T = np.asarray(T, dtype=float)
    n = T.shape[0]
    times = np.zeros(n)
    if n == 1:
        return times
    Tl = T.astype(np.longdouble)
    off = Tl.sum(axis=0) - np.diag(Tl)
    K = -delete_index(Tl, target)
    keep = np.arange(n) != target
    K[np.diag_indices(n - 1)] = off[keep]
    times[keep] = LU(K).solve(np.ones(n - 1), trans=True)
    return times


def first_step_residual(T: np.ndarray, target: int, times: np.ndarray) -> float:
    """Max over ``u != target`` of ``|times[u] - 1 - sum_x T[x, u] times[x]|``."""
    lhs = times - 1 - T.T @ times
    lhs[target] = 0.0
    return float(np.abs(lhs).max(initial=0.0))


def hit_full(g: Graph, target: int, kind: str = "simple", p: PerronData | None = None) -> HittingReport:
    """Exact hitting times to ``target`` from every vertex via ``H(T_{-target})``."""
    target = check_vertex(g, target)
    times = np.zeros(g.n)
    if g.n == 1:
        return HittingReport(target=target, times=times, method="full", walk=kind, residual=0.0)
    T = transition_matrix(g, kind, p).matrix
    times = absorbing_hitting_times(T, target)
    return HittingReport(
        target=target,
        times=times,
        method="full",
        walk=kind,
        residual=first_step_residual(T, target, times),
    )


def hitting_matrix(g: Graph, kind: str = "simple", p: PerronData | None = None) -> np.ndarray:
    """``H[v, u]`` = expected steps from ``u`` to ``v`` for every pair."""
    if kind == "merw" and p is None:
        p = perron(g)
    return np.array([hit_full(g, v, kind, p).times for v in range(g.n)])


def hit_monte_carlo(
    g: Graph,
    target: int,
    source: int,
    kind: str = "simple",
    samples: int = 10_000,
    seed: int = 0,
    p: PerronData | None = None,
    max_steps: int = MAX_WALK_STEPS,
) -> HittingReport:
    """Monte Carlo estimate of the hitting time from ``source`` to ``target``.

    Walks are simulated in batches of ``MC_BATCH``; batch ``i`` draws from its
    own stream ``SeedSequence(seed).spawn(...)[i]`` so results depend only on
    ``(graph, target, source, kind, samples, seed)``. The standard error is the
    sample standard deviation (ddof=1) over ``sqrt(samples)``.
    """
    target = check_vertex(g, target)
    source = check_vertex(g, source)
    if samples < 1:
        raise InputError("samples must be >= 1")
    T = transition_matrix(g, kind, p).matrix
    cum = np.cumsum(T, axis=0)
    cum[-1, :] = 1.0  # guard against rounding in the last bucket
    n_batches = -(-samples // MC_BATCH)
    streams = np.random.SeedSequence(seed).spawn(n_batches)
    steps = np.empty(samples, dtype=np.int64)
    for b, ss in enumerate(streams):
        lo = b * MC_BATCH
        hi = min(samples, lo + MC_BATCH)
        steps[lo:hi] = _simulate_batch(cum, target, source, hi - lo, np.random.Generator(np.random.PCG64(ss)), max_steps)
    mean = float(steps.mean())
    stderr = float(steps.std(ddof=1) / np.sqrt(samples)) if samples > 1 else float("nan")
    times = np.full(g.n, np.nan)
    times[target] = 0.0
    times[source] = mean
    return HittingReport(
        target=target,
        times=times,
        method="monte_carlo",
        walk=kind,
        source=source,
        samples=samples,
        stderr=stderr,
        seed=seed,
        rng=RNG_ALGORITHM,
    )


def _simulate_batch(cum, target, source, count, rng, max_steps):
    pos = np.full(count, source, dtype=np.int64)
    steps = np.zeros(count, dtype=np.int64)
    active = np.flatnonzero(pos != target)
    t = 0
    while active.size:
        t += 1
        if t > max_steps:
            raise WalkLimitExceeded(f"a walk exceeded {max_steps} steps")
        r = rng.random(active.size)
        nxt = np.empty(active.size, dtype=np.int64)
        # first state whose cumulative probability exceeds r; chunked to bound memory
        chunk = max(1, (1 << 22) // cum.shape[0])
        for lo in range(0, active.size, chunk):
            sl = slice(lo, lo + chunk)
            nxt[sl] = (cum[:, pos[active[sl]]] <= r[sl]).sum(axis=0)
        pos[active] = nxt
        steps[active] = t
        active = active[nxt != target]
    return steps
