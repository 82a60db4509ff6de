"""Equitable and weight-equitable partitions, quotient matrices, refinement.

Quotient matrices use the column layout: ``Q[i, j]`` counts (or weighs) the
neighbours inside block ``i`` of any vertex of block ``j``. For the weight
version the entry is ``b*_ij(u) = (1/nu_u) * sum(nu_w for w in N(u) & V_i)``,
so every column sums to ``lambda1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .graphs import Graph, check_vertex
from .numerics import PerronData, perron
from .walks import (
    HittingReport,
    absorbing_hitting_times,
    column_normalize,
    first_step_residual,
    transition_matrix,
)

KINDS = ("equitable", "weight")

# weight signatures are compared with absolute tolerance WEIGHT_RTOL * lambda1
WEIGHT_RTOL = 1e-9


@dataclass(frozen=True)
class Witness:
    """Why a structural check failed; returned as a value, never raised."""

    check: str
    message: str
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"check": self.check, "message": self.message, **self.data}


@dataclass(frozen=True)
class Partition:
    """Ordered vertex partition; ``center`` (if set) is the single vertex of block 0."""

    blocks: tuple[tuple[int, ...], ...]
    center: int | None = None

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(v) for v in b)) for b in self.blocks if len(b))
        object.__setattr__(self, "blocks", blocks)
        seen = set()
        for b in blocks:
            if seen.intersection(b) or len(set(b)) != len(b):
                raise InputError("partition blocks must be disjoint")
            seen.update(b)
        if seen != set(range(len(seen))):
            raise InputError("partition blocks must cover 0..n-1")
        if self.center is not None and (not blocks or blocks[0] != (self.center,)):
            raise InputError("a centred partition needs blocks[0] == (center,)")

    @classmethod
    def from_labels(cls, labels: Sequence[int], center: int | None = None) -> "Partition":
        """Blocks from per-vertex block indices (empty indices are dropped)."""
        m = max(labels) + 1
        blocks = [[] for _ in range(m)]
        for v, b in enumerate(labels):
            blocks[b].append(v)
        return cls(tuple(tuple(b) for b in blocks), center)

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def block_index(self) -> np.ndarray:
        idx = np.empty(self.n, dtype=int)
        for i, b in enumerate(self.blocks):
            idx[list(b)] = i
        return idx

    def indicator(self) -> np.ndarray:
        """n x m 0/1 matrix with ``E[u, i] = 1`` iff ``u`` lies in block ``i``."""
        E = np.zeros((self.n, len(self.blocks)))
        E[np.arange(self.n), self.block_index()] = 1
        return E

    def to_dict(self) -> dict:
        d = {}
        if self.center is not None:
            d["center"] = self.center
        d["blocks"] = [list(b) for b in self.blocks]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Partition":
        try:
            return cls(tuple(tuple(b) for b in d["blocks"]), d.get("center"))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad partition JSON: {exc}") from None


@dataclass(frozen=True, eq=False)
class QuotientMatrix:
    """Quotient of a (weight-)equitable partition.

    ``nu_block`` holds the block values of the Perron vector (equitable kind,
    when known); ``lambda1`` is set for the weight kind. ``labels`` names the
    blocks when the quotient comes from a label function.
    """

    matrix: np.ndarray
    kind: str
    block_sizes: tuple[int, ...]
    nu_block: np.ndarray | None = None
    lambda1: float | None = None
    labels: tuple | None = None

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "matrix": self.matrix,
            "block_sizes": list(self.block_sizes),
        }
        if self.nu_block is not None:
            d["nu_block"] = self.nu_block
        if self.lambda1 is not None:
            d["lambda1"] = self.lambda1
        if self.labels is not None:
            d["labels"] = list(self.labels)
        return d


def _check_cover(g: Graph, p: Partition) -> None:
    if p.n != g.n:
        raise InputError(f"partition covers {p.n} vertices, graph has {g.n}")


def neighbor_counts(g: Graph, p: Partition) -> np.ndarray:
    """``S[i, u]``: adjacency weight from ``u`` into block ``i``."""
    return p.indicator().T @ g.adj


def weight_counts(g: Graph, p: Partition, nu: np.ndarray) -> np.ndarray:
    """``S[i, u] = b*_i(u)``, the nu-weighted counts divided by ``nu_u``."""
    return (p.indicator().T @ (nu[:, None] * g.adj)) / nu[None, :]


def check_equitable(g: Graph, p: Partition, perron_data: PerronData | None = None):
    """Quotient matrix of ``p`` if it is equitable, else a ``Witness``.

    Counts are compared exactly. When ``perron_data`` is given, the block
    values of ``nu`` are recorded in ``nu_block`` (they are constant on the
    blocks of any equitable partition).
    """
    _check_cover(g, p)
    S = neighbor_counts(g, p)
    m = len(p)
    B = np.zeros((m, m))
    for j, block in enumerate(p.blocks):
        cols = S[:, list(block)]
        ref = cols[:, 0]
        bad = np.flatnonzero(np.any(cols != ref[:, None], axis=0))
        if bad.size:
            u = block[0]
            v = block[int(bad[0])]
            i = int(np.flatnonzero(cols[:, bad[0]] != ref)[0])
            return Witness(
                "equitable",
                f"vertices {u} and {v} of block {j} have {ref[i]:g} vs {S[i, v]:g} neighbours in block {i}",
                {"block": j, "into": i, "u": int(u), "v": int(v), "count_u": float(ref[i]), "count_v": float(S[i, v])},
            )
        B[:, j] = ref
    nu_block = None
    if perron_data is not None:
        nu_block = np.array([perron_data.nu[list(b)].mean() for b in p.blocks])
    return QuotientMatrix(B, "equitable", tuple(len(b) for b in p.blocks), nu_block=nu_block)


def check_weight_equitable(g: Graph, p: Partition, perron_data: PerronData | None = None, rtol: float = WEIGHT_RTOL):
    """Weight-regular quotient ``B*`` of ``p`` if it is weight-equitable, else a ``Witness``.

    Two vertices of a block agree when their weight-intersection numbers
    differ by at most ``rtol * lambda1``. Entries of ``B*`` are block means.
    """
    _check_cover(g, p)
    if perron_data is None:
        perron_data = perron(g)
    lam = perron_data.lambda1
    tol = rtol * lam
    S = weight_counts(g, p, perron_data.nu)
    m = len(p)
    B = np.zeros((m, m))
    for j, block in enumerate(p.blocks):
        cols = S[:, list(block)]
        ref = cols[:, 0]
        dev = np.abs(cols - ref[:, None])
        bad = np.flatnonzero(np.any(dev > tol, axis=0))
        if bad.size:
            u = block[0]
            v = block[int(bad[0])]
            i = int(np.argmax(dev[:, bad[0]]))
            return Witness(
                "weight_equitable",
                f"vertices {u} and {v} of block {j} have weight {ref[i]:.12g} vs {S[i, v]:.12g} into block {i}",
                {"block": j, "into": i, "u": int(u), "v": int(v), "weight_u": float(ref[i]), "weight_v": float(S[i, v])},
            )
        B[:, j] = cols.mean(axis=1)
    return QuotientMatrix(B, "weight", tuple(len(b) for b in p.blocks), lambda1=lam)


def check_partition(g: Graph, p: Partition, kind: str, perron_data: PerronData | None = None):
    if kind == "equitable":
        return check_equitable(g, p, perron_data)
    if kind == "weight":
        return check_weight_equitable(g, p, perron_data)
    raise InputError(f"unknown partition kind {kind!r}; expected one of {KINDS}")


# -- refinement --------------------------------------------------------------------


def _group_exact(sig: np.ndarray, members: Sequence[int]) -> list[tuple[tuple, list[int]]]:
    groups: dict[tuple, list[int]] = {}
    for v in members:
        groups.setdefault(tuple(sig[:, v]), []).append(v)
    return sorted(groups.items(), key=lambda kv: kv[0], reverse=True)


def _group_tolerant(sig: np.ndarray, members: Sequence[int], tol: float) -> list[tuple[tuple, list[int]]]:
    reps: list[np.ndarray] = []
    groups: list[list[int]] = []
    for v in members:
        s = sig[:, v]
        for r, grp in zip(reps, groups):
            if np.all(np.abs(s - r) <= tol):
                grp.append(v)
                break
        else:
            reps.append(s)
            groups.append([v])

    def cmp(a, b):
        for x, y in zip(a[0], b[0]):
            if abs(x - y) > tol:
                return -1 if x > y else 1
        return 0

    return sorted(((tuple(r), g) for r, g in zip(reps, groups)), key=cmp_to_key(cmp))


def refine(g: Graph, p: Partition, kind: str = "equitable", perron_data: PerronData | None = None) -> Partition:
    """Coarsest (weight-)equitable partition refining ``p``.

    Each round computes, for every vertex, its (weight-)counts into the current
    blocks and splits every block by that signature. Sub-blocks replace their
    parent in place, ordered by decreasing signature (lexicographic over the
    current block order), which gives distance order for a distance partition;
    members stay sorted by vertex index. Stops at the first round that splits
    nothing.
    """
    _check_cover(g, p)
    if kind == "weight":
        if perron_data is None:
            perron_data = perron(g)
        tol = WEIGHT_RTOL * perron_data.lambda1
    elif kind != "equitable":
        raise InputError(f"unknown partition kind {kind!r}; expected one of {KINDS}")
    blocks = [list(b) for b in p.blocks]
    while True:
        cur = Partition(tuple(tuple(b) for b in blocks))
        if kind == "equitable":
            sig = neighbor_counts(g, cur)
        else:
            sig = weight_counts(g, cur, perron_data.nu)
        new_blocks = []
        for b in blocks:
            if kind == "equitable":
                groups = _group_exact(sig, b)
            else:
                groups = _group_tolerant(sig, b, tol)
            new_blocks.extend(grp for _, grp in groups)
        if len(new_blocks) == len(blocks):
            return Partition(tuple(tuple(b) for b in blocks), p.center)
        blocks = new_blocks


def coarsest_stabilized(g: Graph, o: int, kind: str = "equitable", perron_data: PerronData | None = None) -> Partition:
    """Coarsest stabilized (weight-)equitable partition centred at ``o``."""
    o = check_vertex(g, o)
    rest = tuple(v for v in range(g.n) if v != o)
    return refine(g, Partition(((o,), rest), center=o), kind, perron_data)


# -- quotient hitting times -----------------------------------------------------------


def quotient_hitting_times(Q) -> np.ndarray:
    """Simple-walk hitting times to block 0 of the quotient graph, one per block."""
    B = Q.matrix if isinstance(Q, QuotientMatrix) else np.asarray(Q, dtype=float)
    if B.shape[0] == 1:
        return np.zeros(1)
    return absorbing_hitting_times(column_normalize(B), 0)


def hit_via_quotient(Q, block: int) -> float:
    """Hitting time from quotient vertex ``block`` to block 0.

    For an equitable quotient this is the simple-walk hitting time from any
    vertex of the block to the centre; for a weight quotient it is the
    maximal-entropy hitting time.
    """
    B = Q.matrix if isinstance(Q, QuotientMatrix) else np.asarray(Q)
    if not 1 <= block < B.shape[0]:
        raise InputError(f"block must be in [1, {B.shape[0]}), got {block}")
    return float(quotient_hitting_times(Q)[block])


def weight_quotient_from_equitable(Q: QuotientMatrix) -> QuotientMatrix:
    """``B* = D_nu B D_nu^{-1}`` with ``D_nu`` the block values of the Perron vector."""
    if Q.kind != "equitable" or Q.nu_block is None:
        raise InputError("need an equitable quotient with nu_block")
    nu = Q.nu_block
    Bs = nu[:, None] * Q.matrix / nu[None, :]
    lam = float(Bs.sum(axis=0).mean())
    return QuotientMatrix(Bs, "weight", Q.block_sizes, lambda1=lam, labels=Q.labels)


def hit_quotient(g: Graph, target: int, kind: str = "simple", perron_data: PerronData | None = None) -> HittingReport:
    """Hitting times to ``target`` through the coarsest stabilized quotient.

    ``simple`` uses the equitable refinement and its quotient ``B``; ``merw``
    uses the weight-equitable refinement and ``B*``.
    """
    target = check_vertex(g, target)
    pkind = {"simple": "equitable", "merw": "weight"}.get(kind)
    if pkind is None:
        raise InputError(f"unknown walk kind {kind!r}")
    if pkind == "weight" and perron_data is None:
        perron_data = perron(g)
    part = coarsest_stabilized(g, target, pkind, perron_data)
    Q = check_partition(g, part, pkind, perron_data)
    if isinstance(Q, Witness):  # refinement output is (weight-)equitable by construction
        raise AssertionError(f"refinement produced a non-equitable partition: {Q.message}")
    block_times = quotient_hitting_times(Q)
    times = block_times[part.block_index()]
    # diagnostic only: how well the lifted times satisfy the full first-step equations
    T = transition_matrix(g, kind, perron_data).matrix
    return HittingReport(
        target=target,
        times=times,
        method="quotient",
        walk=kind,
        residual=first_step_residual(T, target, times),
        extra={"partition": part.to_dict(), "quotient": Q.to_dict()},
    )
