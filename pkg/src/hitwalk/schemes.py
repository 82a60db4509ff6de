"""Symmetric association schemes and hitting times in their relation graphs.

``p[i, j, k]`` is the intersection number ``p_ij^k``: for any pair ``(x, y)``
in relation ``k``, the number of ``z`` with ``(x, z)`` in relation ``i`` and
``(z, y)`` in relation ``j``.

The quotient of relation graph ``G_r`` over the partition ``pi(v)`` has entry
``[i, j] = p_{i r}^j`` (neighbours in class ``i`` of a vertex in class ``j``);
``relation_quotient`` builds it. Hitting times use the column-normalised
chain ``T(.)`` on that quotient.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, product
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DisconnectedRelation, InputError, NumericalError
from .graphs import Graph, distance_matrix, is_connected, petersen
from .partitions import Witness, hit_via_quotient

ADJACENT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class AssociationScheme:
    relations: tuple[np.ndarray, ...]
    p: np.ndarray

    @property
    def d(self) -> int:
        return len(self.relations) - 1

    @property
    def n(self) -> int:
        return self.relations[0].shape[0]

    def valency(self, i: int) -> int:
        return int(self.p[i, i, 0])

    def relation_graph(self, i: int) -> Graph:
        return Graph(self.relations[i].astype(float))

    def union_adjacency(self, e: Sequence[int]) -> np.ndarray:
        return sum(self.relations[i] for i in e)

    def label_matrix(self) -> np.ndarray:
        return sum(i * A for i, A in enumerate(self.relations))

    def to_dict(self) -> dict:
        return {"n": self.n, "relations": [A.tolist() for A in self.relations]}


def validate_scheme(relations) -> AssociationScheme | Witness:
    """Check the symmetric association scheme axioms and compute ``p_ij^k``.

    ``relations`` is a list of 0/1 matrices ``A_0..A_d`` or a single integer
    label matrix with ``L[x, y] = i`` iff ``(x, y)`` is in relation ``i``.
    Failures come back as a ``Witness`` naming the axiom and entry.
    """
    rel = _as_relations(relations)
    n = rel[0].shape[0]
    d = len(rel) - 1
    for i, A in enumerate(rel):
        if A.shape != (n, n):
            return Witness("scheme", f"relation {i} has shape {A.shape}, expected {(n, n)}", {"axiom": "shape", "relation": i})
        if not np.all((A == 0) | (A == 1)):
            return Witness("scheme", f"relation {i} is not 0/1", {"axiom": "binary", "relation": i})
    if not np.array_equal(rel[0], np.eye(n, dtype=np.int64)):
        return Witness("scheme", "A_0 is not the identity", {"axiom": "identity"})
    total = sum(rel)
    if not np.all(total == 1):
        x, y = (int(t) for t in np.argwhere(total != 1)[0])
        return Witness("scheme", f"relations do not sum to J: entry ({x}, {y}) is {int(total[x, y])}",
                       {"axiom": "partition", "entry": [x, y]})
    for i, A in enumerate(rel[1:], 1):
        if not np.array_equal(A, A.T):
            return Witness("scheme", f"relation {i} is not symmetric", {"axiom": "symmetric", "relation": i})
        if A.sum() == 0:
            return Witness("scheme", f"relation {i} is empty", {"axiom": "nonempty", "relation": i})
    reps = [tuple(int(t) for t in np.argwhere(A)[0]) for A in rel]
    p = np.zeros((d + 1, d + 1, d + 1), dtype=np.int64)
    for i, j in product(range(d + 1), repeat=2):
        prod = rel[i] @ rel[j]
        for k, (x, y) in enumerate(reps):
            p[i, j, k] = prod[x, y]
        expected = np.tensordot(p[i, j], np.stack(rel), axes=1)
        if not np.array_equal(prod, expected):
            x, y = (int(t) for t in np.argwhere(prod != expected)[0])
            return Witness("scheme", f"A_{i} A_{j} is not in the span of the relations at entry ({x}, {y})",
                           {"axiom": "closure", "i": i, "j": j, "entry": [x, y]})
    if not np.array_equal(p, p.transpose(1, 0, 2)):
        i, j, k = (int(t) for t in np.argwhere(p != p.transpose(1, 0, 2))[0])
        return Witness("scheme", f"p_{i}{j}^{k} != p_{j}{i}^{k}", {"axiom": "commutative", "i": i, "j": j, "k": k})
    for A in rel:
        A.setflags(write=False)
    return AssociationScheme(tuple(rel), p)


def _as_relations(relations) -> list[np.ndarray]:
    if isinstance(relations, np.ndarray) and relations.ndim == 2:
        relations = [relations]
    rel = [np.asarray(A) for A in relations]
    if len(rel) == 1:
        L = rel[0]
        if L.ndim != 2 or not np.all(L == np.round(L)) or L.min() < 0:
            raise InputError("a single relation matrix must be a non-negative integer label matrix")
        L = L.astype(np.int64)
        return [(L == i).astype(np.int64) for i in range(int(L.max()) + 1)]
    if any(A.ndim != 2 for A in rel):
        raise InputError("relations must be matrices")
    return [A.astype(np.int64) for A in rel]


def require_scheme(relations) -> AssociationScheme:
    s = validate_scheme(relations)
    if isinstance(s, Witness):
        raise InputError(f"not an association scheme: {s.message}")
    return s


def relation_quotient(s: AssociationScheme, r: int) -> np.ndarray:
    """Quotient of ``G_r`` over ``pi(v)``: entry ``[i, j] = p_{i r}^j``."""
    return s.p[:, r, :].astype(float)


def _check_index(s: AssociationScheme, i: int, what: str) -> int:
    if not 0 <= i <= s.d:
        raise InputError(f"{what} must be in [0, {s.d}], got {i}")
    return int(i)


def hit_relation_graph(s: AssociationScheme, i: int, j: int) -> float:
    """Hitting time in ``G_i`` to ``v`` from any ``u`` in relation ``j`` with ``v``."""
    return hit_t_distance_regular(s, [i], j)


def hit_t_distance_regular(s: AssociationScheme, e: Sequence[int], j: int) -> float:
    """Hitting time in the union graph ``sum(A_x for x in e)`` from class ``j``.

    Uses the quotient ``q_ij = sum_x p_{i e_x}^j`` over the scheme classes.
    Raises ``DisconnectedRelation`` if the union graph is disconnected.
    """
    e = sorted({_check_index(s, x, "relation") for x in e})
    if not e or 0 in e:
        raise InputError("relation set must be non-empty and exclude 0")
    j = _check_index(s, j, "start class")
    if j == 0:
        raise InputError("start class must be non-zero")
    if not is_connected(s.union_adjacency(e)):
        raise DisconnectedRelation(f"union of relations {e} is disconnected")
    B = sum(relation_quotient(s, x) for x in e)
    return hit_via_quotient(B, j)


def scheme_adjacent_hitting(s: AssociationScheme, i: int) -> float:
    """``|V| - 1``, the hitting time between adjacent vertices of ``G_i``.

    Cross-checked against ``hit_relation_graph(s, i, i)``.
    """
    i = _check_index(s, i, "relation")
    if i == 0:
        raise InputError("relation must be non-zero")
    value = float(s.n - 1)
    check = hit_relation_graph(s, i, i)
    if abs(check - value) > ADJACENT_TOL * max(1.0, value):
        raise NumericalError(f"adjacent hitting time {check!r} disagrees with |V| - 1 = {value}")
    return value


# -- catalog ---------------------------------------------------------------------------


def trivial_scheme(n: int) -> AssociationScheme:
    I = np.eye(n, dtype=np.int64)
    return require_scheme([I, 1 - I])


def hamming_scheme(d: int, q: int = 2) -> AssociationScheme:
    """H(d, q) on words in lexicographic order (binary counter order for q = 2)."""
    words = np.array(list(product(range(q), repeat=d)))
    L = (words[:, None, :] != words[None, :, :]).sum(axis=2)
    return require_scheme([(L == i).astype(np.int64) for i in range(d + 1)])


def johnson_scheme(v: int, k: int) -> AssociationScheme:
    """J(v, k) on k-subsets in lexicographic order; relation i = |A & B| = k - i."""
    subsets = [set(c) for c in combinations(range(v), k)]
    L = np.array([[k - len(a & b) for b in subsets] for a in subsets])
    return require_scheme(L)


def distance_scheme(g: Graph) -> AssociationScheme | Witness:
    """Distance-``i`` graphs of ``g``; a scheme exactly when ``g`` is distance-regular."""
    return validate_scheme(distance_matrix(g))


def petersen_scheme() -> AssociationScheme:
    s = distance_scheme(petersen())
    assert not isinstance(s, Witness)
    return s


CATALOG = {
    "trivial": lambda n=5: trivial_scheme(int(n)),
    "hamming": lambda d=3: hamming_scheme(int(d)),
    "johnson": lambda v=4, k=2: johnson_scheme(int(v), int(k)),
    "petersen": petersen_scheme,
}


# -- files -------------------------------------------------------------------------------


def scheme_from_dict(d: dict) -> AssociationScheme | Witness:
    """``{"n": int, "relations": [matrix, ...]}``; a single matrix is a label matrix."""
    try:
        rel = d["relations"]
    except (KeyError, TypeError):
        raise InputError("scheme JSON needs 'relations'") from None
    arr = np.array(rel)
    if arr.ndim == 2:
        relations = [arr]
    else:
        relations = [np.array(A) for A in rel]
    s = validate_scheme(relations)
    if "n" in d and not isinstance(s, Witness) and int(d["n"]) != s.n:
        raise InputError("'n' does not match the relation size")
    return s


def read_scheme(path) -> AssociationScheme | Witness:
    try:
        return scheme_from_dict(json.loads(Path(path).read_text()))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from None
