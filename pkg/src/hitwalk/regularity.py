"""Regular structures that make quotient shortcuts valid.

Distance partitions and intersection arrays (integer and pseudo), label
functions and the weakly (weight-)f-equitable check, the neighbour-block
criterion for ``2e/k - 1``, and closed forms on cones over regular graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NotRegular, NumericalError, UnknownLabel
from .graphs import Graph, bfs_distances, check_vertex, cone, distance_matrix
from .numerics import PerronData, perron
from .partitions import (
    WEIGHT_RTOL,
    Partition,
    QuotientMatrix,
    Witness,
    check_equitable,
    check_partition,
    check_weight_equitable,
    coarsest_stabilized,
    hit_via_quotient,
    quotient_hitting_times,
    weight_quotient_from_equitable,
)

# closed-form and power-iteration lambda1 of a cone must agree this closely
CONE_LAMBDA_TOL = 1e-9
NU_CONSTANT_TOL = 1e-9


# -- distance partitions and intersection arrays ---------------------------------------


@dataclass(frozen=True, eq=False)
class IntersectionArray:
    """Tridiagonal quotient of a distance partition around ``vertex``.

    ``c = (c_1..c_d)``, ``a = (a_1..a_d)``, ``b = (b_0..b_{d-1})``; ``a_0`` is
    always 0. ``kind`` is ``"integer"`` for a distance-regularized vertex and
    ``"pseudo"`` for weight-intersection numbers (then ``lambda1`` is set).
    """

    d: int
    c: tuple[float, ...]
    a: tuple[float, ...]
    b: tuple[float, ...]
    kind: str = "integer"
    vertex: int | None = None
    lambda1: float | None = None
    class_sizes: tuple[int, ...] | None = None

    def matrix(self) -> np.ndarray:
        B = np.zeros((self.d + 1, self.d + 1))
        for i in range(1, self.d + 1):
            B[i - 1, i] = self.c[i - 1]
            B[i, i] = self.a[i - 1]
        for i in range(self.d):
            B[i + 1, i] = self.b[i]
        return B

    @classmethod
    def from_matrix(cls, B, kind="integer", **kw) -> "IntersectionArray":
        B = np.asarray(B, dtype=float)
        d = B.shape[0] - 1
        c = tuple(float(B[i - 1, i]) for i in range(1, d + 1))
        a = tuple(float(B[i, i]) for i in range(1, d + 1))
        b = tuple(float(B[i + 1, i]) for i in range(d))
        if kind == "integer":
            c, a, b = (tuple(int(round(x)) for x in t) for t in (c, a, b))
        return cls(d, c, a, b, kind, **kw)

    def symbol(self) -> str:
        """``{b_0,...,b_{d-1}; c_1,...,c_d}`` notation."""
        fmt = (lambda x: str(x)) if self.kind == "integer" else (lambda x: f"{x:.6g}")
        return "{" + ",".join(map(fmt, self.b)) + ";" + ",".join(map(fmt, self.c)) + "}"

    def key(self) -> tuple:
        return (self.kind, self.c, self.a, self.b)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "d": self.d, "c": list(self.c), "a": list(self.a), "b": list(self.b)}
        if self.vertex is not None:
            d["vertex"] = self.vertex
        if self.lambda1 is not None:
            d["lambda1"] = self.lambda1
        if self.class_sizes is not None:
            d["class_sizes"] = list(self.class_sizes)
        d["matrix"] = self.matrix()
        return d


def distance_partition(g: Graph, v: int) -> Partition:
    """``{Gamma_0(v), ..., Gamma_d(v)}`` ordered by distance."""
    dist = bfs_distances(g, v)
    return Partition.from_labels(dist.tolist(), center=int(v))


def intersection_array(g: Graph, v: int):
    """Intersection array of ``v`` if it is distance-regularized, else a ``Witness``."""
    v = check_vertex(g, v)
    dist = bfs_distances(g, v)
    d = int(dist.max())
    mask = g.adj > 0
    c, a, b = [], [], []
    for i in range(d + 1):
        cls_ = np.flatnonzero(dist == i)
        nd = [dist[mask[:, u]] for u in cls_]
        params = {
            "c": np.array([np.count_nonzero(x == i - 1) for x in nd]),
            "a": np.array([np.count_nonzero(x == i) for x in nd]),
            "b": np.array([np.count_nonzero(x == i + 1) for x in nd]),
        }
        for name, vals in params.items():
            bad = np.flatnonzero(vals != vals[0])
            if bad.size:
                u, w = int(cls_[0]), int(cls_[bad[0]])
                return Witness(
                    "distance_regularized",
                    f"{name}(v, u) differs at distance {i}: vertex {u} has {vals[0]}, vertex {w} has {vals[bad[0]]}",
                    {"vertex": v, "distance": i, "parameter": name, "u": u, "w": w,
                     "value_u": int(vals[0]), "value_w": int(vals[bad[0]])},
                )
        if i >= 1:
            c.append(int(params["c"][0]))
            a.append(int(params["a"][0]))
        if i < d:
            b.append(int(params["b"][0]))
    sizes = tuple(int(np.count_nonzero(dist == i)) for i in range(d + 1))
    return IntersectionArray(d, tuple(c), tuple(a), tuple(b), "integer", vertex=v, class_sizes=sizes)


def pseudo_intersection(g: Graph, v: int, perron_data: PerronData | None = None):
    """Pseudo-intersection numbers around ``v`` (weight-equitable distance partition)."""
    v = check_vertex(g, v)
    if perron_data is None:
        perron_data = perron(g)
    part = distance_partition(g, v)
    Q = check_weight_equitable(g, part, perron_data)
    if isinstance(Q, Witness):
        return Witness("pseudo_distance_regular", f"distance partition of {v} is not weight-equitable",
                       {"vertex": v, "cause": Q.to_dict()})
    return IntersectionArray.from_matrix(
        Q.matrix, "pseudo", vertex=v, lambda1=Q.lambda1, class_sizes=Q.block_sizes
    )


def is_distance_regularized(g: Graph) -> bool:
    return all(not isinstance(intersection_array(g, v), Witness) for v in range(g.n))


def hit_distance_regularized(array: IntersectionArray, i: int) -> float:
    """Hitting time to the centre from distance ``i`` via ``H(T(B)_{-0})``.

    Valid for both the simple and the maximal-entropy walk on a
    distance-regularized graph.
    """
    if array.kind != "integer":
        raise InputError("hit_distance_regularized needs an integer intersection array")
    if not 1 <= i <= array.d:
        raise InputError(f"distance must be in [1, {array.d}], got {i}")
    return hit_via_quotient(array.matrix(), i)


def hit_pseudo(array: IntersectionArray, i: int) -> float:
    """Maximal-entropy hitting time to the centre from distance ``i``.

    The quotient chain is ``T(B*) = B*/lambda1``; for an integer array this
    reduces to ``hit_distance_regularized``.
    """
    if not 1 <= i <= array.d:
        raise InputError(f"distance must be in [1, {array.d}], got {i}")
    return hit_via_quotient(array.matrix(), i)


# -- label functions ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LabelFunction:
    """``f: V x V -> alphabet`` with diagonal colours disjoint from relations.

    ``alphabet`` fixes the canonical order of labels; quotient blocks of the
    partition ``P_o`` are ordered as ``[f(o, o)]`` followed by the relation
    labels in alphabet order (empty classes dropped).
    """

    labels: tuple[tuple, ...]
    alphabet: tuple = ()

    def __post_init__(self):
        rows = tuple(tuple(_hashable(x) for x in row) for row in self.labels)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise InputError("label matrix must be square and non-empty")
        object.__setattr__(self, "labels", rows)
        seen = list(dict.fromkeys(x for row in rows for x in row))
        alphabet = tuple(_hashable(x) for x in self.alphabet) if self.alphabet else tuple(seen)
        missing = set(seen) - set(alphabet)
        if missing:
            raise InputError(f"labels {sorted(map(str, missing))} are not in the alphabet")
        if len(set(alphabet)) != len(alphabet):
            raise InputError("alphabet has repeated labels")
        object.__setattr__(self, "alphabet", alphabet)
        colors = {rows[i][i] for i in range(n)}
        relations = {rows[i][j] for i in range(n) for j in range(n) if i != j}
        both = colors & relations
        if both:
            raise InputError(f"labels {sorted(map(str, both))} are used both as colours and relations")

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def color_set(self) -> tuple:
        colors = {self.labels[i][i] for i in range(self.n)}
        return tuple(x for x in self.alphabet if x in colors)

    @property
    def relation_set(self) -> tuple:
        rel = {x for i, row in enumerate(self.labels) for j, x in enumerate(row) if i != j}
        return tuple(x for x in self.alphabet if x in rel)

    def classes(self, o: int) -> list[tuple[object, tuple[int, ...]]]:
        """Labelled blocks of ``P_o``: the centre first, then relation classes."""
        row = self.labels[o]
        out = [(row[o], (o,))]
        for x in self.relation_set:
            members = tuple(u for u in range(self.n) if u != o and row[u] == x)
            if members:
                out.append((x, members))
        return out

    def to_dict(self) -> dict:
        return {"labels": [list(r) for r in self.labels], "alphabet": list(self.alphabet)}

    @classmethod
    def from_dict(cls, d: dict) -> "LabelFunction":
        try:
            return cls(tuple(tuple(r) for r in d["labels"]), tuple(d.get("alphabet", ())))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad label-function JSON: {exc}") from None


def _hashable(x):
    if isinstance(x, list):
        return tuple(_hashable(y) for y in x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def distance_label_function(g: Graph, color: str = "degree") -> LabelFunction:
    """Distance labels ``f(o, u) = d(o, u)`` with a choice of diagonal colour.

    ``color="degree"`` colours a vertex by its degree (``"k3"``), which
    separates the two sides of a distance-biregular graph; ``"vertex"`` gives
    every vertex its own colour (the literal ``d_G^+``); ``"single"`` uses one
    colour ``"c"``.
    """
    D = distance_matrix(g)
    deg = g.degrees()
    if color == "degree":
        col = [f"k{int(deg[v])}" for v in range(g.n)]
    elif color == "vertex":
        col = [f"v{v}" for v in range(g.n)]
    elif color == "single":
        col = ["c"] * g.n
    else:
        raise InputError(f"unknown colouring {color!r}")
    labels = tuple(tuple(col[o] if u == o else int(D[o, u]) for u in range(g.n)) for o in range(g.n))
    alphabet = tuple(dict.fromkeys(col)) + tuple(range(1, int(D.max()) + 1))
    return LabelFunction(labels, alphabet)


def refinement_label_function(g: Graph, kind: str = "equitable", perron_data: PerronData | None = None) -> LabelFunction:
    """Single-colour ``f`` with ``f(o, u)`` = index of ``u``'s block in the
    coarsest stabilized (weight-)equitable partition centred at ``o``."""
    if kind == "weight" and perron_data is None:
        perron_data = perron(g)
    rows = []
    width = 0
    for o in range(g.n):
        idx = coarsest_stabilized(g, o, kind, perron_data).block_index()
        rows.append(tuple("c" if u == o else int(idx[u]) for u in range(g.n)))
        width = max(width, int(idx.max()))
    return LabelFunction(tuple(rows), ("c",) + tuple(range(1, width + 1)))


def cone_label_function(f: LabelFunction, apex_color="a0", apex_relation="a1") -> LabelFunction:
    """``f^+`` on the cone: ``f`` on the base, ``apex_color`` on the apex
    diagonal and ``apex_relation`` on every pair involving the apex."""
    if apex_color in f.alphabet or apex_relation in f.alphabet:
        raise InputError("apex labels must not occur in f")
    n = f.n
    rows = [tuple(f.labels[o]) + (apex_relation,) for o in range(n)]
    rows.append(tuple([apex_relation] * n + [apex_color]))
    return LabelFunction(tuple(rows), f.alphabet + (apex_color, apex_relation))


# -- weakly (weight-)f-equitable graphs -------------------------------------------------------


def _same_matrix(Q1: QuotientMatrix, Q2: QuotientMatrix) -> bool:
    if Q1.matrix.shape != Q2.matrix.shape:
        return False
    if Q1.kind == "equitable":
        return bool(np.array_equal(Q1.matrix, Q2.matrix))
    return bool(np.all(np.abs(Q1.matrix - Q2.matrix) <= WEIGHT_RTOL * Q1.lambda1))


def check_weakly_f_equitable(g: Graph, f: LabelFunction, kind: str = "equitable",
                             perron_data: PerronData | None = None):
    """One quotient per colour if ``g`` is weakly (weight-)f-equitable, else a ``Witness``.

    For every vertex ``o`` the partition ``P_o`` generated by ``f`` must be
    (weight-)equitable, and its quotient (indexed by the canonical label
    order) must be identical for all vertices sharing the colour ``f(o, o)``.
    With ``kind="equitable"`` the induced weight quotients are compared as
    well, as weak f-equitability presupposes the weight version. Equitable
    quotients carry ``nu_block``.
    """
    if f.n != g.n:
        raise InputError(f"label function is on {f.n} vertices, graph has {g.n}")
    if perron_data is None:
        perron_data = perron(g)
    found: dict[object, tuple[int, QuotientMatrix, QuotientMatrix | None]] = {}
    for o in range(g.n):
        classes = f.classes(o)
        labels = tuple(x for x, _ in classes)
        part = Partition(tuple(b for _, b in classes), center=o)
        Q = check_partition(g, part, kind, perron_data)
        if isinstance(Q, Witness):
            return Witness("weakly_f_equitable", f"partition generated at vertex {o} is not {kind}-equitable",
                           {"vertex": o, "color": f.labels[o][o], "cause": Q.to_dict()})
        Q = QuotientMatrix(Q.matrix, Q.kind, Q.block_sizes, Q.nu_block, Q.lambda1, labels)
        W = weight_quotient_from_equitable(Q) if kind == "equitable" else None
        color = f.labels[o][o]
        if color not in found:
            found[color] = (o, Q, W)
            continue
        o0, Q0, W0 = found[color]
        if Q0.labels != labels or not _same_matrix(Q0, Q) or (W is not None and not _same_matrix(W0, W)):
            return Witness(
                "weakly_f_equitable",
                f"vertices {o0} and {o} share colour {color!r} but have different quotients",
                {"color": color, "u": o0, "v": o, "labels_u": list(Q0.labels), "labels_v": list(labels),
                 "matrix_u": Q0.matrix.tolist(), "matrix_v": Q.matrix.tolist()},
            )
    return {c: found[c][1] for c in f.color_set}


def hit_weakly_f_equitable(quotients: dict, color, label, walk: str = "simple") -> float:
    """Hitting time from relation class ``label`` to the centre of colour ``color``.

    Equitable quotients serve both walks (``merw`` goes through
    ``D_nu B D_nu^{-1}``); weight quotients serve ``merw`` only.
    """
    try:
        Q = quotients[color]
    except KeyError:
        raise UnknownLabel(f"no quotient for colour {color!r}") from None
    if label == color:
        return 0.0
    if label not in Q.labels:
        raise UnknownLabel(f"label {label!r} does not occur in the quotient of colour {color!r}")
    idx = Q.labels.index(label)
    if Q.kind == "weight":
        if walk != "merw":
            raise InputError("a weight quotient only yields maximal-entropy hitting times")
        return hit_via_quotient(Q, idx)
    if walk == "simple":
        return hit_via_quotient(Q, idx)
    if walk == "merw":
        return hit_via_quotient(weight_quotient_from_equitable(Q), idx)
    raise InputError(f"unknown walk kind {walk!r}")


def hitting_table_via_labels(g: Graph, f: LabelFunction, quotients: dict, walk: str = "simple") -> np.ndarray:
    """``H[v, u]`` for all pairs, read off the per-colour quotients."""
    cache = {}
    for c, Q in quotients.items():
        if Q.kind == "weight" or walk == "simple":
            cache[c] = dict(zip(Q.labels, quotient_hitting_times(Q)))
        else:
            cache[c] = dict(zip(Q.labels, quotient_hitting_times(weight_quotient_from_equitable(Q))))
    H = np.zeros((g.n, g.n))
    for v in range(g.n):
        row = cache[f.labels[v][v]]
        for u in range(g.n):
            if u != v:
                H[v, u] = row[f.labels[v][u]]
    return H


@dataclass(frozen=True)
class EquiWVerdict:
    applicable: bool
    weight_certified: bool = False
    nu_constant: bool | None = None
    equitable_certified: bool | None = None
    nu_spread: float | None = None

    @property
    def consistent(self) -> bool:
        """True unless a certified weight structure lacks constant nu or equitability."""
        if not (self.applicable and self.weight_certified):
            return True
        return bool(self.nu_constant and self.equitable_certified)

    def to_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "weight_certified": self.weight_certified,
            "nu_constant": self.nu_constant,
            "equitable_certified": self.equitable_certified,
            "nu_spread": self.nu_spread,
            "consistent": self.consistent,
        }


def check_weight_f_equitable_implies_f_equitable(g: Graph, f: LabelFunction,
                                                 perron_data: PerronData | None = None) -> EquiWVerdict:
    """Empirical check that a single-colour weight-f-equitable graph is f-equitable."""
    if len(f.color_set) != 1:
        return EquiWVerdict(applicable=False)
    if perron_data is None:
        perron_data = perron(g)
    w = check_weakly_f_equitable(g, f, "weight", perron_data)
    if isinstance(w, Witness):
        return EquiWVerdict(applicable=True, weight_certified=False)
    spread = float(np.ptp(perron_data.nu))
    e = check_weakly_f_equitable(g, f, "equitable", perron_data)
    return EquiWVerdict(
        applicable=True,
        weight_certified=True,
        nu_constant=spread <= NU_CONSTANT_TOL,
        equitable_certified=not isinstance(e, Witness),
        nu_spread=spread,
    )


# -- neighbour-block criterion -----------------------------------------------------------------


def rao_hitting(g: Graph, v: int) -> float | None:
    """``2e/k - 1`` if the neighbourhood of ``v`` is a single block of the
    coarsest stabilized equitable partition at ``v``; ``None`` otherwise.

    Any stabilized equitable partition splits vertices by their number of
    neighbours in ``{v}``, so if some such partition has ``N(v)`` as one block,
    the coarsest one does too.
    """
    if g.directed:
        raise InputError("rao_hitting needs an undirected graph")
    v = check_vertex(g, v)
    part = coarsest_stabilized(g, v)
    nbrs = tuple(int(x) for x in g.neighbors(v))
    if not nbrs or nbrs not in part.blocks:
        return None
    return 2 * g.edge_count() / len(nbrs) - 1


# -- cones over regular graphs ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConeHitting:
    """Closed forms on the cone over a ``k``-regular graph of order ``n``.

    ``simple`` / ``merw`` map a label of the base function ``f`` (plus
    ``apex_label`` for the apex as start) to the hitting time towards any
    base vertex; they are ``None`` when no f-equitable structure is known.
    """

    n: int
    k: int
    lambda1: float
    lambda1_perron: float
    to_apex_simple: float
    to_apex_merw: float
    bordered: np.ndarray | None = None
    labels: tuple | None = None
    simple: dict | None = None
    merw: dict | None = None
    apex_label: str = "a1"

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "k": self.k,
            "lambda1": self.lambda1,
            "lambda1_perron": self.lambda1_perron,
            "to_apex_simple": self.to_apex_simple,
            "to_apex_merw": self.to_apex_merw,
        }
        if self.bordered is not None:
            d["bordered_quotient"] = self.bordered
            d["labels"] = list(self.labels)
            d["simple"] = [[k, v] for k, v in self.simple.items()]
            d["merw"] = [[k, v] for k, v in self.merw.items()]
        return d


def cone_lambda1(n: int, k: int) -> float:
    return k / 2 + math.sqrt(n + k * k / 4)


def bordered_quotient(B: np.ndarray, class_sizes) -> np.ndarray:
    """``B^+``: ``B`` bordered by the class sizes (apex column) and a row of ones."""
    r = B.shape[0]
    Bp = np.zeros((r + 1, r + 1))
    Bp[:r, :r] = B
    Bp[:r, r] = class_sizes
    Bp[r, :r] = 1
    return Bp


def cone_hitting(g: Graph, f: LabelFunction | None = None) -> ConeHitting:
    """Hitting times on the cone over a regular graph ``g``.

    Towards the apex: ``k + 1`` (simple) and ``lambda1^2 / n`` (maximal
    entropy) with ``lambda1 = k/2 + sqrt(n + k^2/4)``. Towards a base vertex:
    read from the bordered quotient ``B^+`` of a single-colour f-equitable
    structure on ``g``. If ``f`` is omitted, distance labels are tried and
    the tables are left empty when ``g`` is not distance-regular.
    """
    if g.directed or not g.is_regular():
        raise NotRegular("cone_hitting needs an undirected regular base graph")
    n, k = g.n, int(g.degrees()[0])
    lam = cone_lambda1(n, k)
    lam_p = perron(cone(g)).lambda1
    if abs(lam - lam_p) > CONE_LAMBDA_TOL * max(1.0, lam):
        raise NumericalError(f"cone lambda1 closed form {lam!r} disagrees with power iteration {lam_p!r}")
    base = dict(n=n, k=k, lambda1=lam, lambda1_perron=lam_p, to_apex_simple=float(k + 1), to_apex_merw=lam * lam / n)

    explicit = f is not None
    if f is None:
        f = distance_label_function(g, "single")
    quotients = check_weakly_f_equitable(g, f, "equitable")
    if isinstance(quotients, Witness) or len(quotients) != 1:
        if explicit:
            reason = quotients.message if isinstance(quotients, Witness) else "f has several colours"
            raise InputError(f"base graph is not f-equitable: {reason}")
        return ConeHitting(**base)
    (Q,) = quotients.values()
    apex_label = "a1"
    Bp = bordered_quotient(Q.matrix, Q.block_sizes)
    labels = Q.labels + (apex_label,)
    h = quotient_hitting_times(Bp)
    # block Perron values on the cone: 1 on base classes, lambda1 - k on the apex
    nu = np.ones(Bp.shape[0])
    nu[-1] = lam - k
    Bs = nu[:, None] * Bp / nu[None, :]
    hm = quotient_hitting_times(Bs)
    return ConeHitting(
        **base,
        bordered=Bp,
        labels=labels,
        simple={x: float(t) for x, t in zip(labels[1:], h[1:])},
        merw={x: float(t) for x, t in zip(labels[1:], hm[1:])},
        apex_label=apex_label,
    )
