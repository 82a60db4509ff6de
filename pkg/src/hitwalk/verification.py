"""Cross-checks between the exact solver and the structural shortcuts.

Each check runs on one graph and returns a ``CheckResult`` with status
``pass``, ``fail`` or ``n/a`` (the structure the shortcut needs is absent),
the largest discrepancy seen and, on failure, a witness. ``run_checks``
sweeps checks over many graphs and aggregates them per check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable

import numpy as np

from .errors import InputError
from .graphs import (
    Graph,
    bfs_distances,
    complete,
    complete_bipartite,
    cone,
    cycle,
    from_dict,
    hypercube,
    is_connected,
    path,
    petersen,
    star,
    wheel,
)
from .numerics import PerronData, perron
from .partitions import (
    Partition,
    Witness,
    check_equitable,
    check_weight_equitable,
    coarsest_stabilized,
    hit_quotient,
    quotient_hitting_times,
    weight_quotient_from_equitable,
)
from .regularity import (
    cone_hitting,
    distance_label_function,
    hit_distance_regularized,
    intersection_array,
    rao_hitting,
)
from .schemes import distance_scheme, hit_relation_graph, hit_t_distance_regular, scheme_adjacent_hitting
from .walks import hit_full, transition_matrix

HIT_TOL = 1e-8
EQRW_TOL = 1e-9
TRANSITION_TOL = 1e-10

CHECKS = ("eqRw", "stabHt", "stabHtW", "dbrgHT", "genR", "cone", "merw-eq-simple", "scheme")


@dataclass
class CheckResult:
    check: str
    graph: str
    status: str
    residual: float | None = None
    tolerance: float | None = None
    value: object = None
    witness: dict | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"check": self.check, "graph": self.graph, "status": self.status,
             "residual": self.residual, "tolerance": self.tolerance}
        if self.value is not None:
            d["value"] = self.value
        if self.witness is not None:
            d["witness"] = self.witness
        if self.detail:
            d["detail"] = self.detail
        return d


@dataclass
class Subject:
    """A graph under test plus optional claims read from its file."""

    name: str
    graph: Graph
    partition: Partition | None = None
    quotient: np.ndarray | None = None
    _perron: PerronData | None = None
    _full: dict = field(default_factory=dict)

    @property
    def perron(self) -> PerronData:
        if self._perron is None:
            self._perron = perron(self.graph)
        return self._perron

    def full(self, target: int, walk: str) -> np.ndarray:
        key = (target, walk)
        if key not in self._full:
            p = self.perron if walk == "merw" else None
            self._full[key] = hit_full(self.graph, target, walk, p).times
        return self._full[key]


def subject_from_dict(name: str, d: dict) -> Subject:
    """Graph JSON, optionally with a claimed ``partition`` and ``quotient``."""
    g = from_dict(d)
    part = Partition.from_dict(d["partition"]) if "partition" in d else None
    Q = np.array(d["quotient"], dtype=float) if "quotient" in d else None
    if Q is not None and part is None:
        raise InputError("a claimed quotient needs a claimed partition")
    return Subject(name, g, part, Q)


def family_suite() -> list[tuple[str, Graph]]:
    """The standard verification families, named ``family(params)``."""
    out = [(f"cycle({n})", cycle(n)) for n in range(3, 13)]
    out += [(f"complete({n})", complete(n)) for n in range(2, 9)]
    out += [(f"complete_bipartite({a},{b})", complete_bipartite(a, b)) for a in range(1, 6) for b in range(a, 6)]
    out += [(f"hypercube({d})", hypercube(d)) for d in range(2, 5)]
    out.append(("petersen()", petersen()))
    out += [(f"path({n})", path(n)) for n in range(2, 9)]
    out += [(f"wheel({n})", wheel(n)) for n in range(3, 9)]
    out += [(f"star({m})", star(m)) for m in range(1, 7)]
    return out


def _max(xs: Iterable[float]) -> float:
    return float(max(xs, default=0.0))


# -- individual checks ---------------------------------------------------------------------


def check_eqrw(s: Subject) -> CheckResult:
    """Weight quotient of every coarsest equitable partition equals ``D_nu B D_nu^{-1}``."""
    g, p = s.graph, s.perron
    res = 0.0
    for o in range(g.n):
        part = coarsest_stabilized(g, o, "equitable")
        Q = check_equitable(g, part, p)
        W = check_weight_equitable(g, part, p)
        if isinstance(W, Witness):
            return CheckResult("eqRw", s.name, "fail", None, EQRW_TOL,
                               witness={"center": o, "cause": W.to_dict()})
        diff = np.abs(W.matrix - weight_quotient_from_equitable(Q).matrix)
        r = float(diff.max())
        if r > EQRW_TOL:
            i, j = (int(t) for t in np.unravel_index(diff.argmax(), diff.shape))
            return CheckResult("eqRw", s.name, "fail", r, EQRW_TOL,
                               witness={"center": o, "entry": [i, j], "weight": float(W.matrix[i, j]),
                                        "scaled": float(weight_quotient_from_equitable(Q).matrix[i, j])})
        res = max(res, r)
    return CheckResult("eqRw", s.name, "pass", res, EQRW_TOL)


def _check_stab(s: Subject, walk: str) -> CheckResult:
    name = "stabHt" if walk == "simple" else "stabHtW"
    g = s.graph
    if s.partition is not None:
        return _check_claim(s, name, walk)
    res = 0.0
    for o in range(g.n):
        rep = hit_quotient(g, o, walk, s.perron if walk == "merw" else None)
        diff = np.abs(rep.times - s.full(o, walk))
        r = float(diff.max())
        if r > HIT_TOL:
            u = int(diff.argmax())
            return CheckResult(name, s.name, "fail", r, HIT_TOL,
                               witness={"target": o, "source": u, "quotient": float(rep.times[u]),
                                        "full": float(s.full(o, walk)[u])})
        res = max(res, r)
    return CheckResult(name, s.name, "pass", res, HIT_TOL)


def _check_claim(s: Subject, name: str, walk: str) -> CheckResult:
    """Validate a claimed stabilized partition and quotient against the graph."""
    g, part = s.graph, s.partition
    if part.center is None:
        raise InputError("a claimed partition needs a center")
    kind = "equitable" if walk == "simple" else "weight"
    Q = check_equitable(g, part, s.perron) if kind == "equitable" else check_weight_equitable(g, part, s.perron)
    if isinstance(Q, Witness):
        return CheckResult(name, s.name, "fail", None, HIT_TOL, witness=Q.to_dict())
    B = Q.matrix
    if s.quotient is not None:
        claimed = s.quotient
        if claimed.shape != B.shape:
            return CheckResult(name, s.name, "fail", None, HIT_TOL,
                               witness={"message": "claimed quotient has the wrong shape",
                                        "claimed": list(claimed.shape), "actual": list(B.shape)})
        diff = np.abs(claimed - B)
        if diff.max() > (0 if kind == "equitable" else EQRW_TOL * Q.lambda1):
            i, j = (int(t) for t in np.unravel_index(diff.argmax(), diff.shape))
            return CheckResult(name, s.name, "fail", float(diff.max()), HIT_TOL,
                               witness={"message": f"claimed quotient entry ({i}, {j}) is wrong",
                                        "entry": [i, j], "claimed": float(claimed[i, j]), "actual": float(B[i, j])})
        B = claimed
    times = quotient_hitting_times(B)[part.block_index()]
    diff = np.abs(times - s.full(part.center, walk))
    r = float(diff.max())
    if r > HIT_TOL:
        u = int(diff.argmax())
        return CheckResult(name, s.name, "fail", r, HIT_TOL,
                           witness={"target": part.center, "source": u, "quotient": float(times[u]),
                                    "full": float(s.full(part.center, walk)[u])})
    return CheckResult(name, s.name, "pass", r, HIT_TOL)


def check_stabht(s: Subject) -> CheckResult:
    """Equitable quotient hitting times equal the exact simple-walk times at every centre."""
    return _check_stab(s, "simple")


def check_stabhtw(s: Subject) -> CheckResult:
    """Weight quotient hitting times equal the exact maximal-entropy times at every centre."""
    return _check_stab(s, "merw")


def check_dbrght(s: Subject) -> CheckResult:
    """Tridiagonal intersection-array hitting equals the exact solver for both walks."""
    g = s.graph
    arrays = [intersection_array(g, v) for v in range(g.n)]
    if any(isinstance(a, Witness) for a in arrays):
        return CheckResult("dbrgHT", s.name, "n/a")
    res = 0.0
    for v, arr in enumerate(arrays):
        dist = bfs_distances(g, v)
        for i in range(1, arr.d + 1):
            h = hit_distance_regularized(arr, i)
            for walk in ("simple", "merw"):
                full = s.full(v, walk)[dist == i]
                r = float(np.abs(full - h).max())
                if r > HIT_TOL:
                    return CheckResult("dbrgHT", s.name, "fail", r, HIT_TOL,
                                       witness={"vertex": v, "distance": i, "walk": walk, "array": arr.symbol(),
                                                "quotient": h, "full": full.tolist()})
                res = max(res, r)
    values = [hit_distance_regularized(arrays[0], i) for i in range(1, arrays[0].d + 1)]
    return CheckResult("dbrgHT", s.name, "pass", res, HIT_TOL, value=values,
                       detail={"arrays": sorted({a.symbol() for a in arrays})})


def check_genr(s: Subject) -> CheckResult:
    """``2e/k - 1`` equals the exact hitting time from every neighbour where it applies."""
    g = s.graph
    values, res = set(), 0.0
    for v in range(g.n):
        r = rao_hitting(g, v)
        if r is None:
            continue
        full = s.full(v, "simple")[g.neighbors(v)]
        d = float(np.abs(full - r).max())
        if d > HIT_TOL:
            return CheckResult("genR", s.name, "fail", d, HIT_TOL,
                               witness={"vertex": v, "value": r, "full": full.tolist()})
        values.add(r)
        res = max(res, d)
    if not values:
        return CheckResult("genR", s.name, "n/a")
    vals = sorted(values)
    return CheckResult("genR", s.name, "pass", res, HIT_TOL, value=vals[0] if len(vals) == 1 else vals)


def _cone_base(g: Graph) -> tuple[Graph, Graph] | None:
    """``(base, cone)``: the cone over ``g`` if regular, else ``g`` itself if it is a cone over a regular graph."""
    if not g.directed and g.is_regular():
        return g, cone(g)
    if g.directed or g.n < 3:
        return None
    deg = g.degrees()
    for apex in np.flatnonzero(deg == g.n - 1):
        keep = np.arange(g.n) != apex
        sub = g.adj[np.ix_(keep, keep)]
        if is_connected(sub) and np.all(sub.sum(axis=0) == sub.sum(axis=0)[0]):
            # relabel so the apex comes last, as cone() builds it
            order = np.r_[np.flatnonzero(keep), apex]
            return Graph(sub), Graph(g.adj[np.ix_(order, order)])
    return None


def check_cone(s: Subject) -> CheckResult:
    """Closed forms on the cone over a regular graph match the exact solver."""
    pair = _cone_base(s.graph)
    if pair is None:
        return CheckResult("cone", s.name, "n/a")
    base, c = pair
    ch = cone_hitting(base)
    apex = base.n
    pc = perron(c)
    checks = {
        "to_apex_simple": (ch.to_apex_simple, hit_full(c, apex, "simple").times[:apex]),
        "to_apex_merw": (ch.to_apex_merw, hit_full(c, apex, "merw", pc).times[:apex]),
    }
    if ch.simple is not None:
        f = distance_label_function(base, "single")
        labels = [f.labels[0][u] for u in range(1, base.n)] + [ch.apex_label]
        for walk, table in (("simple", ch.simple), ("merw", ch.merw)):
            full = hit_full(c, 0, walk, pc if walk == "merw" else None).times[1:]
            checks[f"to_base_{walk}"] = (np.array([table[x] for x in labels]), full)
    res = 0.0
    for key, (closed, full) in checks.items():
        r = float(np.abs(np.asarray(full) - closed).max())
        if r > HIT_TOL:
            return CheckResult("cone", s.name, "fail", r, HIT_TOL,
                               witness={"quantity": key, "closed_form": np.asarray(closed).tolist(),
                                        "full": np.asarray(full).tolist()})
        res = max(res, r)
    return CheckResult("cone", s.name, "pass", res, HIT_TOL,
                       value={"to_apex_simple": ch.to_apex_simple, "to_apex_merw": ch.to_apex_merw},
                       detail={"base_order": base.n, "base_degree": ch.k, "lambda1": ch.lambda1})


def check_merw_eq_simple(s: Subject) -> CheckResult:
    """On regular and biregular graphs the two walks coincide."""
    g = s.graph
    if not (g.is_regular() or g.is_biregular()):
        return CheckResult("merw-eq-simple", s.name, "n/a")
    Ts = transition_matrix(g, "simple").matrix
    Tm = transition_matrix(g, "merw", s.perron).matrix
    t_err = float(np.abs(Tm - Ts).sum(axis=1).max())
    if t_err > TRANSITION_TOL:
        return CheckResult("merw-eq-simple", s.name, "fail", t_err, TRANSITION_TOL,
                           witness={"message": "transition matrices differ", "norm_inf": t_err})
    h_err = _max(float(np.abs(s.full(v, "simple") - s.full(v, "merw")).max()) for v in range(g.n))
    if h_err > HIT_TOL:
        return CheckResult("merw-eq-simple", s.name, "fail", h_err, HIT_TOL,
                           witness={"message": "hitting matrices differ", "max_abs": h_err})
    return CheckResult("merw-eq-simple", s.name, "pass", max(t_err, h_err), HIT_TOL,
                       detail={"transition_norm_inf": t_err, "hitting_max_abs": h_err})


def check_scheme(s: Subject) -> CheckResult:
    """Distance-scheme relation quotients match the exact solver on relation and union graphs."""
    g = s.graph
    sch = distance_scheme(g)
    if isinstance(sch, Witness):
        return CheckResult("scheme", s.name, "n/a")
    L = sch.label_matrix()
    res = 0.0
    unions = [(i,) for i in range(1, sch.d + 1)] + list(combinations(range(1, sch.d + 1), 2))
    for e in unions:
        A = sch.union_adjacency(e)
        if not is_connected(A):
            continue
        full = hit_full(Graph(A.astype(float)), 0).times
        for j in range(1, sch.d + 1):
            h = hit_relation_graph(sch, e[0], j) if len(e) == 1 else hit_t_distance_regular(sch, e, j)
            r = float(np.abs(full[L[0] == j] - h).max())
            if r > HIT_TOL:
                return CheckResult("scheme", s.name, "fail", r, HIT_TOL,
                                   witness={"relations": list(e), "start": j, "quotient": h,
                                            "full": full[L[0] == j].tolist()})
            res = max(res, r)
        if len(e) == 1:
            scheme_adjacent_hitting(sch, e[0])
    return CheckResult("scheme", s.name, "pass", res, HIT_TOL, detail={"classes": sch.d})


CHECK_FUNCTIONS: dict[str, Callable[[Subject], CheckResult]] = {
    "eqRw": check_eqrw,
    "stabHt": check_stabht,
    "stabHtW": check_stabhtw,
    "dbrgHT": check_dbrght,
    "genR": check_genr,
    "cone": check_cone,
    "merw-eq-simple": check_merw_eq_simple,
    "scheme": check_scheme,
}


def parse_checks(names: Iterable[str] | None) -> list[str]:
    if not names:
        return list(CHECKS)
    out = []
    for n in names:
        if n not in CHECK_FUNCTIONS:
            raise InputError(f"unknown check {n!r}; expected one of {', '.join(CHECKS)}")
        out.append(n)
    return out


def run_checks(subjects: Iterable[Subject], checks: Iterable[str] | None = None) -> dict:
    """Run ``checks`` on every subject; ``status`` is ``fail`` if any row failed."""
    names = parse_checks(checks)
    rows = []
    for s in subjects:
        for c in names:
            rows.append(CHECK_FUNCTIONS[c](s))
    summary = []
    for c in names:
        mine = [r for r in rows if r.check == c]
        counts = {st: sum(r.status == st for r in mine) for st in ("pass", "fail", "n/a")}
        status = "fail" if counts["fail"] else ("pass" if counts["pass"] else "n/a")
        summary.append({
            "check": c,
            "status": status,
            **counts,
            "max_residual": _max(r.residual for r in mine if r.residual is not None),
        })
    overall = "fail" if any(x["status"] == "fail" for x in summary) else "pass"
    return {"status": overall, "summary": summary, "results": [r.to_dict() for r in rows]}


def suite_subjects() -> list[Subject]:
    return [Subject(name, g) for name, g in family_suite()]
