"""Command-line front end.

Every command prints one JSON object on stdout with a ``result`` payload and a
``run`` record (argv, input digests, seed, version, elapsed time). Exit codes:
0 ok, 2 input error, 3 a verification check failed, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__, jsonio
from .errors import InputError, NumericalError
from .graphs import FAMILIES, Graph, cone, generate, random_connected, read_graph, subdivision, to_dict, write_graph
from .numerics import perron
from .partitions import KINDS, Witness, check_partition, coarsest_stabilized, hit_quotient
from .schemes import CATALOG, hit_relation_graph, hit_t_distance_regular, read_scheme, scheme_adjacent_hitting
from .verification import CHECKS, Subject, run_checks, subject_from_dict, suite_subjects
from .walks import WALK_KINDS, hit_full, hit_monte_carlo

EXIT_OK, EXIT_INPUT, EXIT_CHECK, EXIT_NUMERIC = 0, 2, 3, 4

CONVENTION = (
    "times[u] is the expected number of steps from u to the target; "
    "transition matrices are column-stochastic (T[i, j] = P(j -> i))"
)


class CheckFailed(Exception):
    """Raised by a command whose payload is complete but reports a failed check."""

    def __init__(self, payload):
        self.payload = payload


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _load_graph(path, inputs: dict) -> Graph:
    try:
        g = read_graph(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    inputs[str(path)] = _digest(path)
    return g


# -- commands ------------------------------------------------------------------------------


def cmd_gen(args, inputs):
    if args.family == "cone" or args.family == "subdivision":
        if not args.base:
            raise InputError(f"{args.family} needs --base GRAPH")
        base = _load_graph(args.base, inputs)
        g = cone(base) if args.family == "cone" else subdivision(base)
    elif args.family == "random":
        if len(args.params) != 2:
            raise InputError("random takes n and p")
        try:
            n, p = int(args.params[0]), float(args.params[1])
        except ValueError:
            raise InputError("random takes an integer n and a float p") from None
        g = random_connected(n, p, args.seed)
    else:
        g = generate(args.family, *args.params)
    result = {"family": args.family, "params": list(args.params), "n": g.n, "edges": g.edge_count()}
    if args.output:
        write_graph(g, args.output)
        result["path"] = str(args.output)
    else:
        result["graph"] = to_dict(g)
    return result


def cmd_hit(args, inputs):
    g = _load_graph(args.graph, inputs)
    p = perron(g) if args.walk == "merw" else None
    if args.method == "full":
        rep = hit_full(g, args.target, args.walk, p)
    elif args.method == "quotient":
        rep = hit_quotient(g, args.target, args.walk, p)
    else:
        if args.source is None:
            raise InputError("--method mc needs --source")
        rep = hit_monte_carlo(g, args.target, args.source, args.walk, args.samples, args.seed, p)
    if args.source is not None and rep.source is None:
        if not 0 <= args.source < g.n:
            raise InputError(f"source {args.source} out of range [0, {g.n})")
        rep.source = args.source
    out = rep.to_dict()
    out["convention"] = CONVENTION
    return out


def cmd_verify(args, inputs):
    checks = []
    for item in args.checks or []:
        checks += [c for c in item.split(",") if c]
    subjects: list[Subject] = []
    if args.suite == "families":
        subjects += suite_subjects()
    for path in args.graphs:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
        inputs[str(path)] = _digest(path)
        if Path(path).suffix.lower() == ".json":
            try:
                d = json.loads(text)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}: invalid JSON: {exc}") from None
            subjects.append(subject_from_dict(str(path), d))
        else:
            subjects.append(Subject(str(path), read_graph(path)))
    if not subjects:
        raise InputError("nothing to verify: give graph files or --suite families")
    report = run_checks(subjects, checks)
    if report["status"] == "fail":
        raise CheckFailed(report)
    return report


def cmd_partition(args, inputs):
    g = _load_graph(args.graph, inputs)
    p = perron(g)
    part = coarsest_stabilized(g, args.center, args.kind, p)
    Q = check_partition(g, part, args.kind, p)
    if isinstance(Q, Witness):  # refinement output is stabilized by construction
        raise NumericalError(f"refined partition failed its own check: {Q.message}")
    out = {"kind": args.kind, "partition": part.to_dict(), "quotient": Q.to_dict(),
           "column_sums": Q.matrix.sum(axis=0)}
    return out


def cmd_scheme(args, inputs):
    if (args.scheme is None) == (args.catalog is None):
        raise InputError("give exactly one of a scheme file or --catalog NAME")
    if args.catalog is not None:
        name, *params = args.catalog
        if name not in CATALOG:
            raise InputError(f"unknown catalog scheme {name!r}; choose from {', '.join(CATALOG)}")
        try:
            s = CATALOG[name](*params)
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad parameters for {name}: {exc}") from None
    else:
        try:
            s = read_scheme(args.scheme)
        except OSError as exc:
            raise InputError(f"cannot read {args.scheme}: {exc.strerror or exc}") from None
        inputs[str(args.scheme)] = _digest(args.scheme)
        if isinstance(s, Witness):
            raise CheckFailed({"status": "fail", "witness": s.to_dict()})
    out = {"n": s.n, "d": s.d, "start": args.start}
    if args.union:
        try:
            e = sorted({int(x) for x in args.union.split(",") if x})
        except ValueError:
            raise InputError("--union takes comma-separated relation indices") from None
        out["relations"] = e
        out["value"] = hit_t_distance_regular(s, e, args.start)
    else:
        if args.relation is None:
            raise InputError("give --relation or --union")
        out["relations"] = [args.relation]
        out["value"] = hit_relation_graph(s, args.relation, args.start)
        if args.start == args.relation:
            out["adjacent"] = scheme_adjacent_hitting(s, args.relation)
    return out


# -- parser ----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hitwalk", description="Hitting times of simple and maximal-entropy random walks.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a graph file")
    g.add_argument("family", help=f"one of {', '.join(FAMILIES + ('cone', 'subdivision', 'random'))}")
    g.add_argument("params", nargs="*")
    g.add_argument("--base", help="base graph for cone / subdivision")
    g.add_argument("--seed", type=int, default=0, help="seed for random graphs")
    g.add_argument("-o", "--output", help="output path (.json or edge list); stdout if omitted")
    g.set_defaults(func=cmd_gen)

    h = sub.add_parser("hit", help="hitting times to a target vertex")
    h.add_argument("graph")
    h.add_argument("--target", type=int, required=True)
    h.add_argument("--source", type=int)
    h.add_argument("--walk", choices=WALK_KINDS, default="simple")
    h.add_argument("--method", choices=("full", "quotient", "mc"), default="full")
    h.add_argument("--samples", type=int, default=10_000)
    h.add_argument("--seed", type=int, default=0)
    h.set_defaults(func=cmd_hit)

    v = sub.add_parser("verify", help="run cross-checks on graphs or the family suite")
    v.add_argument("graphs", nargs="*")
    v.add_argument("--suite", choices=("families",))
    v.add_argument("--checks", action="append", help=f"comma-separated subset of {', '.join(CHECKS)}")
    v.set_defaults(func=cmd_verify)

    p = sub.add_parser("partition", help="coarsest stabilized partition and its quotient")
    p.add_argument("graph")
    p.add_argument("--center", type=int, required=True)
    p.add_argument("--kind", choices=KINDS, default="equitable")
    p.set_defaults(func=cmd_partition)

    s = sub.add_parser("scheme", help="hitting times in association-scheme relation graphs")
    s.add_argument("scheme", nargs="?", help="scheme JSON file")
    s.add_argument("--catalog", nargs="+", metavar="NAME", help=f"bundled scheme: {', '.join(CATALOG)} [params]")
    s.add_argument("--relation", type=int)
    s.add_argument("--union", help="comma-separated relation indices")
    s.add_argument("--start", type=int, required=True)
    s.set_defaults(func=cmd_scheme)
    return ap


def _seed_used(args):
    if (args.command == "hit" and args.method == "mc") or (args.command == "gen" and args.family == "random"):
        return args.seed
    return None


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    inputs: dict[str, str] = {}
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        result = args.func(args, inputs)
    except CheckFailed as exc:
        result, code = exc.payload, EXIT_CHECK
    except (InputError, NumericalError) as exc:
        code = EXIT_INPUT if isinstance(exc, InputError) else EXIT_NUMERIC
        print(f"hitwalk: {exc}", file=sys.stderr)
        print(jsonio.dumps({"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code}}))
        return code
    run = {
        "argv": argv,
        "inputs": inputs,
        "seed": _seed_used(args),
        "version": __version__,
        "elapsed_s": time.perf_counter() - t0,
    }
    print(jsonio.dumps({"command": args.command, "result": result, "run": run}))
    if code == EXIT_CHECK:
        print("hitwalk: one or more checks failed", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
