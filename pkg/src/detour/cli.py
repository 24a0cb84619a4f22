"""Command-line front end.  Results go to stdout as JSON, diagnostics to stderr.

Exit status: 0 yes/success, 1 no/not found, 2 usage or input error,
3 internal consistency error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path as FsPath

from .brute import PathLimitExceeded, enumerate_st_paths
from .certificates import CASES, CertificateError, DualCertificate, load_certificate, verify_certificate
from .exact_path import ExactPathOracle, OracleConfig
from .graph import (
    Graph,
    GraphError,
    bfs_distances,
    complete_graph,
    cycle_graph,
    format_graph,
    grid_graph,
    is_path,
    parse_graph,
    path_graph,
    random_graph,
)
from .blocks import relevant_part
from .solvers import (
    ConsistencyError,
    DetourInstance,
    longest_decider,
    search_to_decision,
    solve_exact_detour,
    solve_longest_detour,
)
from .treewidth import (
    TreewidthBudgetExceeded,
    exact_treewidth_small,
    format_td,
    heuristic_decomposition,
    parse_td,
    require_valid,
    treewidth_lower_bound,
)
from .tetra import gen_subdivided_k4

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_CONSISTENCY = 0, 1, 2, 3
DETERMINISTIC_LIMIT = 20


class InputError(Exception):
    pass


def _read_graph(path: str) -> Graph:
    try:
        text = sys.stdin.read() if path == "-" else FsPath(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_graph(text)


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc) + "\n")


def _check_emitted_path(g: Graph, path, s: int, t: int, length: int | None = None, at_least: int | None = None) -> None:
    if path is None:
        return
    if not is_path(g, path, s, t):
        raise ConsistencyError(f"refusing to emit invalid witness {list(path)}")
    ln = len(path) - 1
    if length is not None and ln != length:
        raise ConsistencyError(f"witness has length {ln}, expected {length}")
    if at_least is not None and ln < at_least:
        raise ConsistencyError(f"witness has length {ln}, expected at least {at_least}")


def _oracle_cfg(args, g: Graph) -> OracleConfig:
    if args.deterministic and g.n > DETERMINISTIC_LIMIT:
        raise InputError(f"--deterministic refuses graphs with more than {DETERMINISTIC_LIMIT} vertices (n = {g.n})")
    kw = dict(delta=args.delta, seed=args.seed, deterministic=args.deterministic)
    if args.trials is not None:
        kw["trials"] = args.trials
    if args.fallback_threshold is not None:
        kw["fallback_threshold"] = args.fallback_threshold
    try:
        return OracleConfig(**kw)
    except ValueError as exc:
        raise InputError(str(exc)) from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_longest(args) -> int:
    g = _read_graph(args.graph)
    inst = DetourInstance(g, args.s, args.t, args.k)
    res = solve_longest_detour(inst, gate_override=args.gate_override, construct=args.construct, strategy=args.strategy)
    if res.witness is not None:
        _check_emitted_path(g, res.witness, args.s, args.t, at_least=res.distance + args.k)
    if res.diagnostic:
        print(res.diagnostic, file=sys.stderr)
    _emit(res.to_json())
    return EXIT_YES if res.answer else EXIT_NO


def cmd_exact_detour(args) -> int:
    g = _read_graph(args.graph)
    inst = DetourInstance(g, args.s, args.t, args.k)
    res = solve_exact_detour(inst, _oracle_cfg(args, g))
    if res.witness is not None:
        _check_emitted_path(g, res.witness, args.s, args.t, length=res.distance + args.k)
    if res.diagnostic:
        print(res.diagnostic, file=sys.stderr)
    _emit(res.to_json())
    return EXIT_YES if res.answer else EXIT_NO


def cmd_find_path(args) -> int:
    g = _read_graph(args.graph)
    inst = DetourInstance(g, args.s, args.t, args.k)
    calls = [0]
    if args.exact:
        cfg = _oracle_cfg(args, g)

        def base(gg, a, b, kk):
            return solve_exact_detour(DetourInstance(gg, a, b, kk), cfg).answer
    else:
        if g.directed:
            raise InputError("find-path without --exact needs an undirected graph")
        base = longest_decider

    def decider(gg, a, b, kk):
        calls[0] += 1
        return base(gg, a, b, kk)

    path = search_to_decision(inst, decider, exact=args.exact)
    dist = bfs_distances(g, args.s).get(args.t)
    if path is not None:
        if args.exact:
            _check_emitted_path(g, path, args.s, args.t, length=dist + args.k)
        else:
            _check_emitted_path(g, path, args.s, args.t, at_least=dist + args.k)
    _emit({
        "schema": 1,
        "problem": "exact-detour" if args.exact else "longest-detour",
        "answer": "yes" if path is not None else "no",
        "k": args.k,
        "distance": dist,
        "witness": list(path) if path is not None else None,
        "stats": {"decision_calls": calls[0], "edges": g.m, "experimental": bool(args.exact)},
    })
    return EXIT_YES if path is not None else EXIT_NO


def cmd_exact_path(args) -> int:
    g = _read_graph(args.graph)
    g.check_vertex(args.s)
    g.check_vertex(args.t)
    if args.len < 0:
        raise InputError("--len must be non-negative")
    oracle = ExactPathOracle(_oracle_cfg(args, g))
    path = oracle.query(g, args.s, args.t, [args.len]).get(args.len)
    _check_emitted_path(g, path, args.s, args.t, length=args.len)
    _emit({
        "schema": 1,
        "problem": "exact-path",
        "answer": "yes" if path is not None else "no",
        "len": args.len,
        "witness": list(path) if path is not None else None,
        "stats": {"trials": oracle.stats.trials, "seed": oracle.seed},
    })
    return EXIT_YES if path is not None else EXIT_NO


def cmd_relevant_part(args) -> int:
    g = _read_graph(args.graph)
    sub = relevant_part(g, args.s, args.t)
    _emit({
        "schema": 1,
        "vertices": list(sub.to_host),
        "n": sub.graph.n,
        "m": sub.graph.m,
        "edges": [[sub.to_host[a], sub.to_host[b]] for a, b in sub.graph.edges],
    })
    return EXIT_YES


def cmd_treewidth(args) -> int:
    g = _read_graph(args.graph)
    doc: dict = {"schema": 1, "n": g.n, "lower_bound": treewidth_lower_bound(g)}
    if args.validate:
        td, n = parse_td(FsPath(args.validate).read_text())
        if n != g.n:
            raise InputError(f".td file is for {n} vertices, graph has {g.n}")
        require_valid(g, td)
        doc.update(strategy="given", width=td.width)
    else:
        if args.strategy == "exact":
            try:
                td = exact_treewidth_small(g)
            except TreewidthBudgetExceeded as exc:
                raise InputError(str(exc)) from None
            doc["exact"] = True
        else:
            td = heuristic_decomposition(g, args.strategy)
        doc.update(strategy=args.strategy, width=td.width)
    if args.td_out:
        FsPath(args.td_out).write_text(format_td(td, g.n))
    _emit(doc)
    return EXIT_YES


def cmd_gen(args) -> int:
    kind = args.kind
    rng = random.Random(args.seed)
    if kind == "k4":
        if not args.counts:
            raise InputError("gen k4 needs --counts c1,...,c6")
        try:
            counts = [int(x) for x in args.counts.split(",")]
        except ValueError:
            raise InputError(f"bad --counts {args.counts!r}") from None
        g, _ = gen_subdivided_k4(counts)
    elif kind == "cycle":
        g = cycle_graph(_need(args.n, "--n"), args.directed)
    elif kind == "path":
        g = path_graph(_need(args.n, "--n"))
    elif kind == "complete":
        g = complete_graph(_need(args.n, "--n"))
    elif kind == "grid":
        g = grid_graph(_need(args.rows, "--rows"), _need(args.cols, "--cols"))
    else:
        g = random_graph(_need(args.n, "--n"), args.p, rng, args.directed)
    text = format_graph(g)
    if args.output:
        FsPath(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_YES


def _need(value, flag: str):
    if value is None:
        raise InputError(f"missing {flag}")
    return value


def cmd_verify_cert(args) -> int:
    if args.file:
        try:
            cert = DualCertificate.from_json(json.loads(FsPath(args.file).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot load certificate: {exc}") from None
    elif args.case:
        cert = load_certificate(args.case)
    else:
        raise InputError("verify-cert needs --case or --file")
    rep = verify_certificate(cert)
    _emit({"schema": 1, **rep.to_json()})
    if not rep.valid:
        for m in rep.messages:
            print(m, file=sys.stderr)
    return EXIT_YES if rep.valid else EXIT_NO


def cmd_oracle(args) -> int:
    g = _read_graph(args.graph)
    g.check_vertex(args.s)
    g.check_vertex(args.t)
    try:
        paths = enumerate_st_paths(g, args.s, args.t, args.max_paths)
    except PathLimitExceeded as exc:
        raise InputError(str(exc)) from None
    lengths = sorted({len(p) - 1 for p in paths})
    dist = bfs_distances(g, args.s).get(args.t)
    doc: dict = {"schema": 1, "problem": "oracle", "distance": dist, "paths": len(paths), "lengths": lengths}
    if args.k is not None and dist is not None:
        doc["longest_detour"] = "yes" if lengths[-1] >= dist + args.k else "no"
        doc["exact_detour"] = "yes" if dist + args.k in lengths else "no"
    _emit(doc)
    return EXIT_YES if paths else EXIT_NO


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="detour", description="Longest and Exact Detour solvers")
    sub = p.add_subparsers(dest="command", required=True)

    def instance(sp, need_k: bool = True):
        sp.add_argument("graph", help="graph file ('-' for stdin)")
        sp.add_argument("--s", type=int, required=True)
        sp.add_argument("--t", type=int, required=True)
        if need_k:
            sp.add_argument("--k", type=int, required=True)

    def oracle_flags(sp):
        sp.add_argument("--delta", type=float, default=0.01, help="total error probability")
        sp.add_argument("--seed", type=int, default=None, help="RNG seed (default: $DETOUR_SEED or 0)")
        sp.add_argument("--deterministic", action="store_true", help="exhaustive oracle, n <= 20 only")
        sp.add_argument("--trials", type=int, default=None, help="override the colour-coding trial count")
        sp.add_argument("--fallback-threshold", type=int, default=None)

    sp = sub.add_parser("longest-detour", help="path of length >= d(s,t) + k")
    instance(sp)
    sp.add_argument("--construct", action="store_true", help="also build a witness on the large-treewidth branch")
    sp.add_argument("--gate-override", type=int, default=None, metavar="W", help="replace the width threshold (unsound below 32k+2)")
    sp.add_argument("--strategy", choices=("min-fill", "min-degree"), default="min-fill")
    sp.set_defaults(func=cmd_longest)

    sp = sub.add_parser("exact-detour", help="path of length exactly d(s,t) + k")
    instance(sp)
    oracle_flags(sp)
    sp.set_defaults(func=cmd_exact_detour)

    sp = sub.add_parser("find-path", help="witness from yes/no answers only")
    instance(sp)
    sp.add_argument("--exact", action="store_true", help="Exact Detour instead of Longest Detour (experimental)")
    oracle_flags(sp)
    sp.set_defaults(func=cmd_find_path)

    sp = sub.add_parser("exact-path", help="(s,t)-path with exactly --len edges")
    instance(sp, need_k=False)
    sp.add_argument("--len", type=int, required=True)
    oracle_flags(sp)
    sp.set_defaults(func=cmd_exact_path)

    sp = sub.add_parser("relevant-part", help="vertices on some (s,t)-path")
    instance(sp, need_k=False)
    sp.set_defaults(func=cmd_relevant_part)

    sp = sub.add_parser("treewidth", help="decomposition width and lower bound")
    sp.add_argument("graph")
    sp.add_argument("--strategy", choices=("min-fill", "min-degree", "exact"), default="min-fill")
    sp.add_argument("--td-out", help="write the decomposition in .td format")
    sp.add_argument("--validate", metavar="TD", help="validate a given .td file instead")
    sp.set_defaults(func=cmd_treewidth)

    sp = sub.add_parser("gen", help="emit a graph file")
    sp.add_argument("kind", choices=("k4", "cycle", "grid", "random", "path", "complete"))
    sp.add_argument("--counts", help="six subdivision counts for k4")
    sp.add_argument("--n", type=int)
    sp.add_argument("--rows", type=int)
    sp.add_argument("--cols", type=int)
    sp.add_argument("--p", type=float, default=0.3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--directed", action="store_true")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("verify-cert", help="check a dual certificate exactly")
    sp.add_argument("--case", choices=CASES)
    sp.add_argument("--file")
    sp.set_defaults(func=cmd_verify_cert)

    sp = sub.add_parser("oracle", help="brute-force path enumeration")
    instance(sp, need_k=False)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--max-paths", type=int, default=1_000_000)
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_YES
    if getattr(args, "k", None) is not None and args.k < 0:
        print("error: --k must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, GraphError, CertificateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConsistencyError as exc:
        print(f"consistency error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY


if __name__ == "__main__":
    sys.exit(main())
