#!/usr/bin/env python3
"""
Command-line interface for the separator toolkit.

Usage:
    python cli.py separate --graph G.graph [--weights W] [--costs R] -t 4 -a 1
    python cli.py analyze --graph G.graph --radii 1,2 [--exact]
    python cli.py oracle --graph G.graph -t 2 | --star 9 | --family 3 10 -t 36
    python cli.py gen star 9 --lower-bound-costs --out star9
    python cli.py verify --graph G.graph --result result.json
    python cli.py sweep --graph G.graph --t-values 1,2,4 --a-values 0,1

stdout carries only the JSON or CSV document. Exit codes: 0 success,
1 verification failed, 2 bad input, 3 exhaustive cap exceeded, 4 internal
invariant violation.
"""

import argparse
import json
import os
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from applications import (
    DistanceSeparatorResult,
    distance_separator,
    edge_separator,
    lower_bound_family_check,
    min_outliers_oracle,
    star_cost_bound_check,
    verify_distance_separator,
    verify_edge_separator,
)
from config import get_settings, status
from errors import CapacityError, DomainError, InvariantViolation, ParameterError
from graph_core import (
    Graph,
    VertexAssignment,
    biclique_lower_bound_assignments,
    format_rational,
    gen_complete,
    gen_cycle,
    gen_grid,
    gen_path,
    gen_random_bounded_degree,
    gen_star,
    gen_subdivided_biclique,
    load_assignment,
    load_graph,
    save_assignment,
    save_graph,
    star_lower_bound_costs,
)
from ordering import LinearOrdering, adm_under, best_ordering, wcol_exact, wcol_under
from reach_graph import nabla_bruteforce
from separator_engine import SeparatorResult, VerificationReport, iterate_separator, make_result, verify_separator

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INPUT = 2
EXIT_CAPACITY = 3
EXIT_INTERNAL = 4


# ----------------------------------------------------------------------------
# Input helpers
# ----------------------------------------------------------------------------

def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise ParameterError(f"expected comma-separated integers, got {text!r}")


def load_instance(args) -> Tuple[Graph, VertexAssignment, VertexAssignment, List[str]]:
    """Graph plus w and rho; missing assignment files default to uniform 1"""
    g = load_graph(_read(args.graph))
    defaults = []
    if getattr(args, "weights", None):
        w = load_assignment(_read(args.weights), g.vertex_count)
    else:
        w = VertexAssignment.uniform(g.vertex_count)
        defaults.append("weights")
    if getattr(args, "costs", None):
        rho = load_assignment(_read(args.costs), g.vertex_count)
    else:
        rho = VertexAssignment.uniform(g.vertex_count)
        defaults.append("costs")
    for name in defaults:
        status("WARNING", f"no {name} file given, assuming uniform 1", force=True)
    return g, w, rho, defaults


def resolve_ordering(g: Graph, mode: str, radius: int) -> Optional[LinearOrdering]:
    """heuristic (None: the library default), exact, or file:PATH"""
    if mode == "heuristic":
        return None
    if mode == "exact":
        return best_ordering(g, radius, "exact")
    if mode.startswith("file:"):
        return best_ordering(g, radius, "file", mode[len("file:"):])
    raise ParameterError(f"unknown ordering mode: {mode}")


def _check_t(t: int) -> None:
    if t < 1:
        raise ParameterError("t must be >= 1")


def _trace_path(path: Optional[str]) -> Optional[str]:
    if not path:
        return None
    trace_dir = get_settings().trace_dir
    if trace_dir and not os.path.dirname(path):
        return os.path.join(trace_dir, path)
    return path


def emit(document: Any) -> None:
    print(json.dumps(document, indent=2, sort_keys=True))


def _cell(value: Any) -> Any:
    if isinstance(value, list):
        if all(isinstance(item, int) for item in value):
            return " ".join(str(item) for item in value)
        return json.dumps(value, sort_keys=True)
    return value


def emit_document(document: Dict[str, Any], fmt: str) -> None:
    """JSON document, or a one-row CSV with vertex lists space-separated"""
    if fmt == "json":
        emit(document)
        return
    row = {key: _cell(value) for key, value in sorted(document.items())}
    sys.stdout.write(pd.DataFrame([row], dtype=object).to_csv(index=False))


def emit_frame(frame: pd.DataFrame, fmt: str) -> None:
    if fmt == "json":
        emit(json.loads(frame.to_json(orient="records")))
    else:
        sys.stdout.write(frame.to_csv(index=False))


def vertex_document(result: SeparatorResult, t: int, a: int, valid: bool,
                    defaults: Sequence[str], trace_path: Optional[str]) -> Dict[str, Any]:
    return {
        "kind": "vertex",
        "t": t,
        "a": a,
        "separator": sorted(result.separator),
        "outliers": sorted(result.outliers),
        "nonoutlier_cost": format_rational(result.nonoutlier_cost),
        "component_weights": [format_rational(value) for value in result.component_weights],
        "schedule": [level.as_row() for level in result.schedule],
        "restarts": result.restarts,
        "trace_path": trace_path,
        "defaults": list(defaults),
        "valid": valid,
    }


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------

def cmd_separate(args) -> int:
    _check_t(args.t)
    if args.a < 0:
        raise ParameterError("a must be >= 0")
    g, w, rho, defaults = load_instance(args)

    if args.kind == "distance":
        result = distance_separator(g, args.t, args.r, args.a)
        emit_document({
            "kind": "distance",
            "t": args.t,
            "r": result.r,
            "A": sorted(result.A),
            "B": sorted(result.B),
            "C": sorted(result.C),
            "Z": sorted(result.Z),
        }, args.format)
        return EXIT_OK

    if args.kind == "edge":
        result = edge_separator(g, args.t, args.a)
        emit_document(
            {"kind": "edge", "t": args.t, "Z": sorted(result.Z), "F": [list(e) for e in result.F]}, args.format
        )
        return EXIT_OK

    order = resolve_ordering(g, args.ordering, args.r)
    result = iterate_separator(g, w, rho, args.t, args.a, order)
    report = verify_separator(g, w, rho, args.t, result)
    trace_path = _trace_path(args.trace)
    if trace_path:
        _write(trace_path, "".join(f"{line}\n" for line in result.trace))
    emit_document(vertex_document(result, args.t, args.a, report.ok, defaults, trace_path), args.format)
    if not report:
        status("ERROR", f"result fails {report.clause}: {report.detail}", force=True)
        return EXIT_INVALID
    status("OK", f"separator of {len(result.separator)} vertices, {len(result.outliers)} outliers")
    return EXIT_OK


def cmd_analyze(args) -> int:
    g = load_graph(_read(args.graph))
    radii = _int_list(args.radii)
    if not radii or min(radii) < 1:
        raise ParameterError("radii must be positive integers")
    order = resolve_ordering(g, args.ordering, max(radii))
    if order is None:
        order = best_ordering(g, max(radii))

    rows = []
    for r in radii:
        row = {
            "r": r,
            "wcol_under": wcol_under(g, order, r),
            "adm_under": adm_under(g, order, r),
            "wcol_exact": None,
            "nabla": None,
        }
        if args.exact:
            try:
                row["wcol_exact"] = wcol_exact(g, r)[0]
            except CapacityError as e:
                status("WARNING", str(e), force=True)
            try:
                row["nabla"] = format_rational(nabla_bruteforce(g, r))
            except CapacityError as e:
                status("WARNING", str(e), force=True)
        rows.append(row)

    frame = pd.DataFrame(rows, columns=["r", "wcol_under", "adm_under", "wcol_exact", "nabla"], dtype=object)
    emit_frame(frame, args.format)
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.star is not None:
        emit({"kind": "star", "n": args.star, "holds": star_cost_bound_check(args.star)})
        return EXIT_OK
    _check_t(args.t)
    if args.family is not None:
        s, n = args.family
        analytic, oracle, passed = lower_bound_family_check(s, n, args.t)
        emit({
            "kind": "family",
            "s": s,
            "n": n,
            "t": args.t,
            "analytic": format_rational(analytic),
            "min_outliers": oracle,
            "pass": passed,
        })
        return EXIT_OK
    if not args.graph:
        raise ParameterError("oracle needs --graph, --star or --family")
    g, w, rho, defaults = load_instance(args)
    q = min_outliers_oracle(g, w, rho, args.t, args.balance)
    emit({"kind": "instance", "t": args.t, "balance": args.balance, "min_outliers": q, "defaults": defaults})
    return EXIT_OK


GENERATORS = {
    "path": (1, lambda p, seed: gen_path(p[0])),
    "cycle": (1, lambda p, seed: gen_cycle(p[0])),
    "complete": (1, lambda p, seed: gen_complete(p[0])),
    "grid": (1, lambda p, seed: gen_grid(p[0])),
    "star": (1, lambda p, seed: gen_star(p[0])),
    "biclique": (2, lambda p, seed: gen_subdivided_biclique(p[0], p[1])[0]),
    "random": (2, lambda p, seed: gen_random_bounded_degree(p[0], p[1], seed)),
}


def cmd_gen(args) -> int:
    arity, build = GENERATORS[args.family]
    if len(args.params) != arity:
        raise ParameterError(f"{args.family} takes {arity} integer parameter(s)")
    g = build(args.params, args.seed)

    weights = costs = None
    if args.lower_bound_costs:
        if args.family == "star":
            costs = star_lower_bound_costs(args.params[0])
        elif args.family == "biclique":
            weights, costs = biclique_lower_bound_assignments(gen_subdivided_biclique(*args.params)[1])
        else:
            raise ParameterError("--lower-bound-costs applies to star and biclique only")

    if not args.out:
        sys.stdout.write(save_graph(g))
        return EXIT_OK
    written = {"graph": f"{args.out}.graph"}
    _write(written["graph"], save_graph(g))
    if weights is not None:
        written["weights"] = f"{args.out}.weights"
        _write(written["weights"], save_assignment(weights))
    if costs is not None:
        written["costs"] = f"{args.out}.costs"
        _write(written["costs"], save_assignment(costs))
    emit({"kind": "generated", "family": args.family, "n": g.vertex_count, "m": g.edge_count, "files": written})
    return EXIT_OK


def cmd_verify(args) -> int:
    document = json.loads(_read(args.result))
    kind = document.get("kind", "vertex")
    g = load_graph(_read(args.graph))
    t = args.t if args.t is not None else document.get("t")
    if t is None:
        raise ParameterError("t missing from both the document and the flags")
    _check_t(t)

    if kind == "vertex":
        _, w, rho, _ = load_instance(args)
        separator, outliers = frozenset(document["separator"]), frozenset(document["outliers"])
        if any(not 0 <= v < g.vertex_count for v in separator) or not outliers <= separator:
            report = VerificationReport(False, "membership", "ids out of range or outliers outside the separator")
        else:
            result = make_result(g, w, rho, separator, outliers)
            report = verify_separator(g, w, rho, t, result, args.balance)
    elif kind == "distance":
        result = DistanceSeparatorResult(
            Z=frozenset(document["Z"]),
            C=frozenset(document["C"]),
            A=frozenset(document["A"]),
            B=frozenset(document["B"]),
            r=document["r"],
        )
        report = verify_distance_separator(g, result)
    elif kind == "edge":
        report = verify_edge_separator(g, document["Z"], [tuple(e) for e in document["F"]], t)
    else:
        raise ParameterError(f"unknown result kind: {kind}")

    emit({"kind": kind, "ok": report.ok, "clause": report.clause, "detail": report.detail})
    if not report:
        status("ERROR", f"verification failed: {report.clause}", force=True)
        return EXIT_INVALID
    return EXIT_OK


def cmd_sweep(args) -> int:
    g, w, rho, _ = load_instance(args)
    t_values = _int_list(args.t_values)
    a_values = _int_list(args.a_values)
    for t in t_values:
        _check_t(t)
    order = resolve_ordering(g, args.ordering, args.r)

    rows = []
    for t in t_values:
        for a in a_values:
            result = iterate_separator(g, w, rho, t, a, order)
            rows.append({
                "t": t,
                "a": a,
                "separator": len(result.separator),
                "outliers": len(result.outliers),
                "nonoutlier_cost": format_rational(result.nonoutlier_cost),
                "valid": verify_separator(g, w, rho, t, result).ok,
                "restarts": result.restarts,
            })
            status("OK", f"t={t} a={a} done")
    emit_frame(pd.DataFrame(rows), args.format)
    return EXIT_OK


# ----------------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------------

def _instance_flags(parser: argparse.ArgumentParser, graph_required: bool = True) -> None:
    parser.add_argument("--graph", required=graph_required, help="edge-list file (header \"n m\")")
    parser.add_argument("--weights", help="weight file w, one p/q per vertex (default: all 1)")
    parser.add_argument("--costs", help="cost file rho, one p/q per vertex (default: all 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Balanced separators with few outliers in sparse graphs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=(
            "Only gen takes --seed: the engine and oracles are deterministic.\n"
            "Environment: SEP_EXACT_CAPS raises the exhaustive caps, SEP_VERBOSE enables status lines."
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)

    separate = commands.add_parser("separate", help="compute and verify a separator")
    _instance_flags(separate)
    separate.add_argument("-t", type=int, required=True, help="cheapness factor t >= 1")
    separate.add_argument("-a", type=int, default=1, help="recursion depth (default 1)")
    separate.add_argument("-r", type=int, default=1, help="radius for distance separators and orderings")
    separate.add_argument("--kind", choices=["vertex", "distance", "edge"], default="vertex")
    separate.add_argument("--ordering", default="heuristic", help="heuristic | exact | file:PATH")
    separate.add_argument("--trace", help="write the engine trace to this file")
    separate.add_argument("--format", choices=["json", "csv"], default="json",
                          help="json (readable by verify) or a one-row csv")
    separate.set_defaults(handler=cmd_separate)

    analyze = commands.add_parser("analyze", help="weak coloring and admissibility per radius")
    analyze.add_argument("--graph", required=True)
    analyze.add_argument("--radii", default="1,2", help="comma-separated radii")
    analyze.add_argument("--ordering", default="heuristic", help="heuristic | exact | file:PATH")
    analyze.add_argument("--exact", action="store_true", help="add wcol_exact and nabla columns")
    analyze.add_argument("--format", choices=["csv", "json"], default="csv")
    analyze.set_defaults(handler=cmd_analyze)

    oracle = commands.add_parser("oracle", help="exhaustive minimum-outlier oracles")
    _instance_flags(oracle, graph_required=False)
    oracle.add_argument("-t", type=int, default=1)
    oracle.add_argument("--balance", choices=["weighted", "unweighted"], default="weighted")
    oracle.add_argument("--star", type=int, help="check the lower-bound star with this many leaves")
    oracle.add_argument("--family", type=int, nargs=2, metavar=("S", "N"), help="subdivided biclique bound")
    oracle.set_defaults(handler=cmd_oracle)

    gen = commands.add_parser("gen", help="write generated instances")
    gen.add_argument("family", choices=sorted(GENERATORS))
    gen.add_argument("params", type=int, nargs="+")
    gen.add_argument("--lower-bound-costs", "--paper-costs", dest="lower_bound_costs", action="store_true",
                     help="also write the lower-bound w/rho presets")
    gen.add_argument("--seed", type=int, default=0,
                     help="seed for the random family; every other command is deterministic")
    gen.add_argument("--out", help="file prefix; prints the graph to stdout when omitted")
    gen.set_defaults(handler=cmd_gen)

    verify = commands.add_parser("verify", help="re-check a result document")
    _instance_flags(verify)
    verify.add_argument("--result", required=True, help="JSON document from separate")
    verify.add_argument("-t", type=int, help="override the document's t")
    verify.add_argument("--balance", choices=["weighted", "unweighted"], default="weighted")
    verify.set_defaults(handler=cmd_verify)

    sweep = commands.add_parser("sweep", help="separate over several t and a values, CSV out")
    _instance_flags(sweep)
    sweep.add_argument("--t-values", default="1,2,4")
    sweep.add_argument("--a-values", default="1")
    sweep.add_argument("-r", type=int, default=1)
    sweep.add_argument("--ordering", default="heuristic", help="heuristic | exact | file:PATH")
    sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    sweep.set_defaults(handler=cmd_sweep)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except CapacityError as e:
        status("ERROR", str(e), force=True)
        return EXIT_CAPACITY
    except InvariantViolation as e:
        status("ERROR", f"internal invariant violated: {e}", force=True)
        return EXIT_INTERNAL
    except (ParameterError, DomainError) as e:
        status("ERROR", str(e), force=True)
        return EXIT_INPUT
    except (OSError, KeyError, json.JSONDecodeError) as e:
        status("ERROR", f"cannot read input: {e}", force=True)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
