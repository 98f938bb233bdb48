"""
Command line for the tnsd workbench.

JSON lines go to standard output, human status lines to standard error.
Exit status: 0 all checks passed, 1 a check failed, 2 usage or input error,
3 internal inconsistency (the instance is archived first).
"""
import argparse
import hashlib
import json
import math
import sys
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError

from tnsd.certificates import builtin_certificates, spot_checks
from tnsd.colouring import SearchBudget, TotalColouring, find_tnsd, tnsd_index, verify_colouring
from tnsd.config import get_settings
from tnsd.configurations import SEARCH_ORDER, ConfigurationKind, detect, detect_all, find_any_reducible
from tnsd.discharging import apply_rules, degree_case_audit, fraction_text, verify_ghost_conditions
from tnsd.errors import InternalInconsistencyError, TnsdError
from tnsd.generators import named_graph
from tnsd.graph_core import (
    MAD_THRESHOLD,
    Graph,
    girth,
    max_average_degree,
    parse_edge_list,
    parse_graph6_stream,
    planar_girth_mad_bound,
    serialize_graph6,
)
from tnsd.polynomial import CnCertificate, check_certificate, parse_factors
from tnsd.prover import PALETTE_EXTRA, recursive_colour
from tnsd.scan import ScanAction, ScanTask, run_scan
from tnsd.sumsets import ListSystem, distinct_sums, exhaustive_lemma_check, lemma_lower_bound

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INCONSISTENT = 3


class UsageError(TnsdError):
    pass


# ------------------------------------------------------------ output

def _json_default(value):
    if isinstance(value, Fraction):
        return fraction_text(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if isinstance(value, BaseModel):
        return value.model_dump()
    if isinstance(value, TotalColouring):
        return value.to_json()
    if isinstance(value, bytes):
        return value.decode("ascii")
    raise TypeError(f"cannot serialise {type(value).__name__}")


def emit(record: dict) -> None:
    print(json.dumps(record, sort_keys=True, default=_json_default))


def say(line: str) -> None:
    print(line, file=sys.stderr)


def archive_instance(context: dict) -> Path:
    """Write an inconsistency context to TNSD_ARCHIVE_DIR; the name is a content hash"""
    text = json.dumps(context, sort_keys=True, default=_json_default)
    directory = Path(get_settings().archive_dir)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"inconsistent-{hashlib.sha1(text.encode()).hexdigest()[:12]}.json"
    path.write_text(text + "\n")
    return path


# ------------------------------------------------------------ input

def _read_source(source: str) -> bytes:
    if source == "-":
        return sys.stdin.buffer.read()
    path = Path(source)
    if not path.exists():
        raise UsageError(f"input file {source} not found")
    return path.read_bytes()


def load_graphs(args) -> List[Graph]:
    if getattr(args, "named", None):
        return [named_graph(args.named)]
    if not args.graph:
        raise UsageError("give a graph file, '-' for standard input, or --named")
    fmt = args.format
    if fmt is None:
        fmt = "graph6" if args.graph.endswith((".g6", ".graph6")) or args.graph == "-" else "edge-list"
    data = _read_source(args.graph)
    if fmt == "graph6":
        graphs = list(parse_graph6_stream(data))
        if not graphs:
            raise UsageError("no graph in the input")
        return graphs
    return [parse_edge_list(data)]


def _budget(args) -> SearchBudget:
    defaults = SearchBudget.from_settings()
    node_limit = args.node_limit if args.node_limit is not None else defaults.node_limit
    time_limit = args.time_limit if args.time_limit is not None else defaults.time_limit
    return SearchBudget(node_limit=node_limit or None, time_limit=time_limit or None)


def _k_for(g: Graph, k: Optional[int]) -> int:
    return k if k is not None else max(8, g.max_degree)


def _graph6(g: Graph) -> str:
    return serialize_graph6(g).decode("ascii")


# ------------------------------------------------------------ commands

def cmd_mad(args) -> int:
    for g in load_graphs(args):
        result = max_average_degree(g)
        record = result.to_record()
        record["graph6"] = _graph6(g)
        record["below_threshold"] = result.value < MAD_THRESHOLD
        emit(record)
        say(f"📐 mad = {record['value']}")
    return EXIT_OK


def cmd_girth(args) -> int:
    for g in load_graphs(args):
        value = girth(g)
        record = {"invariant": "girth", "graph6": _graph6(g), "value": "inf" if value == math.inf else value}
        if value != math.inf and value >= 3:
            record["planar_mad_bound"] = fraction_text(planar_girth_mad_bound(value))
        emit(record)
        say(f"⭕ girth = {record['value']}")
    return EXIT_OK


def cmd_solve(args) -> int:
    status = EXIT_OK
    budget = _budget(args)
    for g in load_graphs(args):
        if args.k is not None:
            result = find_tnsd(g, args.k, budget, fix_anchor=args.fix_anchor)
            emit({
                "graph6": _graph6(g),
                "k": args.k,
                "status": result.status.value,
                "nodes": result.nodes,
                "colouring": result.colouring.to_json(g.vertex_count) if result.colouring else None,
            })
            say(("✅" if result.found else "❌" if result.status.value == "infeasible" else "⚠️ ")
                + f" k={args.k}: {result.status.value} after {result.nodes} nodes")
            if not result.found:
                status = EXIT_FAILED
            continue
        index = tnsd_index(g, budget, fix_anchor=args.fix_anchor)
        emit({
            "graph6": _graph6(g),
            "index": index.value,
            "lower": index.lower,
            "upper": index.upper,
            "exact": index.exact,
            "attempts": [list(a) for a in index.attempts],
            "colouring": index.colouring.to_json(g.vertex_count) if index.colouring else None,
        })
        if index.exact:
            say(f"✅ χ″_Σ = {index.value} (Δ+3 = {g.max_degree + 3})")
        else:
            say(f"⚠️  χ″_Σ in [{index.lower}, {index.upper}]")
            status = EXIT_FAILED
    return status


def cmd_check(args) -> int:
    graphs = load_graphs(args)
    if len(graphs) != 1:
        raise UsageError("check takes exactly one graph")
    g = graphs[0]
    try:
        colouring = TotalColouring.from_json(json.loads(_read_source(args.colouring)))
    except json.JSONDecodeError as e:
        raise UsageError(f"colouring is not valid JSON: {e}")
    report = verify_colouring(g, colouring)
    emit({"graph6": _graph6(g), **report.model_dump()})
    say(("✅ tnsd colouring" if report.tnsd else f"❌ {len(report.violations)} violation(s)"))
    return EXIT_OK if report.tnsd else EXIT_FAILED


def cmd_detect(args) -> int:
    status = EXIT_OK
    for g in load_graphs(args):
        k = _k_for(g, args.k)
        occurrences = detect(g, k, ConfigurationKind(args.kind)) if args.kind else detect_all(g, k)
        for occ in occurrences:
            emit({"graph6": _graph6(g), **occ.to_record()})
        first = find_any_reducible(g, k)
        summary = {"graph6": _graph6(g), "k": k, "occurrences": len(occurrences),
                   "reducible": first.to_record() if first else None}
        if first is None and g.edge_count:
            mad = max_average_degree(g).value
            ghost = verify_ghost_conditions(g, apply_rules(g))
            summary.update(mad=fraction_text(mad), ghost=ghost.conclusion)
            if mad < MAD_THRESHOLD or ghost.conclusion == "not-established":
                status = EXIT_FAILED
                say(f"❌ no reducible configuration although mad = {fraction_text(mad)}")
        emit(summary)
        if first is not None:
            say(f"🧩 {first.kind.value} at vertex {first.anchor}")
    return status


def cmd_discharge(args) -> int:
    status = EXIT_OK
    for g in load_graphs(args):
        ledger = apply_rules(g)
        ghost = verify_ghost_conditions(g, ledger)
        emit({
            "graph6": _graph6(g),
            "initial": {v: fraction_text(x) for v, x in ledger.initial.items()},
            "final": {v: fraction_text(x) for v, x in ledger.final.items()},
            "transfers": [t.model_dump() for t in ledger.transfers],
            "conserved": ledger.conserved,
            "ghost": ghost.model_dump(),
        })
        if not ledger.conserved:
            status = EXIT_FAILED
        say(f"⚖️  total charge {fraction_text(ledger.total_final)}, ghost conclusion: {ghost.conclusion}")
        if args.audit:
            k = _k_for(g, args.k)
            audit = degree_case_audit(g, k)
            emit({"graph6": _graph6(g), "audit": audit.model_dump(), "ok": audit.ok})
            if audit.blocked_by is not None:
                say(f"🧩 audit not applicable: {audit.blocked_by['kind']} at {audit.blocked_by['anchor']}")
            elif audit.ok:
                say("✅ every vertex meets its case bound")
            else:
                say("❌ audit failed")
                status = EXIT_FAILED
    return status


def cmd_verify_cn(args) -> int:
    checks = []
    if args.factors:
        if args.target is None or args.expected is None:
            raise UsageError("--factors needs --target and --expected")
        factors = parse_factors(_read_source(args.factors).decode())
        target = tuple(int(x) for x in args.target.split())
        checks.append(check_certificate(CnCertificate(
            name=Path(args.factors).stem, factors=tuple(factors), target=target, expected_coefficient=args.expected,
        )))
    else:
        checks = [check_certificate(cert) for cert in builtin_certificates()]
    for check in checks:
        emit(check.model_dump())
        say(f"{'✅' if check.ok else '❌'} {check.name}: {check.computed} (expected {check.expected})")
    ok = all(check.ok for check in checks)
    if args.spot_checks:
        for spot in spot_checks(args.spot_checks, seed=args.seed):
            emit({"spot_check": True, **spot.model_dump()})
            ok = ok and spot.ok
        say(f"{'✅' if ok else '❌'} {args.spot_checks} spot check(s) per certificate")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_verify_lemma(args) -> int:
    if args.lists:
        try:
            system = ListSystem(lists=json.loads(args.lists))
        except (json.JSONDecodeError, ValidationError) as e:
            raise UsageError(f"bad --lists: {e}")
        achieved = len(distinct_sums(system))
        bound = lemma_lower_bound(system)
        emit({"lists": [list(x) for x in system.lists], "distinct_sums": achieved, "bound": bound,
              "ok": achieved >= bound, "tight": achieved == bound})
        say(f"{'✅' if achieved >= bound else '❌'} {achieved} distinct sums, bound {bound}")
        return EXIT_OK if achieved >= bound else EXIT_FAILED
    report = exhaustive_lemma_check(args.exhaustive, range(1, args.max_value + 1))
    emit(report.model_dump())
    say(f"{'✅' if report.ok else '❌'} {report.systems} systems, {len(report.violations)} violation(s), "
        f"{report.tight} tight")
    return EXIT_OK if report.ok else EXIT_FAILED


def cmd_prove(args) -> int:
    status = EXIT_OK
    budget = _budget(args)
    for g in load_graphs(args):
        k = _k_for(g, args.k)
        result = recursive_colour(g, k, budget, fallback=not args.no_fallback)
        emit({
            "graph6": _graph6(g),
            "status": result.status,
            "hypothesis_met": result.hypothesis_met,
            "mad": fraction_text(result.mad),
            "k": k,
            "palette": k + PALETTE_EXTRA,
            "fallback": result.fallback,
            "colouring": result.colouring.to_json(g.vertex_count) if result.colouring else None,
            "steps": [step.model_dump() for step in result.steps],
        })
        if result.hypothesis_met:
            say(f"🎨 coloured with {result.colouring.colours_used} colours in {len(result.steps)} step(s)")
        elif result.colouring is not None:
            say(f"⚠️  mad = {fraction_text(result.mad)} >= 14/3; exact solver found a colouring")
        else:
            say(f"⚠️  mad = {fraction_text(result.mad)} >= 14/3; hypothesis not met ({result.fallback})")
            status = EXIT_FAILED
    return status


def cmd_scan(args) -> int:
    overrides = {
        "exhaustive": args.exhaustive,
        "random_count": args.random,
        "seed": args.seed,
        "min_n": args.min_n,
        "max_n": args.max_n,
        "graph6_file": args.graph6_file,
        "mad_below": args.mad_below,
        "max_degree": args.max_degree,
        "min_girth": args.min_girth,
        "action": args.action,
        "k": args.k,
        "palette": args.palette,
        "threads": args.threads,
        "node_limit": args.node_limit,
        "time_limit": args.time_limit,
    }
    try:
        if args.config:
            task = ScanTask.from_config_file(args.config, overrides)
        else:
            task = ScanTask(**{key: value for key, value in overrides.items() if value is not None})
    except ValidationError as e:
        raise UsageError(f"bad scan definition: {e}")
    if args.k_auto:
        task = task.model_copy(update={"k": None})
    if "threads" not in task.model_fields_set:
        task = task.model_copy(update={"threads": get_settings().threads})

    report = run_scan(task, show_progress=get_settings().verbose and sys.stderr.isatty())
    inconsistent = False
    for record in report.records:
        emit(record.model_dump())
        if record.outcome == "inconsistent":
            inconsistent = True
            path = archive_instance({"graph6": record.graph6, **record.detail})
            say(f"❌ internal inconsistency on {record.graph6}, archived to {path}")
    emit(report.summary())
    counts = report.counts
    say(f"🔍 {len(report.records)} instance(s), {report.filtered} filtered: "
        f"{counts['pass']} pass, {counts['fail']} fail, {counts['indeterminate']} indeterminate")
    if report.ok and task.action == ScanAction.SOLVE and task.k is None:
        say("✅ all graphs satisfy χ″_Σ ≤ Δ+3")
    elif report.ok:
        say("✅ no failures")
    if inconsistent:
        return EXIT_INCONSISTENT
    return EXIT_OK if report.ok else EXIT_FAILED


# ------------------------------------------------------------ parser

def _add_graph_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("graph", nargs="?", help="graph file (.g6 for graph6, otherwise edge list) or - for stdin")
    p.add_argument("--format", choices=["graph6", "edge-list"], default=None)
    p.add_argument("--named", help="a named graph instead of a file, e.g. petersen, K4, C5, K1,8")


def _add_budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tnsd", description="Total neighbour-sum-distinguishing colouring workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mad", help="exact maximum average degree")
    _add_graph_input(p)
    p.set_defaults(handler=cmd_mad)

    p = sub.add_parser("girth", help="girth and the planar mad bound it implies")
    _add_graph_input(p)
    p.set_defaults(handler=cmd_girth)

    p = sub.add_parser("solve", help="tnsd colouring with k colours, or the index when --k is omitted")
    _add_graph_input(p)
    _add_budget(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--fix-anchor", action="store_true", help="fix one vertex of maximum degree to colour 1")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("check", help="verify a colouring JSON against a graph")
    _add_graph_input(p)
    p.add_argument("--colouring", required=True)
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("detect", help="reducible configurations")
    _add_graph_input(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--kind", choices=[kind.value for kind in SEARCH_ORDER] + [ConfigurationKind.COROLLARY.value])
    p.set_defaults(handler=cmd_detect)

    p = sub.add_parser("discharge", help="discharging ledger and ghost-vertex conditions")
    _add_graph_input(p)
    p.add_argument("--audit", action="store_true")
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(handler=cmd_discharge)

    p = sub.add_parser("verify-cn", help="Combinatorial Nullstellensatz certificates")
    p.add_argument("--factors", help="factor file for a custom certificate")
    p.add_argument("--target", help='target exponents, e.g. "4 3 3"')
    p.add_argument("--expected", type=int)
    p.add_argument("--spot-checks", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_verify_cn)

    p = sub.add_parser("verify-lemma", help="distinct-sum lower bound")
    p.add_argument("--lists", help="JSON list of lists")
    p.add_argument("--exhaustive", type=int, default=3, metavar="T")
    p.add_argument("--max-value", type=int, default=6)
    p.set_defaults(handler=cmd_verify_lemma)

    p = sub.add_parser("prove", help="constructive (k+3)-colouring by reduction")
    _add_graph_input(p)
    _add_budget(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--no-fallback", action="store_true", help="do not run the exact solver when mad >= 14/3")
    p.set_defaults(handler=cmd_prove)

    p = sub.add_parser("scan", help="batch runs over generated or stored graphs")
    _add_budget(p)
    p.add_argument("--config", help="KEY=value scan definition")
    p.add_argument("--exhaustive", type=int, metavar="N")
    p.add_argument("--random", type=int, metavar="COUNT")
    p.add_argument("--seed", type=int)
    p.add_argument("--min-n", type=int)
    p.add_argument("--max-n", type=int)
    p.add_argument("--graph6-file")
    p.add_argument("--mad-below", help="exact rational, e.g. 14/3")
    p.add_argument("--max-degree", type=int)
    p.add_argument("--min-girth", type=int)
    p.add_argument("--action", choices=[action.value for action in ScanAction])
    p.add_argument("--k", type=int)
    p.add_argument("--k-auto", action="store_true", help="choose k per instance")
    p.add_argument("--palette", type=int, help="colours for --action solve (default k+3)")
    p.add_argument("--threads", type=int)
    p.set_defaults(handler=cmd_scan)
    return parser


def main(argv: Optional[Iterable[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    try:
        return args.handler(args)
    except InternalInconsistencyError as e:
        path = archive_instance({"command": args.command, "error": str(e), "context": e.context})
        say(f"❌ internal inconsistency: {e}")
        say(f"📁 instance archived to {path}")
        return EXIT_INCONSISTENT
    except (TnsdError, ValidationError, ValueError, OSError) as e:
        say(f"❌ {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
