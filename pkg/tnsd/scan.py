"""
Batch scans: a ScanTask names an instance source, filters and one action;
each instance becomes a ScanRecord and the records roll up into a Report
"""
import sys
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from tqdm import tqdm

from tnsd.colouring import SearchBudget, SearchStatus, find_tnsd, is_tnsd
from tnsd.configurations import find_any_reducible
from tnsd.discharging import apply_rules, degree_case_audit, fraction_text, verify_ghost_conditions
from tnsd.errors import DomainError, InternalInconsistencyError
from tnsd.generators import MAX_EXHAUSTIVE_ORDER, connected_graphs_up_to, random_sparse_graphs
from tnsd.graph_core import MAD_THRESHOLD, Graph, girth, max_average_degree, parse_graph6, parse_graph6_stream, serialize_graph6
from tnsd.prover import PALETTE_EXTRA, recursive_colour

MIN_K = 8


class ScanAction(str, Enum):
    SOLVE = "solve"
    DETECT = "detect"
    DISCHARGE = "discharge"
    PROVE = "prove"
    AUDIT = "audit"


class ScanTask(BaseModel):
    """One scan definition; exactly one source must be set"""

    exhaustive: Optional[int] = None
    random_count: Optional[int] = None
    seed: int = 0
    min_n: int = 5
    max_n: int = 60
    graph6_file: Optional[str] = None
    mad_below: Optional[Fraction] = None
    max_degree: Optional[int] = None
    min_girth: Optional[int] = None
    action: ScanAction = ScanAction.SOLVE
    # None selects k per instance
    k: Optional[int] = None
    # colours for the solve action; None means k+3, or Δ+3 when k is chosen per instance
    palette: Optional[int] = None
    threads: int = 1
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @field_validator("mad_below", mode="before")
    @classmethod
    def _rational(cls, value):
        if value is None or isinstance(value, Fraction):
            return value
        try:
            return Fraction(str(value).strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"mad bound must be a rational such as 14/3, got {value!r}")

    @model_validator(mode="after")
    def _one_source(self):
        sources = [self.exhaustive is not None, self.random_count is not None, self.graph6_file is not None]
        if sum(sources) != 1:
            raise ValueError("choose exactly one of exhaustive, random_count and graph6_file")
        if self.exhaustive is not None and not 1 <= self.exhaustive <= MAX_EXHAUSTIVE_ORDER:
            raise ValueError(f"exhaustive scans go up to {MAX_EXHAUSTIVE_ORDER} vertices")
        if self.palette is not None and self.palette < 1:
            raise ValueError("palette must be positive")
        if self.threads < 1:
            raise ValueError("threads must be positive")
        return self

    @classmethod
    def from_config_file(cls, path: str, overrides: Optional[dict] = None) -> "ScanTask":
        """KEY=value file read with dotenv; keys mirror the scan flags, flags win"""
        if not Path(path).exists():
            raise DomainError(f"scan config {path} not found")
        values = {key.lower(): value for key, value in dotenv_values(path).items() if value not in (None, "")}
        values.update({key: value for key, value in (overrides or {}).items() if value is not None})
        return cls(**values)

    @property
    def budget(self) -> SearchBudget:
        defaults = SearchBudget.from_settings()
        return SearchBudget(
            node_limit=self.node_limit if self.node_limit is not None else defaults.node_limit,
            time_limit=self.time_limit if self.time_limit is not None else defaults.time_limit,
        )


class ScanRecord(BaseModel):
    index: int
    graph6: str
    action: str
    outcome: str
    detail: dict = {}

    @property
    def failed(self) -> bool:
        return self.outcome in ("fail", "inconsistent")


class Report(BaseModel):
    records: List[ScanRecord] = []
    filtered: int = 0

    @property
    def counts(self) -> Dict[str, int]:
        counts = {"pass": 0, "fail": 0, "indeterminate": 0, "inconsistent": 0}
        for record in self.records:
            counts[record.outcome] = counts.get(record.outcome, 0) + 1
        return counts

    @property
    def ok(self) -> bool:
        return not any(record.failed for record in self.records)

    def summary(self) -> dict:
        return {"summary": self.counts, "instances": len(self.records), "filtered": self.filtered, "ok": self.ok}


# ------------------------------------------------------------ sources and filters

def instances(task: ScanTask) -> Iterator[Graph]:
    if task.exhaustive is not None:
        yield from connected_graphs_up_to(task.exhaustive)
    elif task.random_count is not None:
        yield from random_sparse_graphs(
            task.random_count,
            task.seed,
            min_n=task.min_n,
            max_n=task.max_n,
            max_degree=task.max_degree,
            mad_below=task.mad_below if task.mad_below is not None else MAD_THRESHOLD,
        )
    else:
        path = Path(task.graph6_file)
        if not path.exists():
            raise DomainError(f"graph6 file {path} not found")
        yield from parse_graph6_stream(path.read_bytes())


def passes_filters(g: Graph, task: ScanTask) -> bool:
    if task.max_degree is not None and g.max_degree > task.max_degree:
        return False
    if task.min_girth is not None and girth(g) < task.min_girth:
        return False
    if task.mad_below is not None and g.vertex_count and max_average_degree(g).value >= task.mad_below:
        return False
    return True


def instance_k(g: Graph, task: ScanTask) -> int:
    return task.k if task.k is not None else max(MIN_K, g.max_degree)


# ------------------------------------------------------------ actions

def _solve(g: Graph, task: ScanTask) -> Tuple[str, dict]:
    if task.palette is not None:
        palette = task.palette
    elif task.k is not None:
        palette = task.k + PALETTE_EXTRA
    else:
        palette = g.max_degree + PALETTE_EXTRA
    result = find_tnsd(g, palette, task.budget)
    detail = {"palette": palette, "status": result.status.value, "nodes": result.nodes}
    if result.status == SearchStatus.FOUND:
        detail["colouring"] = result.colouring.to_json(g.vertex_count)
        return "pass", detail
    if result.status == SearchStatus.INFEASIBLE:
        return "fail", detail
    return "indeterminate", detail


def _detect(g: Graph, task: ScanTask) -> Tuple[str, dict]:
    k = instance_k(g, task)
    occ = find_any_reducible(g, k)
    if occ is not None:
        return "pass", {"k": k, "occurrence": occ.to_record()}
    if not g.edge_count:
        return "pass", {"k": k, "occurrence": None, "edgeless": True}
    mad = max_average_degree(g).value
    ghost = verify_ghost_conditions(g, apply_rules(g))
    detail = {"k": k, "occurrence": None, "mad": fraction_text(mad), "ghost": ghost.conclusion}
    if mad < MAD_THRESHOLD or ghost.conclusion == "not-established":
        return "fail", detail
    return "pass", detail


def _discharge(g: Graph, task: ScanTask) -> Tuple[str, dict]:
    ledger = apply_rules(g)
    ghost = verify_ghost_conditions(g, ledger)
    detail = {"conserved": ledger.conserved, "ghost": ghost.conclusion, "transfers": len(ledger.transfers)}
    return ("pass" if ledger.conserved else "fail"), detail


def _audit(g: Graph, task: ScanTask) -> Tuple[str, dict]:
    k = instance_k(g, task)
    report = degree_case_audit(g, k)
    if report.blocked_by is not None:
        return "pass", {"k": k, "blocked_by": report.blocked_by}
    bad = [entry.vertex for entry in report.vertices if not entry.ok]
    return ("fail" if bad else "pass"), {"k": k, "failing_vertices": bad}


def _prove(g: Graph, task: ScanTask) -> Tuple[str, dict]:
    k = instance_k(g, task)
    result = recursive_colour(g, k, task.budget)
    detail = {"k": k, "status": result.status, "mad": fraction_text(result.mad), "steps": len(result.steps)}
    if result.hypothesis_met:
        colouring = result.colouring
        ok = is_tnsd(g, colouring) and colouring.colours_used <= k + PALETTE_EXTRA
        detail["colouring"] = colouring.to_json(g.vertex_count)
        return ("pass" if ok else "fail"), detail
    detail["fallback"] = result.fallback
    if result.fallback == SearchStatus.FOUND.value:
        return "pass", detail
    if result.fallback == SearchStatus.INFEASIBLE.value:
        return "fail", detail
    return "indeterminate", detail


_ACTIONS = {
    ScanAction.SOLVE: _solve,
    ScanAction.DETECT: _detect,
    ScanAction.DISCHARGE: _discharge,
    ScanAction.PROVE: _prove,
    ScanAction.AUDIT: _audit,
}


def run_instance(payload: Tuple[int, str, dict]) -> ScanRecord:
    """Worker entry point; takes plain data so it pickles across processes"""
    index, graph6, task_data = payload
    task = ScanTask(**task_data)
    g = parse_graph6(graph6)
    try:
        outcome, detail = _ACTIONS[task.action](g, task)
    except InternalInconsistencyError as e:
        outcome, detail = "inconsistent", {"error": str(e), "context": e.context}
    return ScanRecord(index=index, graph6=graph6, action=task.action.value, outcome=outcome, detail=detail)


def _needs_hypothesis(task: ScanTask) -> bool:
    return task.action in (ScanAction.DETECT, ScanAction.PROVE, ScanAction.AUDIT)


def run_scan(task: ScanTask, show_progress: bool = False) -> Report:
    payloads = []
    filtered = 0
    task_data = task.model_dump()
    for g in instances(task):
        if not passes_filters(g, task) or (_needs_hypothesis(task) and g.max_degree > instance_k(g, task)):
            filtered += 1
            continue
        payloads.append((len(payloads), serialize_graph6(g).decode("ascii"), task_data))

    progress = dict(total=len(payloads), desc=f"🔍 {task.action.value}", disable=not show_progress, file=sys.stderr)
    if task.threads == 1 or len(payloads) < 2:
        records = [run_instance(p) for p in tqdm(payloads, **progress)]
    else:
        with ProcessPoolExecutor(max_workers=task.threads) as pool:
            records = list(tqdm(pool.map(run_instance, payloads, chunksize=8), **progress))
    records.sort(key=lambda record: record.index)
    return Report(records=records, filtered=filtered)
