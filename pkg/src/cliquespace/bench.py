"""Solver campaign orchestration and the composite performance measure.

For one instance, each solver's score is

    y(a) = (t_a / max_b t_b) / (s_a / max_b s_b)

with t the wall time and s the clique size; lower is better.  The solver
that is simultaneously slowest and best scores exactly 1.  Wall times
are clamped below at 1 ms before scoring because near-zero measurements
are clock noise, and crashed runs receive y = +inf while staying out of
the max-normalization denominators.
"""

from __future__ import annotations

import csv
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .artifacts import consume_meta_line, write_meta
from .errors import ScoringError
from .graph import Graph, parse_path

__all__ = [
    "MIN_WALL_SECONDS",
    "DEFAULT_GOOD_TOLERANCE",
    "RunRecord",
    "PerformanceMatrix",
    "score_instance",
    "label_good",
    "run_campaign",
    "write_journal",
    "read_journal",
]

MIN_WALL_SECONDS = 0.001
DEFAULT_GOOD_TOLERANCE = 0.05

JOURNAL_COLUMNS = (
    "instance_id",
    "solver_id",
    "clique_size",
    "wall_seconds",
    "proven_optimal",
    "status",
)


@dataclass(frozen=True)
class RunRecord:
    """One solver execution on one instance, immutable once journaled."""

    instance_id: str
    solver_id: str
    clique_size: int
    wall_seconds: float
    proven_optimal: bool
    status: str = "ok"  # "ok" or "failed"


def score_instance(records: list[RunRecord]) -> dict[str, float]:
    """Composite time/quality score per solver for one instance's records.

    Failed records score +inf and do not enter the max-time or max-size
    denominators.  Raises on empty input, mixed instances, duplicate
    solvers, negative times, or an ok record with a zero clique.
    """
    if not records:
        raise ScoringError("cannot score an instance with no records")
    instance_ids = {r.instance_id for r in records}
    if len(instance_ids) != 1:
        raise ScoringError(f"records mix instances: {sorted(instance_ids)}")
    solver_ids = [r.solver_id for r in records]
    if len(set(solver_ids)) != len(solver_ids):
        raise ScoringError("duplicate solver records for one instance")
    for r in records:
        if r.wall_seconds < 0:
            raise ScoringError(f"negative wall time on {r.solver_id}")
        if r.status == "ok" and r.clique_size < 1:
            raise ScoringError(f"zero clique size on {r.solver_id}")

    ok = [r for r in records if r.status == "ok"]
    if not ok:
        return {r.solver_id: math.inf for r in records}
    max_t = max(max(r.wall_seconds, MIN_WALL_SECONDS) for r in ok)
    max_s = max(r.clique_size for r in ok)
    scores: dict[str, float] = {}
    for r in records:
        if r.status != "ok":
            scores[r.solver_id] = math.inf
        else:
            t = max(r.wall_seconds, MIN_WALL_SECONDS)
            scores[r.solver_id] = (t / max_t) / (r.clique_size / max_s)
    return scores


@dataclass(frozen=True, eq=False)
class PerformanceMatrix:
    """Per-(instance, solver) scores, labels, and per-instance winners."""

    instance_ids: tuple[str, ...]
    solver_ids: tuple[str, ...]  # lexicographic
    y: np.ndarray  # (instances, solvers); +inf marks failed/missing runs
    good: np.ndarray  # boolean, same shape
    best_solver: tuple[str, ...]
    tolerance: float

    def __eq__(self, other) -> bool:
        if not isinstance(other, PerformanceMatrix):
            return NotImplemented
        return (
            self.instance_ids == other.instance_ids
            and self.solver_ids == other.solver_ids
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.good, other.good)
            and self.best_solver == other.best_solver
            and self.tolerance == other.tolerance
        )

    def y_of(self, instance_id: str, solver_id: str) -> float:
        i = self.instance_ids.index(instance_id)
        j = self.solver_ids.index(solver_id)
        return float(self.y[i, j])

    @classmethod
    def from_records(
        cls, records: list[RunRecord], tolerance: float = DEFAULT_GOOD_TOLERANCE
    ) -> "PerformanceMatrix":
        """Build the full matrix; (instance, solver) pairs never run score +inf."""
        if not records:
            raise ScoringError("no records to build a performance matrix from")
        seen: dict[tuple[str, str], RunRecord] = {}
        for r in records:
            seen.setdefault((r.instance_id, r.solver_id), r)  # first write wins
        instance_ids = tuple(sorted({r.instance_id for r in records}))
        solver_ids = tuple(sorted({r.solver_id for r in records}))
        y = np.full((len(instance_ids), len(solver_ids)), math.inf)
        for i, inst in enumerate(instance_ids):
            inst_records = [
                seen[(inst, s)] for s in solver_ids if (inst, s) in seen
            ]
            scores = score_instance(inst_records)
            for j, s in enumerate(solver_ids):
                if s in scores:
                    y[i, j] = scores[s]
        good = _good_labels(y, tolerance)
        best = tuple(solver_ids[int(np.argmin(y[i]))] for i in range(len(instance_ids)))
        return cls(instance_ids, solver_ids, y, good, best, tolerance)


def _good_labels(y: np.ndarray, tolerance: float) -> np.ndarray:
    finite = np.isfinite(y)
    ymin = np.where(finite.any(axis=1), np.min(np.where(finite, y, np.inf), axis=1), np.inf)
    return finite & (y <= (1.0 + tolerance) * ymin[:, None])


def label_good(
    matrix: PerformanceMatrix, tolerance: float = DEFAULT_GOOD_TOLERANCE
) -> PerformanceMatrix:
    """Recompute binary good/bad labels at a new relative tolerance."""
    if tolerance < 0:
        raise ScoringError("tolerance must be non-negative")
    return replace(matrix, good=_good_labels(matrix.y, tolerance), tolerance=tolerance)


def write_journal(
    path: str | Path, records: list[RunRecord], meta: dict[str, str] | None = None
) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        write_meta(fh, meta)
        writer = csv.writer(fh)
        writer.writerow(JOURNAL_COLUMNS)
        for r in records:
            writer.writerow(_journal_row(r))


def _journal_row(r: RunRecord) -> list[str]:
    return [
        r.instance_id,
        r.solver_id,
        str(r.clique_size),
        repr(float(r.wall_seconds)),
        "true" if r.proven_optimal else "false",
        r.status,
    ]


def read_journal(path: str | Path) -> tuple[list[RunRecord], dict[str, str]]:
    path = Path(path)
    meta: dict[str, str] = {}
    records: list[RunRecord] = []
    with path.open(newline="") as fh:
        plain = (line for line in fh if not consume_meta_line(line, meta))
        reader = csv.reader(plain)
        header = next(reader, None)
        if header is None or tuple(header) != JOURNAL_COLUMNS:
            raise ScoringError(f"{path}: unexpected journal header {header}")
        for row in reader:
            records.append(
                RunRecord(
                    instance_id=row[0],
                    solver_id=row[1],
                    clique_size=int(row[2]),
                    wall_seconds=float(row[3]),
                    proven_optimal=row[4] == "true",
                    status=row[5],
                )
            )
    return records, meta


def _load_instance(source) -> Graph:
    if isinstance(source, Graph):
        return source
    return parse_path(source).graph


def run_campaign(
    corpus: list[tuple[str, object]],
    portfolio: list[tuple[str, object]],
    budget: float,
    parallelism: int = 1,
    journal: str | Path | None = None,
    tolerance: float = DEFAULT_GOOD_TOLERANCE,
    meta: dict[str, str] | None = None,
    log=None,
) -> tuple[PerformanceMatrix, list[RunRecord]]:
    """Run every (instance, solver) pair, resumable through the CSV journal.

    ``corpus`` holds (instance_id, Graph-or-path) pairs; unloadable
    instances are skipped with a log line.  ``portfolio`` holds
    (solver_id, callable(graph, budget) -> SolveResult) pairs.  Pairs
    already present in the journal are not re-executed.  A solver
    exception becomes a failed record, not a crash of the campaign.
    """
    if not corpus:
        raise ScoringError("corpus is empty")
    if budget <= 0:
        raise ScoringError("budget must be positive")
    solver_ids = [s for s, _ in portfolio]
    if len(set(solver_ids)) != len(solver_ids):
        raise ScoringError("duplicate solver ids in portfolio")
    emit = log or (lambda msg: None)

    done: dict[tuple[str, str], RunRecord] = {}
    journal_path = Path(journal) if journal is not None else None
    if journal_path is not None and journal_path.exists():
        for r in read_journal(journal_path)[0]:
            done.setdefault((r.instance_id, r.solver_id), r)
    elif journal_path is not None:
        write_journal(journal_path, [], meta)

    graphs: dict[str, Graph] = {}
    for instance_id, source in corpus:
        try:
            graphs[instance_id] = _load_instance(source)
        except Exception as exc:
            emit(f"skipping instance {instance_id}: {exc}")

    pending = [
        (instance_id, solver_id, fn)
        for instance_id in graphs
        for solver_id, fn in portfolio
        if (instance_id, solver_id) not in done
    ]

    journal_lock = threading.Lock()

    def execute(task) -> RunRecord:
        instance_id, solver_id, fn = task
        started = time.perf_counter()
        try:
            result = fn(graphs[instance_id], budget)
            record = RunRecord(
                instance_id=instance_id,
                solver_id=solver_id,
                clique_size=result.clique_size,
                wall_seconds=result.wall_seconds,
                proven_optimal=result.proven_optimal,
            )
        except Exception as exc:
            emit(f"solver {solver_id} failed on {instance_id}: {exc}")
            record = RunRecord(
                instance_id=instance_id,
                solver_id=solver_id,
                clique_size=0,
                wall_seconds=time.perf_counter() - started,
                proven_optimal=False,
                status="failed",
            )
        if journal_path is not None:
            with journal_lock:
                with journal_path.open("a", newline="") as fh:
                    csv.writer(fh).writerow(_journal_row(record))
        return record

    if parallelism > 1 and len(pending) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            new_records = list(pool.map(execute, pending))
    else:
        new_records = [execute(task) for task in pending]

    records = list(done.values()) + new_records
    matrix = PerformanceMatrix.from_records(records, tolerance)
    return matrix, records
