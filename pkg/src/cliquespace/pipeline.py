"""Config-driven pipeline: stage orchestration, artifacts, and caching.

A campaign is described by an INI config (corpus globs, portfolio,
budgets, thresholds, output directory, seed).  Each stage reads its
predecessors' artifacts from the output directory and writes its own.
Every artifact embeds three metadata keys: the tool version, a hash of
the semantic config fields, and a hash of the stage's input files.  A
stage whose outputs already carry the current hashes is skipped, which
makes re-runs of an unchanged campaign close to free; the benchmarking
stage additionally resumes from its journal, so even a forced re-run
never repeats a completed solver execution.
"""

from __future__ import annotations

import csv
import glob
import hashlib
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .artifacts import consume_meta_line, write_meta
from .bench import PerformanceMatrix, read_journal, run_campaign
from .errors import (
    CampaignFailureError,
    CliquespaceError,
    ConfigError,
    PipelineError,
)
from .features import (
    FEATURE_NAMES,
    compute_features,
    read_features_csv,
    write_features_csv,
)
from .graph import parse_path
from .isa import (
    apply_normalization,
    cloister_boundary,
    fit_normalization,
    fit_projection,
    footprint,
    polygon_area,
    project_many,
    read_projection_model,
    sifted_select,
    write_projection_model,
)
from .selector import (
    evaluate_topk,
    read_selector_model,
    train,
    write_selector_model,
)
from .solvers import BUILTIN_SOLVER_IDS, make_builtin
from .solvers.external import run_external

TOOL_VERSION = f"cliquespace/{__version__}"

ARTIFACTS = {
    "ingest": ("corpus.csv",),
    "features": ("features.csv",),
    "bench": ("runs.csv",),
    "isa-fit": ("sifted.csv", "projection.isa"),
    "isa-project": ("projections.csv",),
    "isa-footprint": ("footprints.csv",),
    "train": ("selector.isa",),
    "report": ("report.csv", "scatter.svg"),
}
STAGE_ORDER = tuple(ARTIFACTS)

_MANIFEST_COLUMNS = (
    "instance_id",
    "path",
    "format",
    "nodes",
    "edges",
    "connected",
    "usable",
    "note",
)


@dataclass(frozen=True)
class PipelineConfig:
    corpus: tuple[str, ...]  # path globs, resolved against base_dir
    portfolio: tuple[tuple[str, str], ...]  # (solver_id, "builtin" | "external <cmd>")
    solver_budget: float = 1800.0
    feature_budget: float = 120.0
    correlation_threshold: float = 0.8
    good_tolerance: float = 0.05
    selector_input: str = "z"
    seed: int = 0
    output_dir: Path = Path("out")
    base_dir: Path = Path(".")
    jobs: int = 1

    def validate(self) -> None:
        if not self.corpus:
            raise ConfigError("corpus.paths: at least one glob is required")
        if not self.portfolio:
            raise ConfigError("portfolio: at least one solver is required")
        seen = set()
        for solver_id, spec in self.portfolio:
            if solver_id in seen:
                raise ConfigError(f"portfolio.{solver_id}: duplicate solver id")
            seen.add(solver_id)
            if spec == "builtin":
                if solver_id not in BUILTIN_SOLVER_IDS:
                    raise ConfigError(
                        f"portfolio.{solver_id}: not a builtin "
                        f"(choose from {', '.join(BUILTIN_SOLVER_IDS)})"
                    )
            elif spec.startswith("external "):
                if "{instance}" not in spec:
                    raise ConfigError(
                        f"portfolio.{solver_id}: external command needs "
                        "an {instance} placeholder"
                    )
            else:
                raise ConfigError(
                    f"portfolio.{solver_id}: value must be 'builtin' or 'external <command>'"
                )
        if self.solver_budget <= 0:
            raise ConfigError("run.solver_budget: must be positive")
        if self.feature_budget <= 0:
            raise ConfigError("run.feature_budget: must be positive")
        if not 0.0 <= self.correlation_threshold < 1.0:
            raise ConfigError("thresholds.correlation: must lie in [0, 1)")
        if self.good_tolerance < 0.0:
            raise ConfigError("thresholds.good_tolerance: must be non-negative")
        if self.selector_input not in ("z", "features"):
            raise ConfigError("selector.input: must be 'z' or 'features'")
        if self.jobs < 1:
            raise ConfigError("run.jobs: must be at least 1")

    def artifact(self, name: str) -> Path:
        return self.output_dir / name


def _get_float(cfg, section: str, option: str, fallback: float) -> float:
    if not cfg.has_option(section, option):
        return fallback
    raw = cfg.get(section, option)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{section}.{option}: {raw!r} is not a number") from None


def load_config(path: str | Path) -> PipelineConfig:
    """Parse and validate an INI campaign config."""
    import configparser

    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    cfg = configparser.ConfigParser()
    cfg.optionxform = str  # solver ids are case-sensitive
    try:
        cfg.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    corpus = tuple(cfg.get("corpus", "paths", fallback="").split())
    portfolio = tuple(cfg.items("portfolio")) if cfg.has_section("portfolio") else ()
    try:
        seed = cfg.getint("run", "seed", fallback=0)
    except ValueError:
        raise ConfigError("run.seed: must be an integer") from None
    selector_input = cfg.get("selector", "input", fallback="z")
    base_dir = path.parent
    output_dir = Path(cfg.get("run", "output_dir", fallback="out"))
    if not output_dir.is_absolute():
        output_dir = base_dir / output_dir
    config = PipelineConfig(
        corpus=corpus,
        portfolio=portfolio,
        solver_budget=_get_float(cfg, "run", "solver_budget", 1800.0),
        feature_budget=_get_float(cfg, "run", "feature_budget", 120.0),
        correlation_threshold=_get_float(cfg, "thresholds", "correlation", 0.8),
        good_tolerance=_get_float(cfg, "thresholds", "good_tolerance", 0.05),
        selector_input=selector_input,
        seed=seed,
        output_dir=output_dir,
        base_dir=base_dir,
    )
    config.validate()
    return config


# ------------------------------------------------------------ hash plumbing


def _sha12(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:12]


def config_hash(config: PipelineConfig) -> str:
    """Hash of the semantic fields only.

    The output directory and the parallelism level deliberately do not
    contribute: moving the artifacts or changing --jobs must not
    invalidate completed work.
    """
    parts = [
        "corpus=" + "|".join(config.corpus),
        "portfolio=" + "|".join(f"{sid}:{spec}" for sid, spec in config.portfolio),
        f"solver_budget={config.solver_budget!r}",
        f"feature_budget={config.feature_budget!r}",
        f"correlation_threshold={config.correlation_threshold!r}",
        f"good_tolerance={config.good_tolerance!r}",
        f"selector_input={config.selector_input}",
        f"seed={config.seed}",
    ]
    return _sha12("\n".join(parts).encode())


def _files_hash(paths) -> str:
    h = hashlib.sha256()
    for p in sorted(paths, key=lambda p: p.name):
        h.update(p.name.encode())
        h.update(b"\0")
        h.update(p.read_bytes())
    return h.hexdigest()[:12]


def artifact_meta(config: PipelineConfig, inputs_hash: str) -> dict[str, str]:
    return {
        "tool": TOOL_VERSION,
        "config": config_hash(config),
        "inputs": inputs_hash,
    }


def read_artifact_meta(path: Path) -> dict[str, str]:
    """Extract the embedded '# key=value' (or SVG comment) metadata block."""
    meta: dict[str, str] = {}
    text = Path(path).read_text(errors="replace")
    if path.suffix == ".svg":
        for m in re.finditer(r"<!--\s*(\S+)=(\S+)\s*-->", text):
            meta[m.group(1)] = m.group(2)
        return meta
    for line in text.splitlines():
        if not consume_meta_line(line, meta):
            break
    return meta


# -------------------------------------------------------------- corpus I/O


def resolve_corpus(config: PipelineConfig) -> list[Path]:
    matches: set[Path] = set()
    for pattern in config.corpus:
        if not Path(pattern).is_absolute():
            pattern = str(config.base_dir / pattern)
        matches.update(
            Path(m) for m in glob.glob(pattern, recursive=True) if Path(m).is_file()
        )
    return sorted(matches)


def _write_manifest(path: Path, rows: list[dict], meta: dict) -> None:
    with path.open("w", newline="") as fh:
        write_meta(fh, meta)
        writer = csv.DictWriter(fh, fieldnames=_MANIFEST_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def read_manifest(path: Path) -> tuple[list[dict], dict]:
    meta: dict[str, str] = {}
    rows: list[dict] = []
    with path.open(newline="") as fh:
        plain = (line for line in fh if not consume_meta_line(line, meta))
        for row in csv.DictReader(plain):
            row["usable"] = row["usable"] == "true"
            row["connected"] = row["connected"] == "true"
            rows.append(row)
    return rows, meta


def _usable_instances(config: PipelineConfig) -> list[tuple[str, Path]]:
    rows, _ = read_manifest(config.artifact("corpus.csv"))
    return [(r["instance_id"], Path(r["path"])) for r in rows if r["usable"]]


def _write_rows_csv(path: Path, header, rows, meta: dict) -> None:
    with path.open("w", newline="") as fh:
        write_meta(fh, meta)
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def read_projections(path: Path) -> tuple[list[str], np.ndarray, list[str], dict]:
    """Returns (instance ids, N x 2 coordinates, best solver ids, meta)."""
    meta: dict[str, str] = {}
    ids: list[str] = []
    coords: list[list[float]] = []
    best: list[str] = []
    with path.open(newline="") as fh:
        plain = (line for line in fh if not consume_meta_line(line, meta))
        reader = csv.reader(plain)
        header = next(reader, None)
        if header != ["instance_id", "z1", "z2", "best_solver"]:
            raise PipelineError(f"{path}: unexpected projections header {header}")
        for row in reader:
            ids.append(row[0])
            coords.append([float(row[1]), float(row[2])])
            best.append(row[3])
    return ids, np.array(coords).reshape(len(ids), 2), best, meta


# ------------------------------------------------------------------ stages


def _stage_ingest(config: PipelineConfig, log) -> None:
    files = resolve_corpus(config)
    if not files:
        raise PipelineError(
            "corpus is empty: no files match " + ", ".join(config.corpus)
        )
    seen: dict[str, Path] = {}
    rows: list[dict] = []
    usable = 0
    for p in files:
        if p.stem in seen:
            raise PipelineError(
                f"duplicate instance id {p.stem!r}: {seen[p.stem]} and {p}"
            )
        seen[p.stem] = p
        row = {
            "instance_id": p.stem,
            "path": str(p.resolve()),
            "format": "",
            "nodes": 0,
            "edges": 0,
            "connected": "false",
            "usable": "false",
            "note": "",
        }
        try:
            report = parse_path(p)
        except CliquespaceError as exc:
            row["note"] = str(exc)
            rows.append(row)
            log(f"ingest: skipping {p.name}: {exc}")
            continue
        g = report.graph
        row.update(
            format=report.format.name.lower(),
            nodes=g.node_count,
            edges=g.edge_count,
            connected="true" if report.connected else "false",
        )
        if g.node_count < 2:
            row["note"] = "fewer than 2 nodes"
        elif not report.connected:
            row["note"] = "disconnected"
        else:
            row["usable"] = "true"
            usable += 1
        rows.append(row)
    if not usable:
        raise PipelineError("no usable instance in the corpus (connected, >= 2 nodes)")
    meta = artifact_meta(config, _files_hash(files))
    _write_manifest(config.artifact("corpus.csv"), rows, meta)
    log(f"ingest: {usable}/{len(rows)} usable instances")


def _stage_features(config: PipelineConfig, log) -> None:
    instances = _usable_instances(config)

    def one(item):
        instance_id, path = item
        try:
            return instance_id, compute_features(
                parse_path(path).graph, timeout=config.feature_budget
            )
        except CliquespaceError as exc:
            log(f"features: skipping {instance_id}: {exc}")
            return instance_id, None

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            computed = list(pool.map(one, instances))
    else:
        computed = [one(item) for item in instances]
    rows = [(iid, fv) for iid, fv in computed if fv is not None]
    if not rows:
        raise PipelineError("feature extraction produced no usable instance")
    meta = artifact_meta(config, _files_hash([config.artifact("corpus.csv")]))
    write_features_csv(config.artifact("features.csv"), rows, meta)
    log(f"features: {len(rows)}/{len(instances)} instances")


def _portfolio_callables(config: PipelineConfig):
    portfolio = []
    for solver_id, spec in config.portfolio:
        if spec == "builtin":
            portfolio.append((solver_id, make_builtin(solver_id, seed=config.seed)))
        else:
            template = spec[len("external ") :].strip()

            def runner(g, budget, template=template, solver_id=solver_id):
                return run_external(template, g, budget, solver_id=solver_id)

            portfolio.append((solver_id, runner))
    return portfolio


def _stage_bench(config: PipelineConfig, log) -> None:
    instances = _usable_instances(config)
    journal = config.artifact("runs.csv")
    meta = artifact_meta(config, _files_hash([config.artifact("corpus.csv")]))
    if journal.exists() and not _meta_matches(read_artifact_meta(journal), meta):
        log("bench: configuration changed; discarding stale journal")
        journal.unlink()
    matrix, records = run_campaign(
        corpus=instances,
        portfolio=_portfolio_callables(config),
        budget=config.solver_budget,
        parallelism=config.jobs,
        journal=journal,
        tolerance=config.good_tolerance,
        meta=meta,
        log=log,
    )
    if all(r.status == "failed" for r in records):
        raise CampaignFailureError(
            "every solver run failed; check budgets and solver commands"
        )
    log(f"bench: {len(records)} runs over {len(matrix.instance_ids)} instances")


def _bench_complete(config: PipelineConfig) -> bool:
    try:
        instances = _usable_instances(config)
        records, _ = read_journal(config.artifact("runs.csv"))
    except Exception:
        return False
    have = {(r.instance_id, r.solver_id) for r in records}
    return all(
        (iid, sid) in have
        for iid, _ in instances
        for sid, _ in config.portfolio
    )


def _aligned_performance(config: PipelineConfig, ids: list[str]) -> PerformanceMatrix:
    records, _ = read_journal(config.artifact("runs.csv"))
    matrix = PerformanceMatrix.from_records(records, config.good_tolerance)
    missing = [iid for iid in ids if iid not in matrix.instance_ids]
    if missing:
        raise PipelineError(f"runs.csv lacks instances {missing[:3]}")
    index = [matrix.instance_ids.index(iid) for iid in ids]
    return replace(
        matrix,
        instance_ids=tuple(ids),
        y=matrix.y[index],
        good=matrix.good[index],
        best_solver=tuple(matrix.best_solver[i] for i in index),
    )


def _stage_isa_fit(config: PipelineConfig, log) -> None:
    ids, X, _ = read_features_csv(config.artifact("features.csv"))
    records, _ = read_journal(config.artifact("runs.csv"))
    matrix = PerformanceMatrix.from_records(records, config.good_tolerance)
    common = sorted(set(ids) & set(matrix.instance_ids))
    if len(common) < 3:
        raise PipelineError(
            "projection needs at least 3 instances with both features and runs"
        )
    Xa = X[[ids.index(iid) for iid in common]]
    Ya = matrix.y[[matrix.instance_ids.index(iid) for iid in common]]

    params = fit_normalization(Xa, FEATURE_NAMES)
    Xn = apply_normalization(params, Xa, FEATURE_NAMES)
    sift = sifted_select(
        Xn, params.feature_names, Ya, threshold=config.correlation_threshold
    )
    selected = sift.selected
    fell_back = len(selected) < 2
    if fell_back:
        # not enough signal to project; fall back to the wider set
        wider = sift.kept_stage1 if len(sift.kept_stage1) >= 2 else params.feature_names
        log(
            f"isa-fit: selection kept {len(selected)} feature(s); "
            f"falling back to {len(wider)}"
        )
        selected = wider
    columns = [params.feature_names.index(n) for n in selected]
    model = fit_projection(Xn[:, columns], selected, params)

    inputs_hash = _files_hash(
        [config.artifact("features.csv"), config.artifact("runs.csv")]
    )
    meta = artifact_meta(config, inputs_hash)
    sift_meta = dict(meta)
    sift_meta.update(
        threshold=repr(config.correlation_threshold),
        k=str(sift.k),
        silhouette=repr(sift.silhouette),
        diagnostic=sift.diagnostic or "none",
        fallback="true" if fell_back else "false",
    )
    _write_rows_csv(
        config.artifact("sifted.csv"),
        ("feature", "max_abs_correlation", "kept_stage1", "selected"),
        [
            (
                name,
                repr(sift.correlations[name]),
                "true" if name in sift.kept_stage1 else "false",
                "true" if name in selected else "false",
            )
            for name in params.feature_names
        ],
        sift_meta,
    )
    write_projection_model(model, config.artifact("projection.isa"), meta)
    log(f"isa-fit: projecting from {len(selected)} features: {', '.join(selected)}")


def _stage_isa_project(config: PipelineConfig, log) -> None:
    ids, X, _ = read_features_csv(config.artifact("features.csv"))
    model = read_projection_model(config.artifact("projection.isa"))
    records, _ = read_journal(config.artifact("runs.csv"))
    matrix = PerformanceMatrix.from_records(records, config.good_tolerance)
    common = sorted(set(ids) & set(matrix.instance_ids))
    if not common:
        raise PipelineError("no instance has both features and runs")
    Z = project_many(model, X[[ids.index(iid) for iid in common]], FEATURE_NAMES)
    best = {
        iid: matrix.best_solver[matrix.instance_ids.index(iid)] for iid in common
    }
    inputs_hash = _files_hash(
        [
            config.artifact("features.csv"),
            config.artifact("runs.csv"),
            config.artifact("projection.isa"),
        ]
    )
    _write_rows_csv(
        config.artifact("projections.csv"),
        ("instance_id", "z1", "z2", "best_solver"),
        [
            (iid, repr(float(Z[i, 0])), repr(float(Z[i, 1])), best[iid])
            for i, iid in enumerate(common)
        ],
        artifact_meta(config, inputs_hash),
    )
    log(f"isa-project: {len(common)} instances mapped to the plane")


def _footprint_rows(config: PipelineConfig):
    ids, Z, _, _ = read_projections(config.artifact("projections.csv"))
    matrix = _aligned_performance(config, ids)
    boundary = cloister_boundary(Z)
    rows = []
    for j, solver_id in enumerate(matrix.solver_ids):
        fp = footprint(solver_id, Z, matrix.good[:, j])
        rows.append(
            (
                solver_id,
                int(matrix.good[:, j].sum()),
                sum(1 for b in matrix.best_solver if b == solver_id),
                repr(fp.area),
                repr(fp.density),
                repr(fp.purity),
            )
        )
    return rows, boundary, matrix


def _stage_isa_footprint(config: PipelineConfig, log) -> None:
    _check_input_hashes(config, ("projections.csv", "runs.csv"))
    rows, boundary, _ = _footprint_rows(config)
    inputs_hash = _files_hash(
        [config.artifact("projections.csv"), config.artifact("runs.csv")]
    )
    meta = artifact_meta(config, inputs_hash)
    meta["boundary_area"] = repr(polygon_area(boundary))
    _write_rows_csv(
        config.artifact("footprints.csv"),
        ("solver_id", "good_count", "best_count", "area", "density", "purity"),
        rows,
        meta,
    )
    log(f"isa-footprint: {len(rows)} solver footprints")


def _selector_inputs(config: PipelineConfig) -> tuple[list[str], np.ndarray, tuple]:
    """Training/evaluation inputs per the configured selector input space."""
    ids, Z, _, _ = read_projections(config.artifact("projections.csv"))
    if config.selector_input == "z":
        return ids, Z, ("z1", "z2")
    f_ids, X, _ = read_features_csv(config.artifact("features.csv"))
    rows = [f_ids.index(iid) for iid in ids]
    return ids, X[rows], FEATURE_NAMES


def _stage_train(config: PipelineConfig, log) -> None:
    ids, inputs, names = _selector_inputs(config)
    matrix = _aligned_performance(config, ids)
    model = train(
        inputs,
        matrix.good,
        matrix.solver_ids,
        names,
        input_space=config.selector_input,
        seed=config.seed,
    )
    inputs_hash = _files_hash([config.artifact(a) for a in _train_input_names(config)])
    write_selector_model(
        model, config.artifact("selector.isa"), artifact_meta(config, inputs_hash)
    )
    priors = sum(1 for c in model.classifiers.values() if not hasattr(c, "gamma"))
    log(
        f"train: {len(model.solver_ids)} classifiers over {len(ids)} instances"
        + (f" ({priors} degenerate, using priors)" if priors else "")
    )


def _train_input_names(config: PipelineConfig) -> tuple[str, ...]:
    if config.selector_input == "features":
        return ("projections.csv", "features.csv", "runs.csv")
    return ("projections.csv", "runs.csv")


def _check_input_hashes(config: PipelineConfig, names) -> None:
    """Refuse to aggregate artifacts produced under different configs."""
    want = config_hash(config)
    seen: dict[str, str] = {}
    for name in names:
        got = read_artifact_meta(config.artifact(name)).get("config", "missing")
        seen[name] = got
    if any(got != want for got in seen.values()):
        detail = ", ".join(f"{n}={h}" for n, h in sorted(seen.items()))
        raise PipelineError(
            f"mixed config hashes (current {want}): {detail}; "
            "re-run the earlier stages"
        )


def _stage_report(config: PipelineConfig, log) -> None:
    from .report import render_scatter

    input_names = _train_input_names(config) + ("selector.isa",)
    _check_input_hashes(config, input_names)
    rows, boundary, matrix = _footprint_rows(config)
    ids, Z, best, _ = read_projections(config.artifact("projections.csv"))
    model = read_selector_model(config.artifact("selector.isa"))
    _, inputs, _ = _selector_inputs(config)
    k = min(2, len(model.solver_ids))
    evaluation = evaluate_topk(model, inputs, best, k=k, instance_ids=ids)
    counts = {b: best.count(b) for b in set(best)}
    majority = max(counts.values()) / len(best)

    inputs_hash = _files_hash([config.artifact(n) for n in input_names])
    meta = artifact_meta(config, inputs_hash)
    meta.update(
        instances=str(len(ids)),
        boundary_area=repr(polygon_area(boundary)),
        top1_accuracy=repr(evaluation.accuracies[1]),
        topk_accuracy=repr(evaluation.accuracies[k]),
        majority_baseline=repr(majority),
    )
    _write_rows_csv(
        config.artifact("report.csv"),
        ("solver_id", "good_count", "best_count", "area", "density", "purity"),
        rows,
        meta,
    )
    render_scatter(
        Z,
        best,
        boundary,
        config.artifact("scatter.svg"),
        meta=artifact_meta(config, inputs_hash),
        title="Instance space by best solver",
    )
    log(
        f"report: top-1 accuracy {evaluation.accuracies[1]:.3f}, "
        f"majority baseline {majority:.3f}"
    )


# ------------------------------------------------------------ orchestration


@dataclass(frozen=True)
class _Stage:
    name: str
    run: object  # callable(config, log)
    inputs: tuple[str, ...]  # artifact names this stage reads
    complete: object = None  # extra callable(config) -> bool for skip checks


def _input_artifacts(config: PipelineConfig, stage: "_Stage") -> list[Path]:
    if stage.name == "train":
        return [config.artifact(n) for n in _train_input_names(config)]
    if stage.name == "report":
        return [
            config.artifact(n) for n in _train_input_names(config) + ("selector.isa",)
        ]
    return [config.artifact(n) for n in stage.inputs]


_STAGES = {
    s.name: s
    for s in (
        _Stage("ingest", _stage_ingest, ()),
        _Stage("features", _stage_features, ("corpus.csv",)),
        _Stage("bench", _stage_bench, ("corpus.csv",), _bench_complete),
        _Stage("isa-fit", _stage_isa_fit, ("features.csv", "runs.csv")),
        _Stage(
            "isa-project",
            _stage_isa_project,
            ("features.csv", "runs.csv", "projection.isa"),
        ),
        _Stage("isa-footprint", _stage_isa_footprint, ("projections.csv", "runs.csv")),
        _Stage("train", _stage_train, ("projections.csv", "runs.csv")),
        _Stage("report", _stage_report, ("projections.csv", "runs.csv", "selector.isa")),
    )
}

_PRODUCER = {
    artifact: stage for stage, names in ARTIFACTS.items() for artifact in names
}


def _inputs_hash_for(config: PipelineConfig, stage: _Stage) -> str:
    if stage.name == "ingest":
        return _files_hash(resolve_corpus(config))
    return _files_hash(_input_artifacts(config, stage))


def _meta_matches(got: dict, want: dict) -> bool:
    return all(got.get(key) == value for key, value in want.items())


def _up_to_date(config: PipelineConfig, stage: _Stage) -> bool:
    want = artifact_meta(config, _inputs_hash_for(config, stage))
    for name in ARTIFACTS[stage.name]:
        out = config.artifact(name)
        if not out.exists() or not _meta_matches(read_artifact_meta(out), want):
            return False
    if stage.complete is not None and not stage.complete(config):
        return False
    return True


def run_pipeline(
    config: PipelineConfig, stages=None, log=None
) -> list[tuple[str, str]]:
    """Run the requested stages in canonical order; returns (stage, status).

    Status is "ran" or "skipped" (outputs already up to date).  Raises
    :class:`PipelineError` when a stage's prerequisite artifact is
    missing, naming the stage that produces it.
    """
    config.validate()
    emit = log or (lambda msg: None)
    if stages is None:
        requested = list(STAGE_ORDER)
    else:
        unknown = [s for s in stages if s not in _STAGES]
        if unknown:
            raise ConfigError(
                f"unknown stage {unknown[0]!r} (choose from {', '.join(STAGE_ORDER)})"
            )
        requested = [s for s in STAGE_ORDER if s in set(stages)]
    config.output_dir.mkdir(parents=True, exist_ok=True)

    statuses: list[tuple[str, str]] = []
    for name in requested:
        stage = _STAGES[name]
        missing = [p for p in _input_artifacts(config, stage) if not p.exists()]
        if missing:
            raise PipelineError(
                f"stage '{name}' requires {missing[0].name}, produced by "
                f"stage '{_PRODUCER[missing[0].name]}'; run it first"
            )
        if _up_to_date(config, stage):
            emit(f"{name}: up to date, skipped")
            statuses.append((name, "skipped"))
            continue
        stage.run(config, emit)
        statuses.append((name, "ran"))
    return statuses
