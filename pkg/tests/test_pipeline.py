"""Config parsing, stage orchestration, artifact caching, and the CLI."""

import shutil
import subprocess
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from cliquespace.bench import read_journal
from cliquespace.cli import main
from cliquespace.errors import CampaignFailureError, ConfigError, PipelineError
from cliquespace.features import FEATURE_NAMES, read_features_csv
from cliquespace.graph import GraphFormat, generate, serialize
from cliquespace.pipeline import (
    STAGE_ORDER,
    config_hash,
    load_config,
    read_artifact_meta,
    read_manifest,
    read_projections,
    run_pipeline,
)

from oracles import connected_gnp


def write_corpus(directory: Path) -> int:
    """A small, varied, connected corpus: cliques, cycles, random graphs."""
    directory.mkdir(parents=True, exist_ok=True)
    graphs = [
        generate("complete", 8),
        generate("complete", 12),
        generate("complete", 16),
        generate("cycle", 15),
        generate("cycle", 20),
    ]
    for i, (n, p) in enumerate(
        [
            (14, 0.35),
            (16, 0.45),
            (18, 0.5),
            (20, 0.55),
            (22, 0.6),
            (24, 0.65),
            (15, 0.5),
            (17, 0.4),
            (19, 0.6),
        ]
    ):
        graphs.append(connected_gnp(n, p, seed=100 + i))
    for i, g in enumerate(graphs):
        path = directory / f"inst{i:02d}.clq"
        path.write_text(serialize(g, GraphFormat.DIMACS_CLQ))
    return len(graphs)


def write_config(
    tmp_path: Path,
    corpus_glob: str = "corpus/*.clq",
    solvers=("exact", "greedy"),
    budget: float = 3.0,
    extra: str = "",
) -> Path:
    portfolio = "\n".join(f"{sid} = builtin" for sid in solvers)
    path = tmp_path / "campaign.ini"
    path.write_text(
        f"""
[corpus]
paths = {corpus_glob}

[portfolio]
{portfolio}

[run]
solver_budget = {budget}
feature_budget = 60
seed = 0
output_dir = out
{extra}
"""
    )
    return path


@pytest.fixture(scope="module")
def completed_pipeline(tmp_path_factory):
    """One full pipeline run shared by the read-only assertions."""
    tmp_path = tmp_path_factory.mktemp("campaign")
    count = write_corpus(tmp_path / "corpus")
    config = load_config(write_config(tmp_path))
    statuses = run_pipeline(config)
    return tmp_path, config, statuses, count


# ------------------------------------------------------------------ config


def test_load_config_fields(tmp_path):
    (tmp_path / "corpus").mkdir()
    path = write_config(tmp_path, extra="jobs_are_not_config = ignored")
    config = load_config(path)
    assert config.corpus == ("corpus/*.clq",)
    assert config.portfolio == (("exact", "builtin"), ("greedy", "builtin"))
    assert config.solver_budget == 3.0
    assert config.feature_budget == 60.0
    assert config.correlation_threshold == 0.8  # default
    assert config.good_tolerance == 0.05  # default
    assert config.seed == 0
    assert config.output_dir == tmp_path / "out"
    assert config.base_dir == tmp_path


def test_config_missing_file():
    with pytest.raises(ConfigError, match="does not exist"):
        load_config("/nonexistent/campaign.ini")


def test_config_validation_names_the_field(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[corpus]\npaths = x/*.clq\n[portfolio]\nwarp = builtin\n")
    with pytest.raises(ConfigError, match="portfolio.warp"):
        load_config(bad)
    bad.write_text(
        "[corpus]\npaths = x/*.clq\n[portfolio]\nexact = builtin\n"
        "[run]\nsolver_budget = fast\n"
    )
    with pytest.raises(ConfigError, match="run.solver_budget"):
        load_config(bad)
    bad.write_text(
        "[corpus]\npaths = x/*.clq\n[portfolio]\nexact = builtin\n"
        "[run]\nsolver_budget = -1\n"
    )
    with pytest.raises(ConfigError, match="solver_budget"):
        load_config(bad)
    bad.write_text("[corpus]\npaths =\n[portfolio]\nexact = builtin\n")
    with pytest.raises(ConfigError, match="corpus.paths"):
        load_config(bad)
    bad.write_text(
        "[corpus]\npaths = x/*.clq\n[portfolio]\nmine = external run-it\n"
    )
    with pytest.raises(ConfigError, match="instance"):
        load_config(bad)
    bad.write_text(
        "[corpus]\npaths = x/*.clq\n[portfolio]\nexact = builtin\n"
        "[thresholds]\ncorrelation = 1.5\n"
    )
    with pytest.raises(ConfigError, match="thresholds.correlation"):
        load_config(bad)


def test_config_hash_ignores_output_and_jobs(tmp_path):
    config = load_config(write_config(tmp_path))
    assert config_hash(replace(config, output_dir=Path("/elsewhere"))) == config_hash(
        config
    )
    assert config_hash(replace(config, jobs=8)) == config_hash(config)
    assert config_hash(replace(config, solver_budget=9.0)) != config_hash(config)
    assert config_hash(replace(config, seed=1)) != config_hash(config)


# ---------------------------------------------------------------- pipeline


def test_full_pipeline_produces_all_artifacts(completed_pipeline):
    tmp_path, config, statuses, count = completed_pipeline
    assert statuses == [(name, "ran") for name in STAGE_ORDER]
    for name in (
        "corpus.csv",
        "features.csv",
        "runs.csv",
        "sifted.csv",
        "projection.isa",
        "projections.csv",
        "footprints.csv",
        "selector.isa",
        "report.csv",
        "scatter.svg",
    ):
        assert config.artifact(name).exists(), name

    ids, X, meta = read_features_csv(config.artifact("features.csv"))
    assert len(ids) == count
    assert X.shape == (count, 35)
    assert meta["tool"].startswith("cliquespace/")
    assert meta["config"] == config_hash(config)

    records, _ = read_journal(config.artifact("runs.csv"))
    assert len(records) == count * 2
    assert all(r.status == "ok" for r in records)


def test_every_artifact_embeds_tool_and_config_hash(completed_pipeline):
    _, config, _, _ = completed_pipeline
    want = config_hash(config)
    for name in (
        "corpus.csv",
        "features.csv",
        "runs.csv",
        "sifted.csv",
        "projection.isa",
        "projections.csv",
        "footprints.csv",
        "selector.isa",
        "report.csv",
        "scatter.svg",
    ):
        meta = read_artifact_meta(config.artifact(name))
        assert meta.get("config") == want, name
        assert meta.get("tool", "").startswith("cliquespace/"), name
        assert "inputs" in meta, name


def test_projections_cover_benchmarked_instances(completed_pipeline):
    _, config, _, count = completed_pipeline
    ids, coords, best, _ = read_projections(config.artifact("projections.csv"))
    assert len(ids) == count
    assert coords.shape == (count, 2)
    assert np.isfinite(coords).all()
    assert set(best) <= {"exact", "greedy"}


def test_report_summarizes_selector_and_footprints(completed_pipeline):
    _, config, _, _ = completed_pipeline
    meta = read_artifact_meta(config.artifact("report.csv"))
    top1 = float(meta["top1_accuracy"])
    majority = float(meta["majority_baseline"])
    assert 0.0 <= top1 <= 1.0
    assert 0.0 < majority <= 1.0
    assert float(meta["boundary_area"]) > 0.0
    svg = config.artifact("scatter.svg").read_text()
    assert "<svg" in svg and "<circle" in svg and "<polygon" in svg
    assert "best solver" in svg  # legend title


def test_rerun_skips_everything_and_reexecutes_nothing(completed_pipeline):
    tmp_path, config, _, _ = completed_pipeline
    journal_before = config.artifact("runs.csv").read_bytes()
    statuses = run_pipeline(config)
    assert statuses == [(name, "skipped") for name in STAGE_ORDER]
    assert config.artifact("runs.csv").read_bytes() == journal_before


def test_stage_subset_runs_only_requested(tmp_path):
    write_corpus(tmp_path / "corpus")
    config = load_config(write_config(tmp_path))
    statuses = run_pipeline(config, ["ingest", "features"])
    assert statuses == [("ingest", "ran"), ("features", "ran")]
    assert config.artifact("features.csv").exists()
    assert not config.artifact("runs.csv").exists()


def test_missing_predecessor_names_the_producing_stage(tmp_path):
    write_corpus(tmp_path / "corpus")
    config = load_config(write_config(tmp_path))
    with pytest.raises(PipelineError, match="'ingest'"):
        run_pipeline(config, ["features"])
    run_pipeline(config, ["ingest", "features"])
    with pytest.raises(PipelineError, match="runs.csv.*'bench'"):
        run_pipeline(config, ["isa-fit"])


def test_unknown_stage_rejected(tmp_path):
    config = load_config(write_config(tmp_path))
    with pytest.raises(ConfigError, match="unknown stage"):
        run_pipeline(config, ["ingest", "deploy"])


def test_empty_corpus_is_a_data_error(tmp_path):
    (tmp_path / "corpus").mkdir()
    config = load_config(write_config(tmp_path))
    with pytest.raises(PipelineError, match="corpus is empty"):
        run_pipeline(config, ["ingest"])


def test_ingest_marks_unusable_instances(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "good.clq").write_text(
        serialize(generate("complete", 5), GraphFormat.DIMACS_CLQ)
    )
    (corpus / "split.clq").write_text("p edge 6 2\ne 1 2\ne 3 4\n")  # disconnected
    (corpus / "broken.clq").write_text("p edge nonsense\n")
    config = load_config(write_config(tmp_path))
    run_pipeline(config, ["ingest"])
    rows, _ = read_manifest(config.artifact("corpus.csv"))
    by_id = {r["instance_id"]: r for r in rows}
    assert by_id["good"]["usable"] is True
    assert by_id["split"]["usable"] is False and by_id["split"]["note"] == "disconnected"
    assert by_id["broken"]["usable"] is False and by_id["broken"]["note"]


def test_duplicate_instance_ids_rejected(tmp_path):
    corpus = tmp_path / "corpus"
    (corpus / "a").mkdir(parents=True)
    (corpus / "b").mkdir()
    k5 = serialize(generate("complete", 5), GraphFormat.DIMACS_CLQ)
    (corpus / "a" / "same.clq").write_text(k5)
    (corpus / "b" / "same.clq").write_text(k5)
    config = load_config(write_config(tmp_path, corpus_glob="corpus/*/*.clq"))
    with pytest.raises(PipelineError, match="duplicate instance id"):
        run_pipeline(config, ["ingest"])


def test_config_change_discards_stale_journal(tmp_path):
    write_corpus(tmp_path / "corpus")
    config = load_config(write_config(tmp_path))
    run_pipeline(config, ["ingest", "features", "bench"])
    old_meta = read_artifact_meta(config.artifact("runs.csv"))

    changed = load_config(write_config(tmp_path, budget=4.0))
    run_pipeline(changed, ["ingest", "features", "bench"])
    new_meta = read_artifact_meta(config.artifact("runs.csv"))
    assert new_meta["config"] != old_meta["config"]
    records, _ = read_journal(config.artifact("runs.csv"))
    assert len(records) == 14 * 2  # a complete fresh campaign, no stale rows


def test_corpus_edit_invalidates_downstream_stages(tmp_path):
    count = write_corpus(tmp_path / "corpus")
    config = load_config(write_config(tmp_path))
    run_pipeline(config, ["ingest", "features"])
    extra = tmp_path / "corpus" / "late.clq"
    extra.write_text(serialize(generate("complete", 9), GraphFormat.DIMACS_CLQ))
    statuses = run_pipeline(config, ["ingest", "features"])
    assert statuses == [("ingest", "ran"), ("features", "ran")]
    ids, _, _ = read_features_csv(config.artifact("features.csv"))
    assert len(ids) == count + 1


def test_report_refuses_mixed_config_hashes(tmp_path):
    write_corpus(tmp_path / "corpus")
    config = load_config(write_config(tmp_path))
    run_pipeline(config)
    # forge a projections artifact from some other campaign
    target = config.artifact("projections.csv")
    lines = target.read_text().splitlines()
    lines[1] = "# config=000000000000"
    target.write_text("\n".join(lines) + "\n")
    with pytest.raises(PipelineError, match="mixed config hashes"):
        run_pipeline(config, ["report"])


def test_all_runs_failing_is_a_campaign_failure(tmp_path):
    corpus = tmp_path / "corpus"
    write_corpus(corpus)
    config_path = tmp_path / "campaign.ini"
    config_path.write_text(
        """
[corpus]
paths = corpus/*.clq

[portfolio]
crasher = external /bin/false {instance}

[run]
solver_budget = 2
output_dir = out
"""
    )
    config = load_config(config_path)
    with pytest.raises(CampaignFailureError):
        run_pipeline(config, ["ingest", "bench"])


def test_parallel_bench_matches_serial(tmp_path):
    write_corpus(tmp_path / "corpus")
    serial = load_config(write_config(tmp_path))
    run_pipeline(serial, ["ingest", "features", "bench"])
    records_serial, _ = read_journal(serial.artifact("runs.csv"))

    par_dir = tmp_path / "par"
    par_dir.mkdir()
    shutil.copytree(tmp_path / "corpus", par_dir / "corpus")
    parallel = replace(
        load_config(write_config(par_dir)), jobs=4
    )
    run_pipeline(parallel, ["ingest", "features", "bench"])
    records_parallel, _ = read_journal(parallel.artifact("runs.csv"))
    serial_sizes = {(r.instance_id, r.solver_id): r.clique_size for r in records_serial}
    parallel_sizes = {
        (r.instance_id, r.solver_id): r.clique_size for r in records_parallel
    }
    assert serial_sizes == parallel_sizes


# --------------------------------------------------------------------- cli


def test_cli_solve_exact(tmp_path, capsys):
    instance = tmp_path / "k5.clq"
    instance.write_text(serialize(generate("complete", 5), GraphFormat.DIMACS_CLQ))
    code = main(["solve", "--solver", "exact", "--instance", str(instance)])
    out = capsys.readouterr().out
    assert code == 0
    assert "clique=5" in out and "proven=true" in out
    assert "vertices=0 1 2 3 4" in out


def test_cli_solve_local_search(tmp_path, capsys):
    instance = tmp_path / "c6.clq"
    instance.write_text(serialize(generate("cycle", 6), GraphFormat.DIMACS_CLQ))
    code = main(
        ["solve", "--solver", "fastwclq-like", "--instance", str(instance), "--budget", "2"]
    )
    assert code == 0
    assert "clique=2" in capsys.readouterr().out


def test_cli_solve_missing_instance_is_data_error(tmp_path, capsys):
    code = main(["solve", "--solver", "exact", "--instance", str(tmp_path / "no.clq")])
    assert code == 3
    assert "error" in capsys.readouterr().err


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.ini")]) == 2

    (tmp_path / "corpus").mkdir()
    empty = write_config(tmp_path)
    assert main(["run", "--config", str(empty)]) == 3

    write_corpus(tmp_path / "corpus")
    crash_cfg = tmp_path / "crash.ini"
    crash_cfg.write_text(
        "[corpus]\npaths = corpus/*.clq\n\n"
        "[portfolio]\ncrasher = external /bin/false {instance}\n\n"
        "[run]\nsolver_budget = 2\noutput_dir = crash_out\n"
    )
    assert main(["run", "--config", str(crash_cfg), "--stages", "ingest,bench"]) == 4
    capsys.readouterr()


def test_cli_full_run_and_idempotent_rerun(tmp_path, capsys):
    write_corpus(tmp_path / "corpus")
    config_path = write_config(tmp_path)
    assert main(["run", "--config", str(config_path)]) == 0
    first = capsys.readouterr().out
    assert "8 stage(s) ran" in first

    assert main(["run", "--config", str(config_path)]) == 0
    second = capsys.readouterr().out
    assert "0 stage(s) ran, 8 skipped" in second


def test_cli_predict_ranks_portfolio(tmp_path, capsys):
    write_corpus(tmp_path / "corpus")
    config_path = write_config(tmp_path)
    assert main(["run", "--config", str(config_path)]) == 0
    capsys.readouterr()
    out_dir = tmp_path / "out"
    code = main(
        [
            "predict",
            "--model",
            str(out_dir / "selector.isa"),
            "--features",
            str(out_dir / "features.csv"),
            "--top",
            "2",
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln.strip()]
    assert len(lines) == 14
    assert all("exact=" in ln or "greedy=" in ln for ln in lines)


def test_cli_stage_subcommands_match_stage_names(tmp_path, capsys):
    write_corpus(tmp_path / "corpus")
    config_path = write_config(tmp_path)
    assert main(["ingest", "--config", str(config_path)]) == 0
    assert main(["features", "--config", str(config_path)]) == 0
    capsys.readouterr()
    assert (tmp_path / "out" / "features.csv").exists()
    assert not (tmp_path / "out" / "runs.csv").exists()


def test_console_script_is_installed():
    result = subprocess.run(
        [sys.executable, "-m", "cliquespace.cli", "--help"]
        if shutil.which("cliquespace") is None
        else ["cliquespace", "--help"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert "ingest" in result.stdout and "predict" in result.stdout
