"""Command-line entry point.

Subcommands mirror the pipeline stages (ingest, features, bench,
isa-fit, isa-project, isa-footprint, train, report, run) plus two
ad-hoc tools: ``solve`` runs one solver on one graph file, ``predict``
ranks the portfolio for instances in a feature CSV.

Exit codes: 0 success; 2 configuration error; 3 data error (malformed
inputs, missing artifacts, degenerate geometry); 4 campaign failure
(every benchmark run failed).  ``CLIQUESPACE_TMPDIR`` redirects scratch
files (external solver instances) to a chosen directory.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import CampaignFailureError, CliquespaceError, ConfigError, PipelineError
from .features import FEATURE_NAMES, read_features_csv
from .graph import parse_path
from .isa import project_many, read_projection_model
from .pipeline import STAGE_ORDER, load_config, run_pipeline
from .selector import predict as selector_predict
from .selector import read_selector_model
from .solvers import BUILTIN_SOLVER_IDS, make_builtin
from .solvers.external import run_external

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_CAMPAIGN = 4


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _stage_command(args, stages) -> int:
    config = load_config(args.config)
    if args.jobs is not None:
        config = replace(config, jobs=args.jobs)
    statuses = run_pipeline(config, stages, log=_log)
    ran = sum(1 for _, status in statuses if status == "ran")
    skipped = len(statuses) - ran
    print(f"{ran} stage(s) ran, {skipped} skipped; artifacts in {config.output_dir}")
    return EXIT_OK


def _cmd_run(args) -> int:
    stages = None
    if args.stages:
        stages = [s.strip() for s in args.stages.split(",") if s.strip()]
    return _stage_command(args, stages)


def _cmd_solve(args) -> int:
    g = parse_path(args.instance).graph
    budget = None if args.budget == 0 else args.budget
    if budget is None and args.solver in ("fastwclq-like", "external"):
        raise ConfigError(f"--solver {args.solver} needs a positive --budget")
    if args.solver == "external":
        if not args.command:
            raise ConfigError("solve --solver external requires --command")
        result = run_external(args.command, g, budget)
    else:
        result = make_builtin(args.solver, seed=args.seed)(g, budget)
    proven = "true" if result.proven_optimal else "false"
    exhausted = "true" if result.budget_exhausted else "false"
    print(
        f"instance={Path(args.instance).stem} solver={result.solver_id} "
        f"clique={result.clique_size} proven={proven} "
        f"wall={result.wall_seconds:.3f} budget_exhausted={exhausted}"
    )
    if result.clique:
        print("vertices=" + " ".join(str(v) for v in result.clique))
    return EXIT_OK


def _cmd_predict(args) -> int:
    model = read_selector_model(args.model)
    ids, X, _ = read_features_csv(args.features)
    if not ids:
        raise PipelineError(f"{args.features}: no instances")
    if model.input_space == "z":
        projection_path = args.projection or Path(args.model).parent / "projection.isa"
        if not Path(projection_path).exists():
            raise PipelineError(
                "model expects projected inputs; pass --projection <projection.isa>"
            )
        projection = read_projection_model(projection_path)
        inputs = project_many(projection, X, FEATURE_NAMES)
    else:
        columns = [FEATURE_NAMES.index(n) for n in model.feature_names]
        inputs = X[:, columns]
    top = max(1, min(args.top, len(model.solver_ids)))
    for i, iid in enumerate(ids):
        ranking = selector_predict(model, np.asarray(inputs[i]))[:top]
        print(f"{iid}: " + " ".join(f"{sid}={score:.6f}" for sid, score in ranking))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cliquespace",
        description="Instance-space analysis pipeline for maximum clique solvers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def stage_parser(name: str, help_text: str):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="campaign INI file")
        p.add_argument("--jobs", type=int, default=None, help="parallel workers")
        return p

    run_p = stage_parser("run", "run the full pipeline (or --stages subset)")
    run_p.add_argument(
        "--stages", default="", help="comma-separated subset of: " + ", ".join(STAGE_ORDER)
    )
    run_p.set_defaults(handler=_cmd_run)

    stage_help = {
        "ingest": "scan the corpus and write the instance manifest",
        "features": "compute the 35-feature vectors",
        "bench": "run the solver portfolio (resumable journal)",
        "isa-fit": "fit normalization, feature selection, and the 2-D projection",
        "isa-project": "map instances to (Z1, Z2) coordinates",
        "isa-footprint": "summarize per-solver footprint geometry",
        "train": "train the per-solver selector",
        "report": "write the footprint table and SVG scatter",
    }
    for name, help_text in stage_help.items():
        p = stage_parser(name, help_text)
        p.set_defaults(handler=lambda args, _name=name: _stage_command(args, [_name]))

    solve_p = sub.add_parser("solve", help="run one solver on one graph file")
    solve_p.add_argument(
        "--solver", required=True, choices=BUILTIN_SOLVER_IDS + ("external",)
    )
    solve_p.add_argument("--instance", required=True, help="graph file")
    solve_p.add_argument(
        "--budget", type=float, default=60.0, help="wall seconds (0 = unlimited)"
    )
    solve_p.add_argument("--seed", type=int, default=0)
    solve_p.add_argument("--command", default="", help="external command template")
    solve_p.set_defaults(handler=_cmd_solve)

    predict_p = sub.add_parser("predict", help="rank solvers for feature-CSV instances")
    predict_p.add_argument("--model", required=True, help="selector model file")
    predict_p.add_argument("--features", required=True, help="features CSV")
    predict_p.add_argument(
        "--projection", default="", help="projection model (default: next to --model)"
    )
    predict_p.add_argument("--top", type=int, default=2)
    predict_p.set_defaults(handler=_cmd_predict)
    return parser


def main(argv=None) -> int:
    if os.environ.get("CLIQUESPACE_TMPDIR"):
        tempfile.tempdir = os.environ["CLIQUESPACE_TMPDIR"]
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CampaignFailureError as exc:
        print(f"campaign failure: {exc}", file=sys.stderr)
        return EXIT_CAMPAIGN
    except (CliquespaceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
