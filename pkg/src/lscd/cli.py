"""Command-line entry point.

Each pipeline stage is a subcommand; a stage transparently runs (or reuses
from cache) everything upstream of it, so `lscd score --config run.ini` is
enough to go from raw corpora to a scores table. `run-all` executes the
whole pipeline and writes the answer files plus the run manifest.
"""

from __future__ import annotations

import argparse
import sys

from .errors import LscdError, StageError
from .pipeline import Pipeline, load_config, run_benchmark_generation

_STAGE_COMMANDS = {
    "ingest": ("ingest", "Load, validate and frequency-threshold the corpora"),
    "train-static": ("train_static", "Train one static embedding space per corpus"),
    "align": ("align", "Normalize, center and rotate the t1 space onto t2"),
    "build-clf": ("build_clf", "Build the balanced time-classification dataset"),
    "train-clf": ("train_clf", "Train the sentence time classifier"),
    "extract": ("extract", "Extract per-use contextual vectors for the targets"),
    "score": ("score", "Compute context-free and context-dependent change scores"),
    "ensemble": ("ensemble", "Rank, combine and binarize the predictions"),
    "evaluate": ("evaluate", "Score the predictions against gold data"),
    "run-all": ("run_all", "Run the whole pipeline and write answers + manifest"),
}


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="path to the run config file")
    parser.add_argument("--seed", type=int, default=None, help="override [run] seed")
    parser.add_argument(
        "--deterministic",
        action="store_true",
        default=None,
        help="force single-worker deterministic execution",
    )
    parser.add_argument(
        "--theta",
        type=float,
        default=None,
        help="override the ensemble weight instead of predicting it",
    )
    parser.add_argument(
        "--no-mask",
        action="store_true",
        help="build the classification dataset without masking corpus-unique words",
    )
    parser.add_argument(
        "--pair-budget",
        type=int,
        default=None,
        help="subsample at most this many vector pairs per word in MPE scoring",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lscd",
        description="Rank words by lexical semantic change between two corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, (_, help_text) in _STAGE_COMMANDS.items():
        stage_parser = sub.add_parser(command, help=help_text)
        _add_common_options(stage_parser)

    gen = sub.add_parser(
        "gen-bench", help="Generate a synthetic benchmark with known shifts"
    )
    gen.add_argument("--out", required=True, help="directory for the benchmark files")
    gen.add_argument("--targets", type=int, default=8, help="number of pseudo-targets")
    gen.add_argument(
        "--sentences", type=int, default=20000, help="sentences per corpus"
    )
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument(
        "--degrees",
        default=None,
        help="comma-separated true shift degrees in [0,1] (default: evenly spaced)",
    )
    return parser


def _config_overrides(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.deterministic:
        overrides["deterministic"] = True
    if args.theta is not None:
        overrides["theta"] = args.theta
    if args.no_mask:
        overrides["masked"] = False
    if args.pair_budget is not None:
        overrides["pair_budget"] = args.pair_budget
    return overrides


def _run_stage(command: str, args: argparse.Namespace) -> int:
    config = load_config(args.config, overrides=_config_overrides(args))
    pipeline = Pipeline(config)
    method_name, _ = _STAGE_COMMANDS[command]
    getattr(pipeline, method_name)()
    for name, info in pipeline.report()["stages"].items():
        state = "cached" if info["cached"] else "built"
        print(f"{name}: {state} ({info['path']})")
    if command == "run-all":
        print(f"answers: {config.output_dir / 'answers'}")
        print(f"manifest: {config.output_dir / 'manifest.json'}")
    evaluate_stage = pipeline.stages.get("evaluate")
    if evaluate_stage is not None:
        summary = (evaluate_stage.path / "summary.txt").read_text(encoding="utf-8")
        print(summary, end="")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen-bench":
            degrees = None
            if args.degrees:
                degrees = [float(x) for x in args.degrees.split(",")]
            paths = run_benchmark_generation(
                args.out,
                n_targets=args.targets,
                sentences=args.sentences,
                seed=args.seed,
                degrees=degrees,
            )
            for name, path in paths.items():
                print(f"{name}: {path}")
            return 0
        return _run_stage(args.command, args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (LscdError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
