"""Command-line runner: single train/eval cycles and the two-variant
feature ablation.

Exit codes: 0 success, 1 any reported error (bad data, bad config,
missing file).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .ablation import run_ablation, run_experiment
from .dataset import (
    FeatureFormatError,
    InsufficientSamplesError,
    ManifestError,
    ShapeMismatchError,
)
from .model import ConfigError, ModelConfig
from .training import EmptyTestSetError, TrainSettings

_USER_ERRORS = (
    FeatureFormatError,
    ManifestError,
    ShapeMismatchError,
    InsufficientSamplesError,
    ConfigError,
    EmptyTestSetError,
    OSError,
)


def _load_config(path: str | None) -> ModelConfig:
    if path is None:
        return ModelConfig()
    return ModelConfig.from_json_file(path)


def cmd_train(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    report = run_experiment(
        args.manifest,
        seed=args.seed,
        config=config,
        settings=TrainSettings(epochs=args.epochs, seed=args.seed),
    )
    print(f"accuracy  {report.accuracy:.4f}")
    print(f"macro F1  {report.macro_f1:.4f}")
    print(f"confusion {report.confusion}")
    if args.report is not None:
        Path(args.report).write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
        print(f"report written to {args.report}")
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    seeds = tuple(range(args.seed, args.seed + args.n_seeds))
    result = run_ablation(
        args.manifest,
        args.baseline_manifest,
        seeds=seeds,
        config=_load_config(args.config),
        epochs=args.epochs,
    )
    print(result.text_table())
    if args.report is not None:
        Path(args.report).write_text(json.dumps(result.to_dict(), indent=2) + "\n", encoding="utf-8")
        print(f"report written to {args.report}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sefm-detector",
        description="CNN classifier and feature ablation over .sefm corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", required=True, help="manifest.csv of feature files")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--epochs", type=int, default=20)
    common.add_argument("--config", default=None, help="JSON file overriding model defaults")
    common.add_argument("--report", default=None, help="write the JSON report here")

    p_train = sub.add_parser("train", parents=[common], help="one train/evaluate cycle")
    p_train.set_defaults(func=cmd_train)

    p_ablate = sub.add_parser(
        "ablate", parents=[common], help="compare full features against the entropy-only baseline"
    )
    p_ablate.add_argument(
        "--baseline-manifest", required=True, help="manifest.csv of entropy-only feature files"
    )
    p_ablate.add_argument(
        "--n-seeds", type=int, default=3, help="number of consecutive seeds starting at --seed"
    )
    p_ablate.set_defaults(func=cmd_ablate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _USER_ERRORS as exc:
        print(f"sefm-detector: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
