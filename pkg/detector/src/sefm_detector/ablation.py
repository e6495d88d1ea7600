"""Feature ablation: section-aware features vs the entropy-only stream.

Trains and evaluates the same architecture on both feature variants over
several seeds; only the input width differs.  The report carries per-seed
and mean figures and renders as a two-row comparison table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .dataset import load_dataset, split_dataset
from .model import ModelConfig, build_model
from .training import EvalReport, TrainSettings, evaluate, train

__all__ = ["VariantResult", "AblationReport", "run_experiment", "run_ablation"]


@dataclass(frozen=True)
class VariantResult:
    """Per-seed evaluation reports for one feature variant."""

    name: str
    seeds: tuple[int, ...]
    reports: tuple[EvalReport, ...]

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean([r.accuracy for r in self.reports]))

    @property
    def mean_macro_f1(self) -> float:
        return float(np.mean([r.macro_f1 for r in self.reports]))


@dataclass(frozen=True)
class AblationReport:
    baseline: VariantResult
    section_aware: VariantResult

    def text_table(self) -> str:
        rows = [
            ("feature", "accuracy", "macro-F1"),
            (
                "entropy streams (w/o section information)",
                f"{self.baseline.mean_accuracy:.3f}",
                f"{self.baseline.mean_macro_f1:.3f}",
            ),
            (
                "entropy streams + section one-hot",
                f"{self.section_aware.mean_accuracy:.3f}",
                f"{self.section_aware.mean_macro_f1:.3f}",
            ),
        ]
        name_w = max(len(r[0]) for r in rows)
        lines = [f"{r[0]:<{name_w}}  {r[1]:>8}  {r[2]:>8}" for r in rows]
        lines.insert(1, "-" * len(lines[0]))
        return "\n".join(lines)

    def to_dict(self) -> dict:
        def variant(v: VariantResult) -> dict:
            return {
                "name": v.name,
                "seeds": list(v.seeds),
                "mean_accuracy": v.mean_accuracy,
                "mean_macro_f1": v.mean_macro_f1,
                "per_seed": [r.to_dict() for r in v.reports],
            }

        return {
            "baseline": variant(self.baseline),
            "section_aware": variant(self.section_aware),
        }


def run_experiment(
    manifest_path: str,
    seed: int,
    config: ModelConfig = ModelConfig(),
    settings: TrainSettings | None = None,
) -> EvalReport:
    """One train/evaluate cycle: load, 70/30 stratified split, fit, score.

    The config's input shape is overridden by the data's actual shape;
    the seed fixes the split, the parameter init, and the batch order.
    """
    features, labels = load_dataset(manifest_path)
    (train_x, train_y), (test_x, test_y) = split_dataset(features, labels, seed=seed)
    settings = settings or TrainSettings(seed=seed)
    torch.manual_seed(seed)
    model = build_model(config.with_input(features.shape[1], features.shape[2]))
    train(model, train_x, train_y, settings)
    return evaluate(model, test_x, test_y)


def run_ablation(
    full_manifest: str,
    baseline_manifest: str,
    seeds: tuple[int, ...] = (0, 1, 2),
    config: ModelConfig = ModelConfig(),
    epochs: int = 20,
) -> AblationReport:
    """Train/evaluate both feature variants over every seed.

    Expects the two manifests to describe the same corpus, one with full
    (cols=14) features and one entropy-only (cols=1).
    """
    variants = {}
    for name, manifest in (("baseline", baseline_manifest), ("section_aware", full_manifest)):
        reports = tuple(
            run_experiment(
                manifest,
                seed=s,
                config=config,
                settings=TrainSettings(epochs=epochs, seed=s),
            )
            for s in seeds
        )
        variants[name] = VariantResult(name=name, seeds=tuple(seeds), reports=reports)
    return AblationReport(baseline=variants["baseline"], section_aware=variants["section_aware"])
