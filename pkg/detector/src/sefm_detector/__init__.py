"""CNN classifier and ablation harness over serialized entropy features.

Consumes the extraction side's two on-disk formats (.sefm feature files
and path,label manifests) through its own reader; trains a small 1-D
CNN; evaluates with accuracy and macro F1; and compares section-aware
features against the entropy-only baseline.
"""

from .dataset import (
    FeatureFormatError,
    InsufficientSamplesError,
    ManifestError,
    ShapeMismatchError,
    load_dataset,
    read_manifest,
    read_sefm,
    split_dataset,
)
from .model import ConfigError, ModelConfig, build_model
from .training import (
    EmptyTestSetError,
    EvalReport,
    TrainResult,
    TrainSettings,
    evaluate,
    report_from_predictions,
    train,
)
from .ablation import AblationReport, VariantResult, run_ablation, run_experiment

__version__ = "0.1.0"

__all__ = [
    "FeatureFormatError",
    "ManifestError",
    "ShapeMismatchError",
    "InsufficientSamplesError",
    "read_sefm",
    "read_manifest",
    "load_dataset",
    "split_dataset",
    "ConfigError",
    "ModelConfig",
    "build_model",
    "EmptyTestSetError",
    "EvalReport",
    "TrainResult",
    "TrainSettings",
    "train",
    "evaluate",
    "report_from_predictions",
    "AblationReport",
    "VariantResult",
    "run_ablation",
    "run_experiment",
    "__version__",
]
