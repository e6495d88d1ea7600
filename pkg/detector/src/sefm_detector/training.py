"""Training loop, divergence guard, and evaluation metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

__all__ = [
    "EmptyTestSetError",
    "TrainSettings",
    "TrainResult",
    "EvalReport",
    "train",
    "evaluate",
    "report_from_predictions",
]


class EmptyTestSetError(ValueError):
    """Evaluation was asked to score zero samples."""


@dataclass(frozen=True)
class TrainSettings:
    epochs: int = 20
    learning_rate: float = 1e-3
    batch_size: int = 32
    seed: int = 0


@dataclass
class TrainResult:
    """Per-epoch mean losses plus a divergence flag.

    diverged is set when a loss turns non-finite; training stops there
    instead of crashing, and the model is left in its last state.
    """

    losses: list[float] = field(default_factory=list)
    diverged: bool = False

    @property
    def final_loss(self) -> float:
        return self.losses[-1] if self.losses else math.nan


@dataclass(frozen=True)
class EvalReport:
    """Binary classification scorecard.

    confusion[i][j] counts samples of true class i predicted as class j,
    so row sums equal the test-set class counts.
    """

    accuracy: float
    macro_f1: float
    precision: tuple[float, float]
    recall: tuple[float, float]
    confusion: tuple[tuple[int, int], tuple[int, int]]

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "precision": list(self.precision),
            "recall": list(self.recall),
            "confusion": [list(row) for row in self.confusion],
        }


def _as_tensor(x: np.ndarray) -> torch.Tensor:
    return torch.as_tensor(x, dtype=torch.float32)


def train(
    model: nn.Module,
    train_x: np.ndarray,
    train_y: np.ndarray,
    settings: TrainSettings = TrainSettings(),
) -> TrainResult:
    """Fit the model with cross-entropy and an adaptive-moment optimizer.

    Deterministic for a fixed seed to the framework's CPU guarantees:
    the seed fixes both parameter init (seed the global generator before
    build_model for that) and the batch shuffle order here.
    """
    x = _as_tensor(train_x)
    y = torch.as_tensor(train_y, dtype=torch.long)
    optimizer = torch.optim.Adam(model.parameters(), lr=settings.learning_rate)
    loss_fn = nn.CrossEntropyLoss()
    shuffler = torch.Generator().manual_seed(settings.seed)

    result = TrainResult()
    model.train()
    for _ in range(settings.epochs):
        perm = torch.randperm(len(x), generator=shuffler)
        epoch_losses = []
        for start in range(0, len(x), settings.batch_size):
            batch = perm[start : start + settings.batch_size]
            optimizer.zero_grad()
            loss = loss_fn(model(x[batch]), y[batch])
            if not torch.isfinite(loss):
                result.diverged = True
                result.losses.append(float("nan"))
                return result
            loss.backward()
            optimizer.step()
            epoch_losses.append(loss.item())
        result.losses.append(float(np.mean(epoch_losses)))
    return result


def report_from_predictions(y_true: np.ndarray, y_pred: np.ndarray) -> EvalReport:
    """Score binary predictions against labels.

    Per-class precision/recall use the 0-when-undefined convention
    (empty denominator contributes 0, as does an F1 with P + R = 0), so
    degenerate predictors still get a well-defined macro F1.

    Raises:
        EmptyTestSetError: no samples.
    """
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.size == 0:
        raise EmptyTestSetError("cannot evaluate on an empty test set")

    confusion = np.zeros((2, 2), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        confusion[int(t), int(p)] += 1

    precision = []
    recall = []
    f1 = []
    for cls in (0, 1):
        tp = confusion[cls, cls]
        predicted = confusion[:, cls].sum()
        actual = confusion[cls, :].sum()
        p = tp / predicted if predicted else 0.0
        r = tp / actual if actual else 0.0
        precision.append(float(p))
        recall.append(float(r))
        f1.append(2 * p * r / (p + r) if (p + r) else 0.0)

    return EvalReport(
        accuracy=float(np.trace(confusion) / confusion.sum()),
        macro_f1=float(np.mean(f1)),
        precision=(precision[0], precision[1]),
        recall=(recall[0], recall[1]),
        confusion=tuple(tuple(int(v) for v in row) for row in confusion),
    )


def evaluate(model: nn.Module, test_x: np.ndarray, test_y: np.ndarray) -> EvalReport:
    """Argmax the model's logits over the test set and score them.

    Raises:
        EmptyTestSetError: empty test set.
    """
    if len(test_x) == 0:
        raise EmptyTestSetError("cannot evaluate on an empty test set")
    model.eval()
    with torch.no_grad():
        preds = model(_as_tensor(test_x)).argmax(dim=1).numpy()
    return report_from_predictions(np.asarray(test_y), preds)
