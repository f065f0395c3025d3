"""Classification metrics: confusion matrix, macro precision/recall/F1, accuracy.

Per-class ratios use the 0/0 -> 0 convention so every metric is total.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class MetricsError(Exception):
    pass


class LengthMismatchError(MetricsError):
    pass


class LabelOutOfRangeError(MetricsError):
    pass


class EmptyMatrixError(MetricsError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    """rows = true class, cols = predicted class."""

    n_classes: int
    counts: np.ndarray

    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class PerClass:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MetricsReport:
    precision_macro: float
    recall_macro: float
    f1_macro: float
    accuracy: float
    per_class: tuple[PerClass, ...]


def confusion(
    truths: Sequence[int], predictions: Sequence[int], n_classes: int
) -> ConfusionMatrix:
    if len(truths) != len(predictions):
        raise LengthMismatchError(
            f"{len(truths)} truths vs {len(predictions)} predictions"
        )
    if len(truths) == 0:
        raise LengthMismatchError("need at least one pair")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    for t, p in zip(truths, predictions):
        t, p = int(t), int(p)
        if not (0 <= t < n_classes and 0 <= p < n_classes):
            raise LabelOutOfRangeError(f"pair ({t}, {p}) outside [0, {n_classes})")
        counts[t, p] += 1
    return ConfusionMatrix(n_classes, counts)


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def report(cm: ConfusionMatrix) -> MetricsReport:
    total = cm.total()
    if total == 0:
        raise EmptyMatrixError("confusion matrix holds no pairs")
    counts = cm.counts
    per_class = []
    for c in range(cm.n_classes):
        tp = float(counts[c, c])
        fp = float(counts[:, c].sum()) - tp
        fn = float(counts[c, :].sum()) - tp
        prec = _safe_div(tp, tp + fp)
        rec = _safe_div(tp, tp + fn)
        f1 = _safe_div(2.0 * prec * rec, prec + rec)
        per_class.append(PerClass(prec, rec, f1))
    n = cm.n_classes
    return MetricsReport(
        precision_macro=sum(p.precision for p in per_class) / n,
        recall_macro=sum(p.recall for p in per_class) / n,
        f1_macro=sum(p.f1 for p in per_class) / n,
        accuracy=float(np.trace(counts)) / total,
        per_class=tuple(per_class),
    )


def csv_header() -> str:
    return "model,dataset,precision,recall,f1,accuracy"


def csv_row(model: str, dataset: str, rep: MetricsReport) -> str:
    """One Table-style CSV row with 4 decimal places."""
    return (
        f"{model},{dataset},{rep.precision_macro:.4f},{rep.recall_macro:.4f},"
        f"{rep.f1_macro:.4f},{rep.accuracy:.4f}"
    )
