"""Confusion matrix and accuracy for per-frame label predictions."""
from __future__ import annotations

import io
from typing import Sequence

import numpy as np

from .movements import CODE_INDEX, CODE_ORDER, NUM_CLASSES


class EvaluationError(ValueError):
    pass


class ConfusionMatrix:
    """8x8 integer counts, rows = ground truth, columns = prediction."""

    def __init__(self, counts: np.ndarray | None = None):
        if counts is None:
            counts = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
        counts = np.asarray(counts, dtype=np.int64)
        if counts.shape != (NUM_CLASSES, NUM_CLASSES):
            raise EvaluationError(f"expected {NUM_CLASSES}x{NUM_CLASSES} counts, got {counts.shape}")
        if np.any(counts < 0):
            raise EvaluationError("counts must be non-negative")
        self.counts = counts

    def add(self, truth_code: int, predicted_code: int) -> None:
        self.counts[CODE_INDEX[truth_code], CODE_INDEX[predicted_code]] += 1

    def merge(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.counts + other.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        total = self.total
        if total == 0:
            return 0.0
        return float(np.trace(self.counts)) / total

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("truth\\pred," + ",".join(str(c) for c in CODE_ORDER) + "\n")
        for i, code in enumerate(CODE_ORDER):
            buf.write(f"{code}," + ",".join(str(int(v)) for v in self.counts[i]) + "\n")
        return buf.getvalue()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ConfusionMatrix) and bool(np.array_equal(self.counts, other.counts))


def evaluate(predictions: Sequence[int], truth: Sequence[int]) -> ConfusionMatrix:
    """Tally (truth, prediction) pairs; sequences must have equal length."""
    if len(predictions) != len(truth):
        raise EvaluationError(
            f"length mismatch: {len(predictions)} predictions vs {len(truth)} truth labels"
        )
    matrix = ConfusionMatrix()
    for pred, true in zip(predictions, truth):
        matrix.add(true, pred)
    return matrix
