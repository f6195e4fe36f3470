"""The pluggable per-frame classifier boundary.

Three implementations share one call contract (frame in, 8-class score
vector out):

* ``replay`` reads ground-truth labels from an annotation and corrupts
  them with a configurable noise rate epsilon, standing in for a trained
  network of comparable accuracy;
* ``constant`` always answers with one fixed class (a degenerate
  baseline);
* ``external`` loads a user-supplied model module and forwards
  preprocessed frames through it.
"""
from __future__ import annotations

import importlib.util
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .annotations import EpisodeAnnotation
from .frames import Frame
from .movements import CODE_INDEX, CODE_ORDER, NUM_CLASSES
from .preprocess import preprocess

SCORE_SUM_TOLERANCE = 1e-6


class ClassifierError(ValueError):
    pass


class ClassifierLoadError(ClassifierError):
    pass


@dataclass(frozen=True)
class ClassScores:
    """Non-negative per-class confidences in canonical code order, summing to 1."""

    scores: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.scores) != NUM_CLASSES:
            raise ClassifierError(f"expected {NUM_CLASSES} scores, got {len(self.scores)}")
        if any(s < 0 for s in self.scores):
            raise ClassifierError(f"scores must be non-negative: {self.scores}")
        if abs(sum(self.scores) - 1.0) > SCORE_SUM_TOLERANCE:
            raise ClassifierError(f"scores must sum to 1, got {sum(self.scores)}")

    @classmethod
    def one_hot(cls, code: int) -> "ClassScores":
        if code not in CODE_INDEX:
            raise ClassifierError(f"unknown movement code {code}")
        scores = [0.0] * NUM_CLASSES
        scores[CODE_INDEX[code]] = 1.0
        return cls(tuple(scores))

    def top_code(self) -> int:
        """Most confident class; ties resolve to the earliest canonical code."""
        best = max(range(NUM_CLASSES), key=lambda i: (self.scores[i], -i))
        return CODE_ORDER[best]


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str = "replay"  # replay | constant | external
    input_size: int = 224
    noise_epsilon: float = 0.0
    constant_code: int = 0
    model_path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in ("replay", "constant", "external"):
            raise ClassifierError(f"unknown classifier kind {self.kind!r}")
        if self.input_size <= 0:
            raise ClassifierError(f"input_size must be positive, got {self.input_size}")
        if not 0.0 <= self.noise_epsilon <= 1.0:
            raise ClassifierError(f"noise_epsilon must be in [0, 1], got {self.noise_epsilon}")
        if self.constant_code not in CODE_INDEX:
            raise ClassifierError(f"unknown movement code {self.constant_code}")
        if self.kind == "external" and not self.model_path:
            raise ClassifierError("external classifier requires model_path")


class ReplayClassifier:
    """Ground-truth oracle with injectable label noise.

    With probability 1 - epsilon the true label is returned one-hot;
    otherwise a uniformly chosen wrong label is. Deterministic for a
    given seed and call sequence.
    """

    def __init__(self, annotation: EpisodeAnnotation, epsilon: float = 0.0, seed: int = 0):
        if not 0.0 <= epsilon <= 1.0:
            raise ClassifierError(f"epsilon must be in [0, 1], got {epsilon}")
        self.annotation = annotation
        self.epsilon = epsilon
        self._rng = random.Random(seed)

    def classify(self, frame: Optional[Frame], frame_index: int) -> ClassScores:
        labels = self.annotation.labels
        if not 0 <= frame_index < len(labels):
            raise ClassifierError(
                f"frame index {frame_index} out of range [0, {len(labels)})"
            )
        true_code = labels[frame_index]
        if self.epsilon > 0.0 and self._rng.random() < self.epsilon:
            wrong = [c for c in CODE_ORDER if c != true_code]
            return ClassScores.one_hot(self._rng.choice(wrong))
        return ClassScores.one_hot(true_code)


class ConstantClassifier:
    def __init__(self, code: int = 0):
        self._scores = ClassScores.one_hot(code)

    def classify(self, frame: Optional[Frame], frame_index: int) -> ClassScores:
        return self._scores


class ExternalClassifier:
    """Adapter around a serialized model exposing ``predict(image) -> 8 scores``.

    The model is a Python module; its ``predict`` receives the frame
    preprocessed to ``input_size`` as an (s, s, 3) uint8 array and must
    return 8 non-negative scores in canonical code order. The returned
    vector is normalized here.
    """

    def __init__(self, model_path: str, input_size: int = 224):
        path = Path(model_path)
        if not path.is_file():
            raise ClassifierLoadError(f"model file not found: {model_path}")
        spec = importlib.util.spec_from_file_location(f"washwatch_model_{path.stem}", path)
        if spec is None or spec.loader is None:
            raise ClassifierLoadError(f"cannot load model module from {model_path}")
        module = importlib.util.module_from_spec(spec)
        try:
            spec.loader.exec_module(module)
        except Exception as exc:
            raise ClassifierLoadError(f"error importing model {model_path}: {exc}") from exc
        if not callable(getattr(module, "predict", None)):
            raise ClassifierLoadError(f"model {model_path} does not define predict()")
        self._predict = module.predict
        self.input_size = input_size

    def classify(self, frame: Optional[Frame], frame_index: int) -> ClassScores:
        if frame is None:
            raise ClassifierError("external classifier requires frame data")
        prepared = preprocess(frame, self.input_size)
        raw = np.asarray(self._predict(prepared.pixels), dtype=np.float64).reshape(-1)
        if raw.shape[0] != NUM_CLASSES:
            raise ClassifierError(f"model returned {raw.shape[0]} scores, expected {NUM_CLASSES}")
        if np.any(raw < 0) or not np.all(np.isfinite(raw)):
            raise ClassifierError(f"model scores must be finite and non-negative: {raw}")
        total = float(raw.sum())
        if total <= 0:
            raise ClassifierError("model scores sum to zero")
        return ClassScores(tuple(float(s) for s in raw / total))


def build_classifier(
    spec: ClassifierSpec,
    annotation: Optional[EpisodeAnnotation] = None,
    seed: int = 0,
):
    if spec.kind == "replay":
        if annotation is None:
            raise ClassifierError("replay classifier requires a ground-truth annotation")
        return ReplayClassifier(annotation, epsilon=spec.noise_epsilon, seed=seed)
    if spec.kind == "constant":
        return ConstantClassifier(spec.constant_code)
    return ExternalClassifier(spec.model_path, input_size=spec.input_size)
