"""Temporal label smoothing between the classifier and the engine."""
from __future__ import annotations

from collections import Counter, deque
from typing import Sequence


def majority_vote(window: Sequence[int]) -> int:
    """Most frequent label in the window; ties go to the most recent of the tied."""
    if not window:
        raise ValueError("majority_vote requires a non-empty window")
    counts = Counter(window)
    best = max(counts.values())
    for label in reversed(window):
        if counts[label] == best:
            return label
    raise AssertionError("unreachable")


class MajorityVoteSmoother:
    """Sliding window of the last W argmax labels, reduced by majority vote."""

    def __init__(self, window_size: int = 15):
        if window_size < 1:
            raise ValueError(f"window size must be >= 1, got {window_size}")
        self.window_size = window_size
        self._window: deque[int] = deque(maxlen=window_size)

    def push(self, label: int) -> int:
        self._window.append(label)
        return majority_vote(tuple(self._window))

    def reset(self) -> None:
        self._window.clear()
