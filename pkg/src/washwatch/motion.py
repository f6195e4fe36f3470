"""Motion scoring and the episode gate.

The gate implements the capture rule: an episode opens only once motion
has been sustained for longer than a minimum duration (10 s by default),
and closes after a quiet stretch longer than the gap tolerance. Between
the on and off thresholds the gate is hysteretic so a flickering score
does not chop episodes apart.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional, Union

import numpy as np

from .frames import Frame, luminance

DOWNSAMPLE_FACTOR = 8


class MotionError(ValueError):
    pass


class NonMonotoneTimestampError(MotionError):
    pass


def _box_downsample(plane: np.ndarray, factor: int = DOWNSAMPLE_FACTOR) -> np.ndarray:
    h, w = plane.shape
    if h < factor or w < factor:
        return plane
    h_crop, w_crop = h - h % factor, w - w % factor
    cropped = plane[:h_crop, :w_crop]
    return cropped.reshape(h_crop // factor, factor, w_crop // factor, factor).mean(axis=(1, 3))


def motion_score(prev: Frame, cur: Frame) -> float:
    """Mean absolute luminance difference on a downsampled grid, in [0, 1]."""
    if (prev.height, prev.width, prev.channels) != (cur.height, cur.width, cur.channels):
        raise MotionError(
            f"frame dimensions differ: {prev.height}x{prev.width}x{prev.channels}"
            f" vs {cur.height}x{cur.width}x{cur.channels}"
        )
    a = _box_downsample(luminance(prev))
    b = _box_downsample(luminance(cur))
    return float(np.mean(np.abs(a - b)) / 255.0)


@dataclass(frozen=True)
class GateParams:
    on_threshold: float = 0.02
    off_threshold: float = 0.01
    min_duration_s: float = 10.0
    max_gap_s: float = 2.0

    def __post_init__(self) -> None:
        if self.on_threshold < self.off_threshold:
            raise MotionError(
                f"on_threshold {self.on_threshold} must be >= off_threshold {self.off_threshold}"
            )
        if self.min_duration_s <= 0 or self.max_gap_s < 0:
            raise MotionError("min_duration_s must be > 0 and max_gap_s >= 0")


class GatePhase(Enum):
    QUIET = "quiet"
    MOTION_PENDING = "motion_pending"
    RECORDING = "recording"


@dataclass(frozen=True)
class GateState:
    phase: GatePhase = GatePhase.QUIET
    motion_start: Optional[float] = None
    last_motion: Optional[float] = None
    last_t: Optional[float] = None


@dataclass(frozen=True)
class EpisodeSpan:
    start: float
    end: float


@dataclass(frozen=True)
class EpisodeStarted:
    start: float


@dataclass(frozen=True)
class EpisodeEnded:
    span: EpisodeSpan


GateEvent = Union[EpisodeStarted, EpisodeEnded]


def update_gate(
    state: GateState, score: float, t: float, params: GateParams = GateParams()
) -> tuple[GateState, Optional[GateEvent]]:
    """Advance the gate by one motion sample.

    Timestamps must be strictly increasing. Returns the new state plus an
    EpisodeStarted or EpisodeEnded event when a boundary is crossed.
    """
    if state.last_t is not None and t <= state.last_t:
        raise NonMonotoneTimestampError(f"timestamp {t} not after previous {state.last_t}")

    if state.phase is GatePhase.QUIET:
        if score >= params.on_threshold:
            return replace(state, phase=GatePhase.MOTION_PENDING, motion_start=t, last_motion=t, last_t=t), None
        return replace(state, last_t=t), None

    # In pending/recording the lower threshold keeps motion alive (hysteresis).
    if score >= params.off_threshold:
        new = replace(state, last_motion=t, last_t=t)
        if state.phase is GatePhase.MOTION_PENDING and t - state.motion_start > params.min_duration_s:
            return replace(new, phase=GatePhase.RECORDING), EpisodeStarted(start=state.motion_start)
        return new, None

    # Quiet sample: tolerate it until the gap budget runs out.
    if t - state.last_motion <= params.max_gap_s:
        return replace(state, last_t=t), None
    if state.phase is GatePhase.RECORDING:
        span = EpisodeSpan(start=state.motion_start, end=state.last_motion)
        return GateState(last_t=t), EpisodeEnded(span=span)
    return GateState(last_t=t), None


def flush_gate(state: GateState) -> tuple[GateState, Optional[GateEvent]]:
    """Close an open recording at end of stream."""
    if state.phase is GatePhase.RECORDING:
        span = EpisodeSpan(start=state.motion_start, end=state.last_motion)
        return GateState(last_t=state.last_t), EpisodeEnded(span=span)
    return GateState(last_t=state.last_t), None


def segment_episodes(
    scores: Iterable[tuple[float, float]], params: GateParams = GateParams()
) -> list[EpisodeSpan]:
    """Batch form of the gate: fold update_gate, then flush."""
    state = GateState()
    spans: list[EpisodeSpan] = []
    for t, score in scores:
        state, event = update_gate(state, score, t, params)
        if isinstance(event, EpisodeEnded):
            spans.append(event.span)
    _, event = flush_gate(state)
    if isinstance(event, EpisodeEnded):
        spans.append(event.span)
    return spans
