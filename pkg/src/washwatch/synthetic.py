"""Synthetic washing episodes for fixtures and pipeline exercise.

A spec is an ordered list of (movement code, duration) segments realized
as a dense annotation at a given frame rate. Optionally the spec also
renders a crude frame stream: a static textured background during idle
segments and a patch sliding across it during washing segments, so the
motion gate fires on exactly the washing span. The rendering makes no
attempt to look like hands; it exists to drive the gate.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .annotations import AnnotationAttributes, EpisodeAnnotation
from .frames import Frame
from .movements import CODE_INDEX


class SyntheticSpecError(ValueError):
    pass


@dataclass(frozen=True)
class SyntheticEpisodeSpec:
    segments: tuple[tuple[int, float], ...]
    fps: float = 30.0
    seed: int = 0
    render_frames: bool = False
    frame_width: int = 160
    frame_height: int = 120
    episode_id: str = ""
    attributes: AnnotationAttributes = field(default_factory=AnnotationAttributes)

    def __post_init__(self) -> None:
        if self.fps <= 0:
            raise SyntheticSpecError(f"fps must be positive, got {self.fps}")
        for code, duration in self.segments:
            if code not in CODE_INDEX:
                raise SyntheticSpecError(f"unknown movement code {code}")
            if duration <= 0:
                raise SyntheticSpecError(f"segment durations must be positive, got {duration}")
        if self.frame_width < 16 or self.frame_height < 16:
            raise SyntheticSpecError("frames must be at least 16x16")


def generate_annotation(spec: SyntheticEpisodeSpec) -> EpisodeAnnotation:
    labels: list[int] = []
    for code, duration in spec.segments:
        labels.extend([code] * int(round(duration * spec.fps)))
    episode_id = spec.episode_id or f"synthetic-{spec.seed:08d}"
    return EpisodeAnnotation(
        episode_id=episode_id,
        fps=spec.fps,
        frame_count=len(labels),
        labels=labels,
        attributes=spec.attributes,
        annotator_id="synthetic",
    )


BACKGROUND_LEVEL = 32
PATCH_LEVEL = 224
PATCH_STEP_PX = 24


def generate_frames(spec: SyntheticEpisodeSpec, annotation: EpisodeAnnotation) -> Iterator[Frame]:
    """Render one frame per label: static background when idle, moving patch otherwise."""
    rng = np.random.default_rng(spec.seed)
    w, h = spec.frame_width, spec.frame_height
    background = np.full((h, w), BACKGROUND_LEVEL, dtype=np.uint8)
    background += rng.integers(0, 8, size=(h, w), dtype=np.uint8)

    patch_w, patch_h = w // 4, h // 4
    patch = np.full((patch_h, patch_w), PATCH_LEVEL, dtype=np.uint8)
    patch += rng.integers(0, 16, size=(patch_h, patch_w), dtype=np.uint8)
    travel = w - patch_w
    # Keep the per-frame jump large enough to register on the 8x-downsampled
    # motion grid but short of a full sweep, whatever the frame size.
    step_px = max(1, min(PATCH_STEP_PX, travel // 2))
    y0 = (h - patch_h) // 2

    step = 0
    for i, code in enumerate(annotation.labels):
        t = i / spec.fps
        if code == 0:
            yield Frame(background.copy(), t)
            continue
        # Triangle-wave sweep so the patch bounces between the frame edges.
        pos = (step * step_px) % (2 * travel)
        x0 = pos if pos <= travel else 2 * travel - pos
        pixels = background.copy()
        pixels[y0 : y0 + patch_h, x0 : x0 + patch_w] = patch
        yield Frame(pixels, t)
        step += 1


def generate_synthetic_episode(
    spec: SyntheticEpisodeSpec,
) -> tuple[EpisodeAnnotation, Optional[Iterator[Frame]]]:
    annotation = generate_annotation(spec)
    frames = generate_frames(spec, annotation) if spec.render_frames else None
    return annotation, frames
