"""Per-episode annotation model and its on-disk format.

An :class:`EpisodeAnnotation` is the unit of ground truth: a dense
per-frame label track plus per-episode attribute flags (ring, watch,
lacquered nails) describing the person washing. On disk an annotation
is a JSON document whose label track is run-length encoded as
``[{start_frame, end_frame, code}, ...]`` with ``end_frame`` exclusive;
the runs must tile ``[0, frame_count)`` with no gaps or overlaps, so
idle stretches are stored explicitly as code-0 runs. Serialization is
canonical (sorted keys, runs sorted by start frame), which makes the
parse/serialize pair a bit-exact round trip.
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field, replace
from typing import Iterator, Literal

from .movements import MovementClass, UnknownMovementError

FORMAT_VERSION = 1


class AnnotationError(ValueError):
    """Base for anything wrong with an annotation or its encoding."""


class AnnotationParseError(AnnotationError):
    """Malformed annotation text (syntax level)."""


class AnnotationValidationError(AnnotationError):
    """Well-formed text that violates the annotation contract."""


class IncompatibleAnnotationsError(AnnotationError):
    """Two annotations that cannot be merged or compared."""


class UndefinedAgreementError(AnnotationError):
    """Agreement requested over zero frames."""


@dataclass(frozen=True)
class AnnotationAttributes:
    ring: bool = False
    watch: bool = False
    lacquered_nails: bool = False

    def union(self, other: "AnnotationAttributes") -> "AnnotationAttributes":
        return AnnotationAttributes(
            ring=self.ring or other.ring,
            watch=self.watch or other.watch,
            lacquered_nails=self.lacquered_nails or other.lacquered_nails,
        )


@dataclass(frozen=True)
class FrameLabel:
    frame_index: int
    movement: MovementClass


@dataclass
class EpisodeAnnotation:
    """Dense frame-label track for one washing episode.

    ``labels`` holds one movement code per frame index; its length must
    equal ``frame_count``. Unlabeled frames carry code 0 explicitly.
    """

    episode_id: str
    fps: float
    frame_count: int
    labels: list[int]
    attributes: AnnotationAttributes = field(default_factory=AnnotationAttributes)
    annotator_id: str = ""

    def __post_init__(self) -> None:
        if self.fps <= 0:
            raise AnnotationValidationError(f"fps must be positive, got {self.fps}")
        if self.frame_count < 0:
            raise AnnotationValidationError(f"frame_count must be >= 0, got {self.frame_count}")
        if len(self.labels) != self.frame_count:
            raise AnnotationValidationError(
                f"label track has {len(self.labels)} frames, expected {self.frame_count}"
            )
        for code in set(self.labels):
            try:
                MovementClass.from_code(code)
            except UnknownMovementError as exc:
                raise AnnotationValidationError(str(exc)) from None

    def frame_labels(self) -> Iterator[FrameLabel]:
        for i, code in enumerate(self.labels):
            yield FrameLabel(i, MovementClass(code))

    def runs(self) -> list[tuple[int, int, int]]:
        """Run-length encoding of the track as (start, end_exclusive, code)."""
        out: list[tuple[int, int, int]] = []
        start = 0
        for i in range(1, self.frame_count + 1):
            if i == self.frame_count or self.labels[i] != self.labels[start]:
                out.append((start, i, self.labels[start]))
                start = i
        return out

    @property
    def duration_s(self) -> float:
        return self.frame_count / self.fps


def parse_annotation(text: str) -> EpisodeAnnotation:
    """Parse annotation-file content into a dense track.

    Raises :class:`AnnotationParseError` with line/column on malformed
    syntax and :class:`AnnotationValidationError` on schema violations
    (unknown movement codes, gaps or overlaps in the run track).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AnnotationParseError(
            f"malformed annotation: {exc.msg} at line {exc.lineno}, column {exc.colno}"
        ) from exc
    if not isinstance(doc, dict):
        raise AnnotationValidationError("annotation document must be a JSON object")

    missing = [k for k in ("episode_id", "fps", "frame_count", "runs") if k not in doc]
    if missing:
        raise AnnotationValidationError(f"missing required fields: {', '.join(missing)}")

    episode_id = doc["episode_id"]
    fps = doc["fps"]
    frame_count = doc["frame_count"]
    if not isinstance(episode_id, str):
        raise AnnotationValidationError("episode_id must be a string")
    if not isinstance(fps, (int, float)) or isinstance(fps, bool) or fps <= 0:
        raise AnnotationValidationError(f"fps must be a positive number, got {fps!r}")
    if not isinstance(frame_count, int) or isinstance(frame_count, bool) or frame_count < 0:
        raise AnnotationValidationError(f"frame_count must be a non-negative integer, got {frame_count!r}")

    attrs_doc = doc.get("attributes", {})
    if not isinstance(attrs_doc, dict):
        raise AnnotationValidationError("attributes must be an object")
    unknown = set(attrs_doc) - {"ring", "watch", "lacquered_nails"}
    if unknown:
        raise AnnotationValidationError(f"unknown attribute flags: {sorted(unknown)}")
    attributes = AnnotationAttributes(
        ring=bool(attrs_doc.get("ring", False)),
        watch=bool(attrs_doc.get("watch", False)),
        lacquered_nails=bool(attrs_doc.get("lacquered_nails", False)),
    )

    runs = doc["runs"]
    if not isinstance(runs, list):
        raise AnnotationValidationError("runs must be a list")
    parsed: list[tuple[int, int, int]] = []
    for run in runs:
        if not isinstance(run, dict) or not {"start_frame", "end_frame", "code"} <= set(run):
            raise AnnotationValidationError(f"run must have start_frame, end_frame and code: {run!r}")
        start, end, code = run["start_frame"], run["end_frame"], run["code"]
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (start, end, code)):
            raise AnnotationValidationError(f"run fields must be integers: {run!r}")
        if not 0 <= start < end:
            raise AnnotationValidationError(f"run [{start}, {end}) is empty or negative")
        try:
            MovementClass.from_code(code)
        except UnknownMovementError as exc:
            raise AnnotationValidationError(str(exc)) from None
        parsed.append((start, end, code))

    parsed.sort(key=lambda r: r[0])
    labels = [0] * frame_count
    cursor = 0
    for start, end, code in parsed:
        if start > cursor:
            raise AnnotationValidationError(
                f"gap in label track: frames [{cursor}, {start}) are uncovered"
            )
        if start < cursor:
            raise AnnotationValidationError(
                f"overlapping runs at frame {start} (previous run ends at {cursor})"
            )
        if end > frame_count:
            raise AnnotationValidationError(
                f"run [{start}, {end}) extends past frame_count {frame_count}"
            )
        labels[start:end] = [code] * (end - start)
        cursor = end
    if cursor != frame_count:
        raise AnnotationValidationError(
            f"gap in label track: frames [{cursor}, {frame_count}) are uncovered"
        )

    return EpisodeAnnotation(
        episode_id=episode_id,
        fps=float(fps),
        frame_count=frame_count,
        labels=labels,
        attributes=attributes,
        annotator_id=str(doc.get("annotator_id", "")),
    )


def serialize_annotation(annotation: EpisodeAnnotation) -> str:
    """Canonical text form; ``parse_annotation`` inverts it exactly."""
    doc = {
        "version": FORMAT_VERSION,
        "episode_id": annotation.episode_id,
        "fps": annotation.fps,
        "frame_count": annotation.frame_count,
        "annotator_id": annotation.annotator_id,
        "attributes": {
            "ring": annotation.attributes.ring,
            "watch": annotation.attributes.watch,
            "lacquered_nails": annotation.attributes.lacquered_nails,
        },
        "runs": [
            {"start_frame": start, "end_frame": end, "code": code}
            for start, end, code in annotation.runs()
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def movement_durations(annotation: EpisodeAnnotation) -> dict[MovementClass, float]:
    """Seconds spent in each movement class, idle included.

    Every class appears in the result; classes absent from the track map
    to 0.0. Per class the value is frame count divided by fps, so the
    durations sum to frame_count / fps.
    """
    counts = movement_frame_counts(annotation)
    return {m: counts[m] / annotation.fps for m in counts}


def movement_frame_counts(annotation: EpisodeAnnotation) -> dict[MovementClass, int]:
    counts = {m: 0 for m in MovementClass}
    for code in annotation.labels:
        counts[MovementClass(code)] += 1
    return counts


MergePolicy = Literal["intersect", "prefer_first"]


def _require_compatible(a: EpisodeAnnotation, b: EpisodeAnnotation) -> None:
    if a.episode_id != b.episode_id:
        raise IncompatibleAnnotationsError(
            f"episode ids differ: {a.episode_id!r} vs {b.episode_id!r}"
        )
    if a.frame_count != b.frame_count:
        raise IncompatibleAnnotationsError(
            f"frame counts differ: {a.frame_count} vs {b.frame_count}"
        )
    if a.fps != b.fps:
        raise IncompatibleAnnotationsError(f"fps differ: {a.fps} vs {b.fps}")


def merge_annotations(
    a: EpisodeAnnotation, b: EpisodeAnnotation, policy: MergePolicy = "intersect"
) -> EpisodeAnnotation:
    """Combine two annotators' tracks for the same episode.

    ``intersect`` keeps frames where both agree and maps disagreements to
    code 0 (the track stays dense); ``prefer_first`` keeps ``a``'s track.
    Attribute flags are OR-ed either way.
    """
    _require_compatible(a, b)
    if policy == "intersect":
        labels = [la if la == lb else 0 for la, lb in zip(a.labels, b.labels)]
    elif policy == "prefer_first":
        labels = list(a.labels)
    else:
        raise ValueError(f"unknown merge policy {policy!r}")
    annotator = a.annotator_id if a.annotator_id == b.annotator_id else f"{a.annotator_id}+{b.annotator_id}"
    return replace(
        a,
        labels=labels,
        attributes=a.attributes.union(b.attributes),
        annotator_id=annotator,
    )


@dataclass(frozen=True)
class AgreementResult:
    percent: float
    kappa: float


def agreement(a: EpisodeAnnotation, b: EpisodeAnnotation) -> AgreementResult:
    """Inter-annotator agreement: raw percent plus chance-corrected kappa.

    kappa = (p_o - p_e) / (1 - p_e) with the expected agreement p_e taken
    from the two tracks' marginal label distributions. Symmetric in its
    arguments. Undefined for empty tracks.
    """
    _require_compatible(a, b)
    n = a.frame_count
    if n == 0:
        raise UndefinedAgreementError("agreement is undefined for zero-frame annotations")

    matches = sum(1 for la, lb in zip(a.labels, b.labels) if la == lb)
    p_o = matches / n

    counts_a: dict[int, int] = {}
    counts_b: dict[int, int] = {}
    for la, lb in zip(a.labels, b.labels):
        counts_a[la] = counts_a.get(la, 0) + 1
        counts_b[lb] = counts_b.get(lb, 0) + 1
    p_e = sum(counts_a.get(code, 0) * counts_b.get(code, 0) for code in counts_a) / (n * n)

    if p_e == 1.0:
        # Both tracks are constant and identical; observed agreement is total.
        kappa = 1.0
    else:
        kappa = (p_o - p_e) / (1.0 - p_e)
    return AgreementResult(percent=p_o, kappa=kappa)


STATS_CSV_HEADER = "episode_id,movement_code,frames,seconds"


def episode_stats_csv(annotation: EpisodeAnnotation) -> str:
    """Per-episode statistics table, one row per movement present."""
    buf = io.StringIO()
    buf.write(STATS_CSV_HEADER + "\n")
    counts = movement_frame_counts(annotation)
    for movement in sorted(counts, key=int):
        if counts[movement] == 0:
            continue
        seconds = counts[movement] / annotation.fps
        buf.write(f"{annotation.episode_id},{int(movement)},{counts[movement]},{seconds}\n")
    return buf.getvalue()
