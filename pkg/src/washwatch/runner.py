"""Wiring: source -> motion gate -> classifier -> smoothing -> engine.

The pipeline buffers observations while the gate is still deciding
whether motion is sustained; once the gate opens it replays the buffer
into the engine so the episode is accounted from the first motion
sample, not from the moment the minimum-duration rule was satisfied.
"""
from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

from .annotations import EpisodeAnnotation, episode_stats_csv, parse_annotation
from .classifiers import ClassifierSpec, build_classifier
from .dataset import DatasetManifest, split_dataset
from .engine import (
    ComplianceConfig,
    Engine,
    EngineEvent,
    EpisodeReport,
    ReportReady,
)
from .frames import Frame
from .metrics import ConfusionMatrix, EvaluationError
from .motion import (
    EpisodeEnded,
    EpisodeStarted,
    GatePhase,
    GateState,
    flush_gate,
    motion_score,
    update_gate,
)
from .smoothing import MajorityVoteSmoother
from .synthetic import SyntheticEpisodeSpec, generate_annotation, generate_frames


class RunError(ValueError):
    pass


@dataclass(frozen=True)
class AnnotationReplaySource:
    annotation: EpisodeAnnotation

    @classmethod
    def from_file(cls, path: str | Path) -> "AnnotationReplaySource":
        return cls(parse_annotation(Path(path).read_text()))


@dataclass(frozen=True)
class SyntheticSource:
    spec: SyntheticEpisodeSpec


@dataclass(frozen=True)
class FrameStreamSource:
    frames: Iterable[Frame]
    annotation: Optional[EpisodeAnnotation] = None


@dataclass(frozen=True)
class VideoFileSource:
    path: str
    fps: float = 30.0


RunSource = Union[AnnotationReplaySource, SyntheticSource, FrameStreamSource, VideoFileSource]


@dataclass(frozen=True)
class RunSpec:
    source: RunSource
    classifier: ClassifierSpec = ClassifierSpec()
    config: ComplianceConfig = ComplianceConfig()
    output_dir: Optional[Path] = None
    seed: int = 0


@dataclass(frozen=True)
class Sample:
    """One pipeline step: a motion score plus the frame it came from."""

    t: float
    score: float
    frame: Optional[Frame]
    frame_index: int


class EpisodePipeline:
    """Single-stream consumer; feed samples in timestamp order."""

    def __init__(self, config: ComplianceConfig, classifier):
        self.config = config
        self.classifier = classifier
        self.engine = Engine(config)
        self.smoother = MajorityVoteSmoother(config.smoothing_window)
        self.gate_state = GateState()
        self.reports: list[EpisodeReport] = []
        self._pending: list[tuple[float, int]] = []
        self._last_t: Optional[float] = None

    @property
    def last_t(self) -> Optional[float]:
        return self._last_t

    def feed(self, sample: Sample) -> list[EngineEvent]:
        prev_phase = self.gate_state.phase
        self.gate_state, gate_event = update_gate(
            self.gate_state, sample.score, sample.t, self.config.gate
        )
        self._last_t = sample.t
        phase = self.gate_state.phase
        events: list[EngineEvent] = []

        if phase is GatePhase.QUIET:
            self._pending.clear()
            if isinstance(gate_event, EpisodeEnded):
                events.extend(self.engine.tick(False, 0, sample.t))
            self._collect(events)
            return events

        if prev_phase is GatePhase.QUIET:
            # Fresh motion: the smoothing window must not leak labels
            # across episodes.
            self.smoother.reset()
            self._pending.clear()

        label = self.smoother.push(
            self.classifier.classify(sample.frame, sample.frame_index).top_code()
        )

        if isinstance(gate_event, EpisodeStarted):
            self._pending.append((sample.t, label))
            for t, buffered_label in self._pending:
                events.extend(self.engine.tick(True, buffered_label, t))
            self._pending.clear()
        elif phase is GatePhase.MOTION_PENDING:
            self._pending.append((sample.t, label))
        else:
            events.extend(self.engine.tick(True, label, sample.t))

        self._collect(events)
        return events

    def finish(self) -> list[EngineEvent]:
        """End of stream: flush the gate and close any open episode."""
        self.gate_state, gate_event = flush_gate(self.gate_state)
        self._pending.clear()
        events: list[EngineEvent] = []
        if isinstance(gate_event, EpisodeEnded) and self._last_t is not None:
            events.extend(self.engine.finalize_events(self._last_t))
        self._collect(events)
        return events

    def _collect(self, events: list[EngineEvent]) -> None:
        self.reports.extend(e.report for e in events if isinstance(e, ReportReady))


def _samples_from_labels(annotation: EpisodeAnnotation) -> Iterator[Sample]:
    for i, code in enumerate(annotation.labels):
        yield Sample(t=i / annotation.fps, score=1.0 if code != 0 else 0.0, frame=None, frame_index=i)


def _samples_from_frames(frames: Iterable[Frame]) -> Iterator[Sample]:
    prev: Optional[Frame] = None
    for index, frame in enumerate(frames):
        if prev is not None:
            yield Sample(
                t=frame.timestamp,
                score=motion_score(prev, frame),
                frame=frame,
                frame_index=index,
            )
        prev = frame


def _decode_video(path: str, fallback_fps: float) -> Iterator[Frame]:
    # Thin adapter over OpenCV; deliberately outside the tested surface.
    try:
        import cv2
    except ImportError as exc:  # pragma: no cover
        raise RunError("video decoding requires opencv-python") from exc
    capture = cv2.VideoCapture(path)
    if not capture.isOpened():
        raise RunError(f"cannot open video file {path}")
    fps = capture.get(cv2.CAP_PROP_FPS) or fallback_fps
    index = 0
    while True:
        got, bgr = capture.read()
        if not got:
            break
        rgb = bgr[:, :, ::-1].copy()
        yield Frame(rgb, index / fps)
        index += 1
    capture.release()


def build_pipeline_inputs(spec: RunSpec) -> tuple[Iterator[Sample], Optional[EpisodeAnnotation]]:
    """Resolve a RunSpec into a sample stream plus replay ground truth."""
    source = spec.source
    if isinstance(source, AnnotationReplaySource):
        return _samples_from_labels(source.annotation), source.annotation
    if isinstance(source, SyntheticSource):
        annotation = generate_annotation(source.spec)
        if source.spec.render_frames:
            return _samples_from_frames(generate_frames(source.spec, annotation)), annotation
        return _samples_from_labels(annotation), annotation
    if isinstance(source, FrameStreamSource):
        return _samples_from_frames(source.frames), source.annotation
    if isinstance(source, VideoFileSource):
        return _samples_from_frames(_decode_video(source.path, source.fps)), None
    raise RunError(f"unknown source type {type(source).__name__}")


@dataclass(frozen=True)
class RunOutcome:
    status: str  # "ok" | "failed" | "no_episode"
    report: Optional[EpisodeReport]
    report_path: Optional[Path] = None
    stats_path: Optional[Path] = None

    EXIT_CODES = {"ok": 0, "failed": 1, "no_episode": 2}

    @property
    def exit_code(self) -> int:
        return self.EXIT_CODES[self.status]


def run_episode(spec: RunSpec) -> RunOutcome:
    """Drive the source through the pipeline and report the first episode."""
    samples, annotation = build_pipeline_inputs(spec)
    classifier = build_classifier(spec.classifier, annotation=annotation, seed=spec.seed)
    pipeline = EpisodePipeline(spec.config, classifier)

    for sample in samples:
        pipeline.feed(sample)
        if pipeline.reports:
            break
    if not pipeline.reports:
        pipeline.finish()
    if not pipeline.reports:
        return RunOutcome(status="no_episode", report=None)

    report = pipeline.reports[0]
    report_path = stats_path = None
    if spec.output_dir is not None:
        report_path, stats_path = write_outputs(report, annotation, spec.output_dir)
    return RunOutcome(
        status=report.verdict,
        report=report,
        report_path=report_path,
        stats_path=stats_path,
    )


def write_outputs(
    report: EpisodeReport,
    annotation: Optional[EpisodeAnnotation],
    output_dir: str | Path,
) -> tuple[Path, Path]:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = report.to_dict()
    if annotation is not None:
        doc["episode_id"] = annotation.episode_id
    report_path = out / "report.json"
    report_path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    stats_path = out / "stats.csv"
    if annotation is not None:
        stats_path.write_text(episode_stats_csv(annotation))
    else:
        stats_path.write_text(_stats_from_report(report))
    return report_path, stats_path


def _stats_from_report(report: EpisodeReport) -> str:
    lines = ["episode_id,movement_code,frames,seconds"]
    for code in sorted(report.durations):
        seconds = report.durations[code]
        if seconds > 0:
            lines.append(f"episode,{code},,{seconds}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EpisodeEvaluation:
    episode_id: str
    frames_evaluated: int
    accuracy: float


@dataclass(frozen=True)
class BatchEvaluation:
    matrix: ConfusionMatrix
    episodes: list[EpisodeEvaluation] = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return self.matrix.accuracy


def batch_evaluate(
    manifest: DatasetManifest,
    classifier_spec: ClassifierSpec,
    annotations: Optional[dict[str, EpisodeAnnotation]] = None,
    ratios: tuple[float, float, float] = (0.7, 0.2, 0.1),
    seed: int = 0,
    base_dir: Optional[Path] = None,
    split_unit: str = "frames",
) -> BatchEvaluation:
    """Per-frame evaluation over the test split of a manifest.

    By default the split pools all frames across all episodes and scores
    the shuffled test share. ``split_unit="episodes"`` instead holds out
    whole episodes, which avoids near-duplicate-frame leakage between the
    splits. Label-driven classifiers only (replay or constant); the first
    annotation path of each entry is the ground truth.
    """
    if classifier_spec.kind == "external":
        raise EvaluationError("batch evaluation is label-driven; external classifiers need frames")
    if split_unit not in ("frames", "episodes"):
        raise EvaluationError(f"split_unit must be 'frames' or 'episodes', got {split_unit!r}")

    loaded: list[EpisodeAnnotation] = []
    for entry in manifest.entries:
        if annotations is not None and entry.episode_id in annotations:
            loaded.append(annotations[entry.episode_id])
            continue
        if not entry.annotation_paths:
            raise EvaluationError(f"entry {entry.episode_id!r} has no annotation paths")
        path = Path(entry.annotation_paths[0])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            loaded.append(parse_annotation(path.read_text()))
        except OSError as exc:
            raise EvaluationError(f"cannot read annotation {path}: {exc}") from exc

    test_by_episode: dict[int, list[int]] = {}
    if split_unit == "episodes":
        assignment = split_dataset(len(loaded), ratios=ratios, seed=seed)
        for episode_idx in sorted(assignment.test):
            test_by_episode[episode_idx] = list(range(loaded[episode_idx].frame_count))
    else:
        offsets: list[int] = []
        total_frames = 0
        for annotation in loaded:
            offsets.append(total_frames)
            total_frames += annotation.frame_count
        assignment = split_dataset(total_frames, ratios=ratios, seed=seed)
        for global_index in sorted(assignment.test):
            episode_idx = _locate(offsets, global_index)
            test_by_episode.setdefault(episode_idx, []).append(global_index - offsets[episode_idx])

    matrix = ConfusionMatrix()
    episodes: list[EpisodeEvaluation] = []
    for episode_idx in sorted(test_by_episode):
        annotation = loaded[episode_idx]
        classifier = build_classifier(
            classifier_spec, annotation=annotation, seed=seed + episode_idx
        )
        truths: list[int] = []
        preds: list[int] = []
        for frame_index in test_by_episode[episode_idx]:
            truths.append(annotation.labels[frame_index])
            preds.append(classifier.classify(None, frame_index).top_code())
        episode_matrix = ConfusionMatrix()
        for true, pred in zip(truths, preds):
            episode_matrix.add(true, pred)
        matrix = matrix.merge(episode_matrix)
        episodes.append(
            EpisodeEvaluation(
                episode_id=annotation.episode_id,
                frames_evaluated=len(truths),
                accuracy=episode_matrix.accuracy,
            )
        )
    return BatchEvaluation(matrix=matrix, episodes=episodes)


def _locate(offsets: list[int], global_index: int) -> int:
    return bisect.bisect_right(offsets, global_index) - 1
