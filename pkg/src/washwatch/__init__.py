"""Streaming hand-washing compliance monitoring."""

from .annotations import (
    AnnotationAttributes,
    EpisodeAnnotation,
    agreement,
    merge_annotations,
    movement_durations,
    parse_annotation,
    serialize_annotation,
)
from .classifiers import ClassifierSpec, ClassScores, build_classifier
from .dataset import (
    DatasetManifest,
    DatasetStats,
    ManifestEntry,
    SplitAssignment,
    dataset_stats,
    split_dataset,
)
from .engine import (
    ComplianceConfig,
    Engine,
    EngineSnapshot,
    EngineState,
    EpisodeReport,
    reference_verdict,
)
from .frames import Frame
from .motion import EpisodeSpan, GateParams, GateState, motion_score, segment_episodes, update_gate
from .runner import (
    AnnotationReplaySource,
    FrameStreamSource,
    RunOutcome,
    RunSpec,
    SyntheticSource,
    VideoFileSource,
    batch_evaluate,
    run_episode,
)
from .synthetic import SyntheticEpisodeSpec, generate_synthetic_episode

__version__ = "0.1.0"

__all__ = [
    "AnnotationAttributes",
    "AnnotationReplaySource",
    "ClassifierSpec",
    "ClassScores",
    "ComplianceConfig",
    "DatasetManifest",
    "DatasetStats",
    "Engine",
    "EngineSnapshot",
    "EngineState",
    "EpisodeAnnotation",
    "EpisodeReport",
    "EpisodeSpan",
    "Frame",
    "FrameStreamSource",
    "GateParams",
    "GateState",
    "ManifestEntry",
    "RunOutcome",
    "RunSpec",
    "SplitAssignment",
    "SyntheticEpisodeSpec",
    "SyntheticSource",
    "VideoFileSource",
    "agreement",
    "batch_evaluate",
    "build_classifier",
    "dataset_stats",
    "generate_synthetic_episode",
    "merge_annotations",
    "motion_score",
    "movement_durations",
    "parse_annotation",
    "reference_verdict",
    "run_episode",
    "segment_episodes",
    "serialize_annotation",
    "split_dataset",
    "update_gate",
]
