"""Dataset manifest, summary statistics, and train/validation/test splitting."""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path


class ManifestError(ValueError):
    pass


class SplitError(ValueError):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    episode_id: str
    video_path: str
    annotation_paths: tuple[str, ...]
    frame_count: int = 0
    fps: float = 30.0


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for entry in self.entries:
            if entry.episode_id in seen:
                raise ManifestError(f"duplicate episode_id {entry.episode_id!r}")
            seen.add(entry.episode_id)


@dataclass(frozen=True)
class DatasetStats:
    total_videos: int
    total_annotations: int
    total_annotated_files: int
    annotated_once: int
    annotated_twice: int


def dataset_stats(manifest: DatasetManifest) -> DatasetStats:
    """Count single- and double-annotated entries.

    The identities ``total_annotations = once + 2 * twice`` and
    ``total_annotated_files = once + twice`` hold by construction.
    """
    once = 0
    twice = 0
    for entry in manifest.entries:
        n = len(entry.annotation_paths)
        if n == 1:
            once += 1
        elif n == 2:
            twice += 1
        else:
            raise ManifestError(
                f"entry {entry.episode_id!r} has {n} annotation paths, expected 1 or 2"
            )
    return DatasetStats(
        total_videos=len(manifest.entries),
        total_annotations=once + 2 * twice,
        total_annotated_files=once + twice,
        annotated_once=once,
        annotated_twice=twice,
    )


@dataclass(frozen=True)
class SplitAssignment:
    train: tuple[int, ...]
    validation: tuple[int, ...]
    test: tuple[int, ...]
    seed: int

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (len(self.train), len(self.validation), len(self.test))


DEFAULT_RATIOS = (0.7, 0.2, 0.1)


def split_dataset(
    n_items: int,
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
    seed: int = 0,
) -> SplitAssignment:
    """Partition indices 0..n-1 into train/validation/test.

    Sizes are floor(r_train * n) and floor(r_val * n); the test set takes
    the remainder, so the three sets always cover all indices exactly.
    The permutation is a seeded shuffle, identical for identical seeds.
    """
    if n_items < 0:
        raise SplitError(f"n_items must be >= 0, got {n_items}")
    if len(ratios) != 3:
        raise SplitError(f"expected 3 ratios, got {len(ratios)}")
    if any(r <= 0 for r in ratios):
        raise SplitError(f"ratios must be positive, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise SplitError(f"ratios must sum to 1, got {sum(ratios)}")

    indices = list(range(n_items))
    random.Random(seed).shuffle(indices)
    n_train = math.floor(ratios[0] * n_items)
    n_val = math.floor(ratios[1] * n_items)
    return SplitAssignment(
        train=tuple(indices[:n_train]),
        validation=tuple(indices[n_train : n_train + n_val]),
        test=tuple(indices[n_train + n_val :]),
        seed=seed,
    )


def load_manifest(path: str | Path) -> DatasetManifest:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"malformed manifest: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise ManifestError("manifest must be an object with an 'entries' list")
    entries = []
    for rec in doc["entries"]:
        if not isinstance(rec, dict) or "episode_id" not in rec:
            raise ManifestError(f"manifest entry missing episode_id: {rec!r}")
        paths = rec.get("annotation_paths", [])
        if not isinstance(paths, list) or not all(isinstance(p, str) for p in paths):
            raise ManifestError(f"annotation_paths must be a list of strings: {rec!r}")
        entries.append(
            ManifestEntry(
                episode_id=str(rec["episode_id"]),
                video_path=str(rec.get("video_path", "")),
                annotation_paths=tuple(paths),
                frame_count=int(rec.get("frame_count", 0)),
                fps=float(rec.get("fps", 30.0)),
            )
        )
    return DatasetManifest(entries=entries)


def save_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    doc = {
        "entries": [
            {
                "episode_id": e.episode_id,
                "video_path": e.video_path,
                "annotation_paths": list(e.annotation_paths),
                "frame_count": e.frame_count,
                "fps": e.fps,
            }
            for e in manifest.entries
        ]
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
