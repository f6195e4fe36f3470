"""Command-line client around the core package and the monitor service."""
from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional

import click

from .annotations import AnnotationError, parse_annotation, serialize_annotation
from .classifiers import ClassifierSpec
from .dataset import DEFAULT_RATIOS, dataset_stats, load_manifest, split_dataset
from .engine import ComplianceConfig
from .movements import CODE_INDEX
from .runner import (
    AnnotationReplaySource,
    RunSpec,
    SyntheticSource,
    VideoFileSource,
    batch_evaluate,
    run_episode,
)
from .service.schemas import ConfigModel
from .synthetic import SyntheticEpisodeSpec, generate_annotation

ERROR_EXIT = 3


def _load_config(path: Optional[str]) -> ComplianceConfig:
    if path is None:
        return ComplianceConfig()
    model = ConfigModel.model_validate_json(Path(path).read_text())
    return model.to_config()


def _classifier_spec(kind: str, epsilon: float, constant_code: int,
                     model: Optional[str], input_size: int) -> ClassifierSpec:
    return ClassifierSpec(
        kind=kind,
        input_size=input_size,
        noise_epsilon=epsilon,
        constant_code=constant_code,
        model_path=model,
    )


def _parse_segments(text: str) -> tuple[tuple[int, float], ...]:
    """Parse '2:12,3:8.5' into ((2, 12.0), (3, 8.5))."""
    segments = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        code_str, _, dur_str = part.partition(":")
        try:
            code, duration = int(code_str), float(dur_str)
        except ValueError:
            raise click.BadParameter(f"segment must look like CODE:SECONDS, got {part!r}")
        if code not in CODE_INDEX:
            raise click.BadParameter(f"unknown movement code {code}")
        segments.append((code, duration))
    if not segments:
        raise click.BadParameter("no segments given")
    return tuple(segments)


def _source_from_options(annotation: Optional[str], synthetic: Optional[str],
                         video: Optional[str], fps: float, seed: int,
                         render_frames: bool):
    chosen = [x for x in (annotation, synthetic, video) if x is not None]
    if len(chosen) != 1:
        raise click.UsageError("exactly one of --annotation, --synthetic, --video is required")
    if annotation is not None:
        return AnnotationReplaySource.from_file(annotation)
    if synthetic is not None:
        spec = SyntheticEpisodeSpec(
            segments=_parse_segments(synthetic), fps=fps, seed=seed, render_frames=render_frames
        )
        return SyntheticSource(spec)
    return VideoFileSource(path=video, fps=fps)


source_options = [
    click.option("--annotation", type=click.Path(exists=True), help="Replay a .ann.json label file."),
    click.option("--synthetic", help="Synthetic episode segments, e.g. '2:12,3:8'."),
    click.option("--video", type=click.Path(exists=True), help="Decode a video file."),
    click.option("--fps", default=30.0, show_default=True, help="Frame rate for synthetic/video sources."),
    click.option("--render-frames", is_flag=True, help="Drive the synthetic source through real frames."),
]

classifier_options = [
    click.option("--classifier", "classifier_kind", default="replay", show_default=True,
                 type=click.Choice(["replay", "constant", "external"])),
    click.option("--epsilon", default=0.0, show_default=True, help="Replay label noise rate."),
    click.option("--constant-code", default=0, show_default=True),
    click.option("--model", type=click.Path(exists=True), help="External model module path."),
    click.option("--input-size", default=224, show_default=True),
]


def _apply(options):
    def wrap(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn
    return wrap


@click.group()
def main() -> None:
    """Hand-washing compliance monitor."""


@main.command()
@_apply(source_options)
@_apply(classifier_options)
@click.option("--config", "config_path", type=click.Path(exists=True), help="Compliance config JSON.")
@click.option("--out", "output_dir", type=click.Path(), help="Directory for report.json and stats.csv.")
@click.option("--seed", default=0, show_default=True)
def run(annotation, synthetic, video, fps, render_frames, classifier_kind, epsilon,
        constant_code, model, input_size, config_path, output_dir, seed) -> None:
    """Process one episode and exit 0 (ok), 1 (failed) or 2 (no episode)."""
    try:
        spec = RunSpec(
            source=_source_from_options(annotation, synthetic, video, fps, seed, render_frames),
            classifier=_classifier_spec(classifier_kind, epsilon, constant_code, model, input_size),
            config=_load_config(config_path),
            output_dir=Path(output_dir) if output_dir else None,
            seed=seed,
        )
        outcome = run_episode(spec)
    except (ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(ERROR_EXIT)
    if outcome.report is None:
        click.echo("no episode detected")
    else:
        click.echo(json.dumps(outcome.report.to_dict(), sort_keys=True, indent=2))
    sys.exit(outcome.exit_code)


@main.command()
@_apply(source_options)
@_apply(classifier_options)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--loop", is_flag=True, help="Restart the source after each pass.")
@click.option("--realtime", is_flag=True, help="Pace the source at stream speed.")
@click.option("--seed", default=0, show_default=True)
def serve(annotation, synthetic, video, fps, render_frames, classifier_kind, epsilon,
          constant_code, model, input_size, config_path, host, port, loop, realtime, seed) -> None:
    """Run the monitor service until interrupted."""
    from .service import serve as serve_app

    spec = RunSpec(
        source=_source_from_options(annotation, synthetic, video, fps, seed, render_frames),
        classifier=_classifier_spec(classifier_kind, epsilon, constant_code, model, input_size),
        config=_load_config(config_path),
        seed=seed,
    )
    serve_app(spec, host=host, port=port, loop=loop, realtime=realtime)


@main.command()
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
@_apply(classifier_options)
@click.option("--seed", default=0, show_default=True)
@click.option("--split-by", default="frames", show_default=True,
              type=click.Choice(["frames", "episodes"]),
              help="Hold out individual frames or whole episodes.")
@click.option("--out", "output_path", type=click.Path(), help="Write the confusion matrix CSV here.")
def eval(manifest_path, classifier_kind, epsilon, constant_code, model, input_size,
         seed, split_by, output_path) -> None:
    """Evaluate a classifier on the test split of a manifest."""
    try:
        manifest = load_manifest(manifest_path)
        result = batch_evaluate(
            manifest,
            _classifier_spec(classifier_kind, epsilon, constant_code, model, input_size),
            seed=seed,
            base_dir=Path(manifest_path).parent,
            split_unit=split_by,
        )
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(ERROR_EXIT)
    if output_path:
        Path(output_path).write_text(result.matrix.to_csv())
    click.echo(json.dumps({
        "accuracy": result.accuracy,
        "frames": result.matrix.total,
        "episodes": [
            {"episode_id": e.episode_id, "frames": e.frames_evaluated, "accuracy": e.accuracy}
            for e in result.episodes
        ],
    }, indent=2))


@main.command()
@click.option("--segments", required=True, help="e.g. '2:12,3:8,0:1,4:6'")
@click.option("--fps", default=30.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--episode-id", default="", help="Defaults to a seed-derived id.")
@click.option("--out", "output_path", type=click.Path(), required=True)
def synth(segments, fps, seed, episode_id, output_path) -> None:
    """Generate a synthetic annotation fixture."""
    spec = SyntheticEpisodeSpec(
        segments=_parse_segments(segments), fps=fps, seed=seed, episode_id=episode_id
    )
    annotation = generate_annotation(spec)
    Path(output_path).write_text(serialize_annotation(annotation))
    click.echo(f"wrote {annotation.frame_count} frames to {output_path}")


@main.command()
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
def stats(manifest_path) -> None:
    """Dataset summary statistics from a manifest."""
    try:
        result = dataset_stats(load_manifest(manifest_path))
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(ERROR_EXIT)
    click.echo(json.dumps({
        "total_videos": result.total_videos,
        "total_annotations": result.total_annotations,
        "total_annotated_files": result.total_annotated_files,
        "annotated_once": result.annotated_once,
        "annotated_twice": result.annotated_twice,
    }, indent=2))


@main.command()
@click.option("--n", "n_items", type=int, required=True)
@click.option("--ratios", default="0.7,0.2,0.1", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "output_path", type=click.Path(), help="Write the full assignment JSON here.")
def split(n_items, ratios, seed, output_path) -> None:
    """Deterministic train/validation/test split of n items."""
    try:
        parts = tuple(float(r) for r in ratios.split(","))
        if len(parts) != 3:
            raise ValueError(f"expected 3 ratios, got {len(parts)}")
        assignment = split_dataset(n_items, ratios=parts, seed=seed)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(ERROR_EXIT)
    sizes = assignment.sizes
    click.echo(json.dumps({
        "train": sizes[0], "validation": sizes[1], "test": sizes[2],
        "total": sum(sizes), "seed": seed,
    }, indent=2))
    if output_path:
        Path(output_path).write_text(json.dumps({
            "seed": seed,
            "train": list(assignment.train),
            "validation": list(assignment.validation),
            "test": list(assignment.test),
        }, sort_keys=True) + "\n")


@main.command()
@click.argument("path", type=click.Path(exists=True))
def validate(path) -> None:
    """Check an annotation file and print its per-movement durations."""
    try:
        annotation = parse_annotation(Path(path).read_text())
    except AnnotationError as exc:
        click.echo(f"invalid: {exc}", err=True)
        sys.exit(1)
    from .annotations import movement_durations

    durations = movement_durations(annotation)
    click.echo(json.dumps({
        "episode_id": annotation.episode_id,
        "frames": annotation.frame_count,
        "fps": annotation.fps,
        "durations": {str(int(m)): s for m, s in durations.items() if s > 0},
    }, indent=2))


if __name__ == "__main__":
    main()
