import random

import pytest

from washwatch.annotations import AnnotationAttributes, EpisodeAnnotation
from washwatch.engine import ComplianceConfig
from washwatch.movements import CODE_ORDER, WASHING_CODES
from washwatch.synthetic import SyntheticEpisodeSpec


def make_annotation(labels, fps=30.0, episode_id="ep", annotator_id="a1", **attrs):
    return EpisodeAnnotation(
        episode_id=episode_id,
        fps=fps,
        frame_count=len(labels),
        labels=list(labels),
        attributes=AnnotationAttributes(**attrs),
        annotator_id=annotator_id,
    )


def random_labels(rng: random.Random, n: int) -> list[int]:
    return [rng.choice(CODE_ORDER) for _ in range(n)]


def random_compliance_scenario(rng: random.Random, index: int = 0):
    """A randomized synthetic episode plus a config it clearly passes or fails.

    Margins are deliberately wide (>= 1.5 s past every threshold, segments
    longer than the smoothing window) so the expected verdict is insensitive
    to the label lag the majority-vote smoother introduces at segment
    boundaries.
    """
    required = rng.sample(WASHING_CODES, k=rng.randrange(2, 5))
    cfg = ComplianceConfig(
        total_duration_s=12.0,
        required_movements=frozenset(required),
        per_movement_min_s={code: 2.0 for code in required},
        smoothing_window=15,
    )
    fillers = [c for c in WASHING_CODES if c not in required]
    mode = rng.choice(["ok", "missing", "short"])

    body: list[tuple[int, float]] = []
    if mode == "ok":
        body += [(code, rng.uniform(4.0, 6.0)) for code in required]
        body.append((rng.choice(fillers), rng.uniform(8.0, 10.0)))
        body.append((rng.choice(fillers), rng.uniform(3.0, 4.0)))
    elif mode == "missing":
        # The first required movement never occurs at all.
        body += [(code, rng.uniform(4.0, 6.0)) for code in required[1:]]
        body.append((rng.choice(fillers), rng.uniform(8.0, 10.0)))
    else:  # short: every required movement at least 0.8 s under its minimum
        body += [(code, rng.uniform(1.0, 1.2)) for code in required]
        # Long filler keeps the washing span well past the 10 s motion rule.
        body.append((rng.choice(fillers), rng.uniform(10.5, 12.0)))
    rng.shuffle(body)

    segments: list[tuple[int, float]] = []
    if rng.random() < 0.5:
        segments.append((0, rng.uniform(0.4, 1.4)))
    for i, segment in enumerate(body):
        segments.append(segment)
        # Occasional sub-gap idle stretch inside the episode (< max_gap).
        if i < len(body) - 1 and rng.random() < 0.3:
            segments.append((0, rng.uniform(0.3, 1.2)))
    if rng.random() < 0.5:
        segments.append((0, rng.uniform(0.4, 1.4)))

    spec = SyntheticEpisodeSpec(
        segments=tuple(segments),
        fps=30.0,
        seed=index,
        episode_id=f"scenario-{index:04d}",
    )
    return spec, cfg, mode


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
