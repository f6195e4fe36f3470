"""Record a successful-episode event stream for the dashboard tests.

Runs the monitor runtime over a synthetic episode that satisfies its
config, captures every event the service would push over /events (same
wire encoding), and stores them with the active config. Requires the
washwatch package to be installed.
"""
import json
from pathlib import Path

from washwatch.classifiers import ClassifierSpec
from washwatch.engine import ComplianceConfig
from washwatch.runner import RunSpec, SyntheticSource
from washwatch.service import ConfigModel, MonitorRuntime
from washwatch.synthetic import SyntheticEpisodeSpec

OUT_PATH = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "success-stream.json"


def main() -> None:
    config = ComplianceConfig(
        total_duration_s=12.0,
        required_movements=frozenset({2, 3, 4}),
        per_movement_min_s={2: 2.0, 3: 2.0, 4: 2.0},
        smoothing_window=15,
    )
    spec = RunSpec(
        source=SyntheticSource(
            SyntheticEpisodeSpec(
                segments=((0, 1.0), (2, 5.0), (3, 4.0), (4, 3.0), (2, 2.0), (0, 1.0)),
                seed=7,
                episode_id="fixture-ok",
            )
        ),
        classifier=ClassifierSpec(kind="replay"),
        config=config,
    )
    runtime = MonitorRuntime(spec)
    queue = runtime.bus.subscribe()
    runtime.start()
    runtime.wait(timeout=30.0)

    events = []
    while not queue.empty():
        events.append(queue.get_nowait().model_dump())

    doc = {"config": ConfigModel.from_config(config).model_dump(), "events": events}
    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(events)} events to {OUT_PATH}")


if __name__ == "__main__":
    main()
