"""FastAPI monitor service.

One pump thread drives the source through the pipeline; any number of
HTTP readers poll /status, stream /events, or fetch the latest report.
Config updates are staged and applied between episodes, never while one
is open. When the source runs dry the pump stops but the service keeps
answering with the terminal snapshot.
"""
from __future__ import annotations

import json
import queue
import threading
import time
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse

from ..classifiers import build_classifier
from ..engine import (
    ComplianceConfig,
    ConfigError,
    EngineEvent,
    EpisodeReport,
    ReportReady,
    StateChanged,
)
from ..runner import EpisodePipeline, RunSpec, build_pipeline_inputs
from .schemas import ConfigModel, ReportModel, StatusEventModel, StatusResponse

EVENT_QUEUE_SIZE = 1024
STREAM_POLL_TIMEOUT_S = 0.25
LOOP_REST_S = 0.02


class EventBus:
    """Fan-out of status events to any number of subscriber queues."""

    def __init__(self) -> None:
        self._subscribers: list[queue.Queue] = []
        self._lock = threading.Lock()

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue(maxsize=EVENT_QUEUE_SIZE)
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def publish(self, event: StatusEventModel) -> None:
        with self._lock:
            subscribers = list(self._subscribers)
        for q in subscribers:
            try:
                q.put_nowait(event)
            except queue.Full:
                # A stalled reader loses events rather than stalling the pump.
                pass


class MonitorRuntime:
    """Owns the pipeline and the single writer thread advancing it."""

    def __init__(self, spec: RunSpec, loop: bool = False, realtime: bool = False):
        self.spec = spec
        self.loop = loop
        self.realtime = realtime
        self.bus = EventBus()
        self._config = spec.config
        self._staged_config: Optional[ComplianceConfig] = None
        self._config_lock = threading.Lock()
        self._pipeline = EpisodePipeline(
            self._config, _classifier_for(spec, self._config, seed=spec.seed)
        )
        self._last_report: Optional[EpisodeReport] = None
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    # -- lifecycle ----------------------------------------------------

    def start(self) -> None:
        self._thread = threading.Thread(target=self._pump, name="washwatch-pump", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)

    def wait(self, timeout: Optional[float] = None) -> None:
        """Block until the pump finishes (non-loop sources only)."""
        if self._thread is not None:
            self._thread.join(timeout)

    # -- read side ----------------------------------------------------

    def status(self) -> tuple[bool, int]:
        return self._pipeline.engine.poll()

    def stream_t(self) -> float:
        return self._pipeline.last_t or 0.0

    def snapshot_event(self, kind: str, timestamp: float) -> StatusEventModel:
        return StatusEventModel.from_snapshot(timestamp, kind, self._pipeline.engine.snapshot())

    @property
    def last_report(self) -> Optional[EpisodeReport]:
        return self._last_report

    def active_config(self) -> ComplianceConfig:
        with self._config_lock:
            return self._staged_config or self._config

    def stage_config(self, cfg: ComplianceConfig) -> None:
        with self._config_lock:
            self._staged_config = cfg

    # -- pump ---------------------------------------------------------

    def _pump(self) -> None:
        while not self._stop.is_set():
            self._run_source_once()
            if not self.loop or self._stop.is_set():
                break
            self._apply_staged_config()
            self._stop.wait(LOOP_REST_S)
        # Terminal snapshot so late subscribers see where things ended.
        self.bus.publish(self.snapshot_event("progress", self.stream_t()))

    def _apply_staged_config(self) -> None:
        with self._config_lock:
            if self._staged_config is not None:
                self._config = self._staged_config
                self._staged_config = None

    def _run_source_once(self) -> None:
        samples, annotation = build_pipeline_inputs(self.spec)
        classifier = build_classifier(
            self.spec.classifier, annotation=annotation, seed=self.spec.seed
        )
        pipeline = EpisodePipeline(self._config, classifier)
        self._pipeline = pipeline

        next_progress_t: Optional[float] = None
        wall_start = time.monotonic()
        stream_start: Optional[float] = None

        for sample in samples:
            if self._stop.is_set():
                return
            if self.realtime:
                if stream_start is None:
                    stream_start = sample.t
                lag = (sample.t - stream_start) - (time.monotonic() - wall_start)
                if lag > 0:
                    time.sleep(lag)
            events = pipeline.feed(sample)
            self._publish_engine_events(events)
            if next_progress_t is None:
                next_progress_t = sample.t + self._config.poll_period_s
            elif sample.t >= next_progress_t:
                self.bus.publish(self.snapshot_event("progress", sample.t))
                next_progress_t = sample.t + self._config.poll_period_s
        self._publish_engine_events(pipeline.finish())

    def _publish_engine_events(self, events: list[EngineEvent]) -> None:
        for event in events:
            snapshot = self._pipeline.engine.snapshot()
            if isinstance(event, StateChanged):
                model = StatusEventModel.from_snapshot(event.t, "state_change", snapshot)
                model = model.model_copy(update={"state": event.state.value})
                self.bus.publish(model)
            elif isinstance(event, ReportReady):
                self._last_report = event.report
                self.bus.publish(
                    StatusEventModel.from_snapshot(event.t, "report", snapshot, event.report)
                )


def _classifier_for(spec: RunSpec, config: ComplianceConfig, seed: int):
    _, annotation = build_pipeline_inputs(spec)
    return build_classifier(spec.classifier, annotation=annotation, seed=seed)


def _sse_encode(event: StatusEventModel) -> str:
    return f"data: {json.dumps(event.model_dump(), sort_keys=True)}\n\n"


def create_app(runtime: MonitorRuntime) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        runtime.start()
        yield
        runtime.stop()

    app = FastAPI(title="washwatch monitor", lifespan=lifespan)
    # The dashboard may be served from a different origin than the sink device.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/status", response_model=StatusResponse)
    def status() -> StatusResponse:
        washing, movement = runtime.status()
        return StatusResponse(washing=washing, movement=movement)

    @app.get("/events")
    def events(limit: Optional[int] = None, timeout_s: Optional[float] = None) -> StreamingResponse:
        """Server-push stream of status events.

        Unbounded by default; ``limit`` (number of events) and
        ``timeout_s`` (wall-clock cap) let bounded clients and tests
        receive a stream that terminates on its own.
        """

        def stream():
            q = runtime.bus.subscribe()
            deadline = time.monotonic() + timeout_s if timeout_s is not None else None
            sent = 0
            try:
                yield _sse_encode(runtime.snapshot_event("progress", runtime.stream_t()))
                sent += 1
                while (limit is None or sent < limit) and (
                    deadline is None or time.monotonic() < deadline
                ):
                    try:
                        event = q.get(timeout=STREAM_POLL_TIMEOUT_S)
                    except queue.Empty:
                        yield ": keepalive\n\n"
                        continue
                    yield _sse_encode(event)
                    sent += 1
            finally:
                runtime.bus.unsubscribe(q)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/config", response_model=ConfigModel)
    def get_config() -> ConfigModel:
        return ConfigModel.from_config(runtime.active_config())

    @app.put("/config", response_model=ConfigModel)
    def put_config(model: ConfigModel) -> ConfigModel:
        try:
            cfg = model.to_config()
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        runtime.stage_config(cfg)
        return ConfigModel.from_config(cfg)

    @app.get("/report/latest", response_model=ReportModel)
    def latest_report() -> ReportModel:
        report = runtime.last_report
        if report is None:
            raise HTTPException(status_code=404, detail="no episode report yet")
        return ReportModel.from_report(report)

    return app


def serve(spec: RunSpec, host: str = "127.0.0.1", port: int = 8000,
          loop: bool = False, realtime: bool = False) -> None:
    """Blocking entry point used by the CLI."""
    import uvicorn

    runtime = MonitorRuntime(spec, loop=loop, realtime=realtime)
    uvicorn.run(create_app(runtime), host=host, port=port, log_level="info")
