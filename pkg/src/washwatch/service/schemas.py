"""Request/response models for the monitor service."""
from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from ..engine import ComplianceConfig, EngineSnapshot, EpisodeReport
from ..motion import GateParams


class StatusResponse(BaseModel):
    """The polling interface's two variables."""

    washing: bool
    movement: int


class GateParamsModel(BaseModel):
    on_threshold: float = 0.02
    off_threshold: float = 0.01
    min_duration_s: float = 10.0
    max_gap_s: float = 2.0


class ConfigModel(BaseModel):
    total_duration_s: float = 40.0
    required_movements: list[int] = Field(default_factory=lambda: [2, 3, 4, 5, 6, 7, 10])
    per_movement_min_s: dict[int, float] = Field(
        default_factory=lambda: {2: 5.0, 3: 5.0, 4: 5.0, 5: 5.0, 6: 5.0, 7: 5.0, 10: 1.0}
    )
    poll_period_s: float = 0.5
    gate: GateParamsModel = Field(default_factory=GateParamsModel)
    smoothing_window: int = 15

    def to_config(self) -> ComplianceConfig:
        return ComplianceConfig(
            total_duration_s=self.total_duration_s,
            required_movements=frozenset(self.required_movements),
            per_movement_min_s=dict(self.per_movement_min_s),
            poll_period_s=self.poll_period_s,
            gate=GateParams(
                on_threshold=self.gate.on_threshold,
                off_threshold=self.gate.off_threshold,
                min_duration_s=self.gate.min_duration_s,
                max_gap_s=self.gate.max_gap_s,
            ),
            smoothing_window=self.smoothing_window,
        )

    @classmethod
    def from_config(cls, cfg: ComplianceConfig) -> "ConfigModel":
        return cls(
            total_duration_s=cfg.total_duration_s,
            required_movements=sorted(cfg.required_movements),
            per_movement_min_s=dict(cfg.per_movement_min_s),
            poll_period_s=cfg.poll_period_s,
            gate=GateParamsModel(
                on_threshold=cfg.gate.on_threshold,
                off_threshold=cfg.gate.off_threshold,
                min_duration_s=cfg.gate.min_duration_s,
                max_gap_s=cfg.gate.max_gap_s,
            ),
            smoothing_window=cfg.smoothing_window,
        )


class ReportModel(BaseModel):
    version: int = 1
    episode: dict[str, float]
    verdict: str
    durations: dict[str, float]
    missing: list[dict]
    total_active_s: float
    timeline: list[dict]

    @classmethod
    def from_report(cls, report: EpisodeReport) -> "ReportModel":
        return cls(**report.to_dict())


class StatusEventModel(BaseModel):
    """One server-push event: a snapshot plus what prompted it."""

    timestamp: float
    kind: str  # state_change | progress | report
    state: str
    washing: bool
    movement: int
    total_active_s: float
    episode_elapsed_s: float
    durations: dict[str, float]
    report: Optional[ReportModel] = None

    @classmethod
    def from_snapshot(
        cls,
        timestamp: float,
        kind: str,
        snapshot: EngineSnapshot,
        report: Optional[EpisodeReport] = None,
    ) -> "StatusEventModel":
        return cls(
            timestamp=timestamp,
            kind=kind,
            state=snapshot.state.value,
            washing=snapshot.washing_on,
            movement=snapshot.movement_number,
            total_active_s=snapshot.total_active_s,
            episode_elapsed_s=snapshot.episode_elapsed_s,
            durations={str(code): s for code, s in sorted(snapshot.ledger.seconds.items())},
            report=ReportModel.from_report(report) if report is not None else None,
        )
