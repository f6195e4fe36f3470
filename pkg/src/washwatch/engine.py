"""The washing-quality state machine and its duration ledger.

States: Waiting (idle, watching for washing to start), InProgress
(washing is on-going, durations accumulate), Ok (the completion
predicate holds: total active time over the configured threshold and
every required movement over its minimum), Failed (washing ended short
of the predicate). An episode's verdict is delivered as an
EpisodeReport when washing ends; after every report the engine rests in
Waiting again.

Time accounting: the gap between consecutive ticks is attributed to the
movement seen at the later tick; the first tick of an episode
contributes nothing. Idle time (code 0) accumulates in the ledger but
never counts toward the active total.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

from .motion import GateParams
from .movements import CODE_INDEX, WASHING_CODES


class EngineError(ValueError):
    pass


class ConfigError(EngineError):
    pass


class NonMonotoneTimeError(EngineError):
    pass


DEFAULT_PER_MOVEMENT_MIN_S = {2: 5.0, 3: 5.0, 4: 5.0, 5: 5.0, 6: 5.0, 7: 5.0, 10: 1.0}


@dataclass(frozen=True)
class ComplianceConfig:
    total_duration_s: float = 40.0
    required_movements: frozenset[int] = frozenset(WASHING_CODES)
    per_movement_min_s: dict[int, float] = field(
        default_factory=lambda: dict(DEFAULT_PER_MOVEMENT_MIN_S)
    )
    poll_period_s: float = 0.5
    gate: GateParams = GateParams()
    smoothing_window: int = 15

    def __post_init__(self) -> None:
        if self.total_duration_s <= 0:
            raise ConfigError(f"total_duration_s must be > 0, got {self.total_duration_s}")
        if self.poll_period_s <= 0:
            raise ConfigError(f"poll_period_s must be > 0, got {self.poll_period_s}")
        if self.smoothing_window < 1:
            raise ConfigError(f"smoothing_window must be >= 1, got {self.smoothing_window}")
        bad = set(self.required_movements) - set(WASHING_CODES)
        if bad:
            raise ConfigError(f"required_movements contains non-washing codes: {sorted(bad)}")
        for code in self.required_movements:
            if code not in self.per_movement_min_s:
                raise ConfigError(f"missing per-movement threshold for required movement {code}")
        for code, minimum in self.per_movement_min_s.items():
            if code not in CODE_INDEX or code == 0:
                raise ConfigError(f"per_movement_min_s has unknown movement code {code}")
            if minimum < 0:
                raise ConfigError(f"negative minimum duration for movement {code}")


class EngineState(Enum):
    WAITING = "waiting"
    IN_PROGRESS = "in_progress"
    OK = "ok"
    FAILED = "failed"


def _zero_ledger() -> dict[int, float]:
    return {code: 0.0 for code in CODE_INDEX}


@dataclass(frozen=True)
class DurationLedger:
    """Per-movement accumulated seconds within one episode, idle included."""

    seconds: dict[int, float] = field(default_factory=_zero_ledger)

    @property
    def total_active_s(self) -> float:
        return sum(self.seconds[code] for code in WASHING_CODES)

    @property
    def total_s(self) -> float:
        return sum(self.seconds.values())


def completion_met(ledger_seconds: dict[int, float], cfg: ComplianceConfig) -> bool:
    """The completion predicate over raw ledger seconds."""
    total_active = sum(ledger_seconds[code] for code in WASHING_CODES)
    if total_active < cfg.total_duration_s:
        return False
    for code in cfg.required_movements:
        if ledger_seconds[code] < cfg.per_movement_min_s[code]:
            return False
    return True


def missing_movements(ledger_seconds: dict[int, float], cfg: ComplianceConfig) -> list[dict]:
    """Required movements still short of their minimums, with shortfalls."""
    missing = []
    for code in sorted(cfg.required_movements):
        shortfall = cfg.per_movement_min_s[code] - ledger_seconds[code]
        if shortfall > 0:
            missing.append({"code": code, "shortfall_s": shortfall})
    return missing


@dataclass(frozen=True)
class EpisodeReport:
    episode_start: float
    episode_end: float
    verdict: str  # "ok" | "failed"
    durations: dict[int, float]
    missing: list[dict]
    total_active_s: float
    timeline: tuple[tuple[float, str], ...]

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "episode": {"start": self.episode_start, "end": self.episode_end},
            "verdict": self.verdict,
            "durations": {str(code): self.durations[code] for code in sorted(self.durations)},
            "missing": self.missing,
            "total_active_s": self.total_active_s,
            "timeline": [{"t": t, "state": s} for t, s in self.timeline],
        }


@dataclass(frozen=True)
class EngineSnapshot:
    state: EngineState
    washing_on: bool
    movement_number: int
    ledger: DurationLedger
    total_active_s: float
    episode_elapsed_s: float


@dataclass(frozen=True)
class StateChanged:
    state: EngineState
    t: float


@dataclass(frozen=True)
class ReportReady:
    report: EpisodeReport
    t: float


EngineEvent = Union[StateChanged, ReportReady]


class Engine:
    """One monitored sink. A single writer calls tick/finalize; poll may be
    called from any thread and reads one atomically swapped tuple."""

    def __init__(self, cfg: ComplianceConfig):
        self.cfg = cfg
        self._state = EngineState.WAITING
        self._ledger = _zero_ledger()
        self._last_t: Optional[float] = None
        self._episode_start: Optional[float] = None
        self._movement = 0
        self._timeline: list[tuple[float, str]] = []
        self._last_report: Optional[EpisodeReport] = None
        # (washing_on, movement_number): the polling interface's two variables.
        self._poll_state = (False, 0)

    @property
    def state(self) -> EngineState:
        return self._state

    @property
    def last_report(self) -> Optional[EpisodeReport]:
        return self._last_report

    def poll(self) -> tuple[bool, int]:
        return self._poll_state

    def snapshot(self) -> EngineSnapshot:
        ledger = DurationLedger(dict(self._ledger))
        elapsed = 0.0
        if self._episode_start is not None and self._last_t is not None:
            elapsed = self._last_t - self._episode_start
        washing_on, movement = self._poll_state
        return EngineSnapshot(
            state=self._state,
            washing_on=washing_on,
            movement_number=movement,
            ledger=ledger,
            total_active_s=ledger.total_active_s,
            episode_elapsed_s=elapsed,
        )

    def tick(self, washing_on: bool, movement: int, t: float) -> list[EngineEvent]:
        if self._last_t is not None and t <= self._last_t:
            raise NonMonotoneTimeError(f"tick time {t} not after previous {self._last_t}")
        if movement not in CODE_INDEX:
            raise EngineError(f"unknown movement code {movement}")

        events: list[EngineEvent] = []
        if self._state is EngineState.WAITING:
            if washing_on:
                self._episode_start = t
                self._ledger = _zero_ledger()
                self._state = EngineState.IN_PROGRESS
                self._timeline = [(t, EngineState.IN_PROGRESS.value)]
                self._movement = movement
                events.append(StateChanged(EngineState.IN_PROGRESS, t))
        elif washing_on:
            self._ledger[movement] += t - self._last_t
            self._movement = movement
            if self._state is EngineState.IN_PROGRESS and completion_met(self._ledger, self.cfg):
                self._state = EngineState.OK
                self._timeline.append((t, EngineState.OK.value))
                events.append(StateChanged(EngineState.OK, t))
        else:
            self._close_episode(t, events)

        self._last_t = t
        in_episode = self._state in (EngineState.IN_PROGRESS, EngineState.OK)
        self._poll_state = (in_episode, self._movement if in_episode else 0)
        return events

    def finalize(self, t: float) -> Optional[EpisodeReport]:
        """Close an open episode as if washing stopped at t; no-op in Waiting."""
        for event in self.finalize_events(t):
            if isinstance(event, ReportReady):
                return event.report
        return None

    def finalize_events(self, t: float) -> list[EngineEvent]:
        """finalize, but returning the transition events like tick does."""
        if self._state not in (EngineState.IN_PROGRESS, EngineState.OK):
            return []
        if self._last_t is not None and t < self._last_t:
            raise NonMonotoneTimeError(f"finalize time {t} before last tick {self._last_t}")
        events: list[EngineEvent] = []
        self._close_episode(t, events)
        self._last_t = max(t, self._last_t if self._last_t is not None else t)
        self._poll_state = (False, 0)
        return events

    def _close_episode(self, t: float, events: list[EngineEvent]) -> None:
        verdict_state = self._state
        if verdict_state is EngineState.IN_PROGRESS:
            verdict_state = EngineState.FAILED
            self._timeline.append((t, EngineState.FAILED.value))
            events.append(StateChanged(EngineState.FAILED, t))
        timeline = self._timeline + [(t, EngineState.WAITING.value)]
        report = EpisodeReport(
            episode_start=self._episode_start,
            episode_end=t,
            verdict="ok" if verdict_state is EngineState.OK else "failed",
            durations=dict(self._ledger),
            missing=missing_movements(self._ledger, self.cfg),
            total_active_s=DurationLedger(self._ledger).total_active_s,
            timeline=tuple(timeline),
        )
        self._last_report = report
        events.append(ReportReady(report, t))
        self._state = EngineState.WAITING
        self._episode_start = None
        self._ledger = _zero_ledger()
        self._movement = 0
        self._timeline = []
        events.append(StateChanged(EngineState.WAITING, t))


@dataclass(frozen=True)
class ReferenceResult:
    verdict: str
    durations: dict[int, float]
    total_active_s: float


def reference_verdict(
    labels: Sequence[tuple[float, int]], cfg: ComplianceConfig
) -> ReferenceResult:
    """Brute-force oracle for the state machine's final verdict.

    Treats the whole timed label sequence as one washing episode: sums
    the gap before each observation into that observation's movement
    bucket, then applies the completion predicate exactly once at the
    end. No states, no transitions.
    """
    durations = _zero_ledger()
    prev_t: Optional[float] = None
    for t, movement in labels:
        if movement not in CODE_INDEX:
            raise EngineError(f"unknown movement code {movement}")
        if prev_t is not None:
            if t <= prev_t:
                raise NonMonotoneTimeError(f"label time {t} not after previous {prev_t}")
            durations[movement] += t - prev_t
        prev_t = t
    total_active = sum(durations[code] for code in WASHING_CODES)
    verdict = "ok" if completion_met(durations, cfg) else "failed"
    return ReferenceResult(verdict=verdict, durations=durations, total_active_s=total_active)
