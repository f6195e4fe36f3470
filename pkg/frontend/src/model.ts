// The dashboard's state: a pure fold over the service's event stream.
// Replaying the same recorded stream always reproduces the same model.

import type { EngineStateName, EpisodeReport, MonitorConfig, StatusEvent } from "./types.js";

export type ConnectionState = "connecting" | "live" | "reconnecting" | "polling";

export interface UiModel {
  connection: ConnectionState;
  state: EngineStateName;
  washing: boolean;
  movement: number;
  lastTimestamp: number | null;
  /** Per required movement: accumulated / minimum, clamped to [0, 1]. */
  progress: Record<number, number>;
  /** Active washing time / total threshold, clamped to [0, 1]. */
  totalProgress: number;
  lastVerdict: "ok" | "failed" | null;
  lastReport: EpisodeReport | null;
  missing: number[];
}

const clamp01 = (x: number) => Math.min(1, Math.max(0, x));

export function zeroProgress(config: MonitorConfig): Record<number, number> {
  const progress: Record<number, number> = {};
  for (const code of config.required_movements) progress[code] = 0;
  return progress;
}

export function initialModel(config: MonitorConfig): UiModel {
  return {
    connection: "connecting",
    state: "waiting",
    washing: false,
    movement: 0,
    lastTimestamp: null,
    progress: zeroProgress(config),
    totalProgress: 0,
    lastVerdict: null,
    lastReport: null,
    missing: [],
  };
}

function fractionsFrom(
  durations: Record<string, number>,
  config: MonitorConfig,
): { progress: Record<number, number>; total: number } {
  const progress: Record<number, number> = {};
  let active = 0;
  for (const [code, seconds] of Object.entries(durations)) {
    if (Number(code) !== 0) active += seconds;
  }
  for (const code of config.required_movements) {
    const minimum = config.per_movement_min_s[String(code)];
    const seconds = durations[String(code)] ?? 0;
    progress[code] = minimum > 0 ? clamp01(seconds / minimum) : 1;
  }
  return { progress, total: clamp01(active / config.total_duration_s) };
}

function maxMerge(a: Record<number, number>, b: Record<number, number>): Record<number, number> {
  const out: Record<number, number> = { ...a };
  for (const [code, value] of Object.entries(b)) {
    const key = Number(code);
    out[key] = Math.max(out[key] ?? 0, value);
  }
  return out;
}

/**
 * Apply one status event. Events older than the last one seen are
 * discarded; report and waiting events reset the ordering clock because
 * a looping source restarts its stream time from zero.
 */
export function applyEvent(model: UiModel, event: StatusEvent, config: MonitorConfig): UiModel {
  if (model.lastTimestamp !== null && event.timestamp < model.lastTimestamp) {
    return model;
  }

  const next: UiModel = {
    ...model,
    lastTimestamp: event.timestamp,
    state: event.state,
    washing: event.washing,
    movement: event.movement,
  };

  if (event.kind === "report" && event.report) {
    const f = fractionsFrom(event.report.durations, config);
    next.progress = f.progress;
    next.totalProgress = f.total;
    next.lastVerdict = event.report.verdict;
    next.lastReport = event.report;
    next.missing = event.report.missing.map((m) => m.code);
    next.lastTimestamp = null;
    return next;
  }

  if (event.state === "in_progress" && model.state === "waiting") {
    // A new episode begins: fractions restart from this snapshot.
    const f = fractionsFrom(event.durations, config);
    next.progress = f.progress;
    next.totalProgress = f.total;
    return next;
  }

  if (event.state === "in_progress" || event.state === "ok") {
    // Monotone within an episode: a snapshot can never move a bar backwards.
    const f = fractionsFrom(event.durations, config);
    next.progress = maxMerge(model.progress, f.progress);
    next.totalProgress = Math.max(model.totalProgress, f.total);
    return next;
  }

  if (event.state === "waiting") {
    // Episode boundary: keep the last fractions and verdict on display.
    next.progress = model.progress;
    next.totalProgress = model.totalProgress;
    next.lastTimestamp = null;
    return next;
  }

  // "failed" transition: the engine has already reset its ledger, so the
  // event's durations are not meaningful; retain the displayed fractions.
  return next;
}

export function foldEvents(
  events: StatusEvent[],
  config: MonitorConfig,
  start?: UiModel,
): UiModel {
  let model = start ?? initialModel(config);
  for (const event of events) model = applyEvent(model, event, config);
  return model;
}
