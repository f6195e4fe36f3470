// Wire types mirroring the monitor service's JSON encodings.

export type EngineStateName = "waiting" | "in_progress" | "ok" | "failed";

export interface EpisodeReport {
  version: number;
  episode: { start: number; end: number };
  verdict: "ok" | "failed";
  durations: Record<string, number>;
  missing: { code: number; shortfall_s: number }[];
  total_active_s: number;
  timeline: { t: number; state: string }[];
}

export interface StatusEvent {
  timestamp: number;
  kind: "state_change" | "progress" | "report";
  state: EngineStateName;
  washing: boolean;
  movement: number;
  total_active_s: number;
  episode_elapsed_s: number;
  durations: Record<string, number>;
  report?: EpisodeReport | null;
}

export interface GateParams {
  on_threshold: number;
  off_threshold: number;
  min_duration_s: number;
  max_gap_s: number;
}

export interface MonitorConfig {
  total_duration_s: number;
  required_movements: number[];
  per_movement_min_s: Record<string, number>;
  poll_period_s: number;
  gate?: GateParams;
  smoothing_window?: number;
}

export interface StatusResponse {
  washing: boolean;
  movement: number;
}

export const MOVEMENT_LABELS: Record<number, string> = {
  0: "Idle",
  2: "Palm to palm",
  3: "Palm over dorsum",
  4: "Fingers interlaced",
  5: "Back of fingers",
  6: "Thumb rub",
  7: "Fingertips to palm",
  10: "Faucet off with towel",
};
