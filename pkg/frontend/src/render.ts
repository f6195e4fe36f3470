// Pure view description; the DOM adapter in main.ts turns it into markup.

import type { UiModel } from "./model.js";
import type { MonitorConfig } from "./types.js";
import { MOVEMENT_LABELS } from "./types.js";

export type Banner = "idle" | "washing" | "success" | "failure";

export interface ChecklistRow {
  code: number;
  label: string;
  fraction: number;
  complete: boolean;
  active: boolean;
}

export interface ViewDescription {
  banner: Banner;
  headline: string;
  connection: string;
  state: string;
  movement: number;
  movementLabel: string;
  totalFraction: number;
  checklist: ChecklistRow[];
  missing: { code: number; label: string }[];
}

const BANNERS: Record<string, Banner> = {
  waiting: "idle",
  in_progress: "washing",
  ok: "success",
  failed: "failure",
};

function headlineFor(model: UiModel): string {
  switch (model.state) {
    case "waiting":
      return model.lastVerdict === null
        ? "Waiting for washing to start"
        : model.lastVerdict === "ok"
          ? "Done. Last wash passed"
          : "Waiting. Last wash did not pass";
    case "in_progress":
      return `Washing: ${MOVEMENT_LABELS[model.movement] ?? "unknown movement"}`;
    case "ok":
      return "All movements covered. Keep going until you are done";
    case "failed":
      return "Wash incomplete";
  }
}

export function render(model: UiModel, config: MonitorConfig): ViewDescription {
  const checklist: ChecklistRow[] = [...config.required_movements]
    .sort((a, b) => a - b)
    .map((code) => {
      const fraction = model.progress[code] ?? 0;
      return {
        code,
        label: MOVEMENT_LABELS[code] ?? `Movement ${code}`,
        fraction,
        complete: fraction >= 1,
        active: model.washing && model.movement === code,
      };
    });

  return {
    banner: BANNERS[model.state],
    headline: headlineFor(model),
    connection: model.connection,
    state: model.state,
    movement: model.movement,
    movementLabel: MOVEMENT_LABELS[model.movement] ?? `Movement ${model.movement}`,
    totalFraction: model.totalProgress,
    checklist,
    missing: model.state === "failed" || model.lastVerdict === "failed"
      ? model.missing.map((code) => ({ code, label: MOVEMENT_LABELS[code] ?? `Movement ${code}` }))
      : [],
  };
}
