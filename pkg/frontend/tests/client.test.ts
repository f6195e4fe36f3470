import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { MonitorClient, type EventSourceLike } from "../src/client.js";
import type { MonitorConfig, StatusEvent, StatusResponse } from "../src/types.js";
import type { ViewDescription } from "../src/render.js";

const config: MonitorConfig = {
  total_duration_s: 10,
  required_movements: [2, 3],
  per_movement_min_s: { "2": 2, "3": 2 },
  poll_period_s: 0.25,
};

class FakeEventSource implements EventSourceLike {
  onopen: (() => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onerror: (() => void) | null = null;
  closed = false;

  close(): void {
    this.closed = true;
  }

  open(): void {
    this.onopen?.();
  }

  push(event: StatusEvent): void {
    this.onmessage?.({ data: JSON.stringify(event) });
  }

  fail(): void {
    this.onerror?.();
  }
}

function stateChange(timestamp: number, state: StatusEvent["state"], movement = 2): StatusEvent {
  return {
    timestamp,
    kind: "state_change",
    state,
    washing: state === "in_progress" || state === "ok",
    movement,
    total_active_s: 0,
    episode_elapsed_s: 0,
    durations: { "0": 0, "2": 0, "3": 0, "4": 0, "5": 0, "6": 0, "7": 0, "10": 0 },
    report: null,
  };
}

function harness(overrides: Partial<ConstructorParameters<typeof MonitorClient>[0]> = {}) {
  const sources: FakeEventSource[] = [];
  const views: ViewDescription[] = [];
  const statuses: StatusResponse[] = [];
  const client = new MonitorClient({
    config,
    onChange: (_model, view) => views.push(view),
    createEventSource: () => {
      const source = new FakeEventSource();
      sources.push(source);
      return source;
    },
    fetchStatus: async () => {
      const status: StatusResponse = { washing: true, movement: 7 };
      statuses.push(status);
      return status;
    },
    reconnectBaseMs: 100,
    reconnectMaxMs: 1000,
    ...overrides,
  });
  return { client, sources, views, statuses };
}

describe("MonitorClient", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });

  afterEach(() => {
    vi.useRealTimers();
  });

  it("applies pushed events in order", () => {
    const { client, sources } = harness();
    client.start();
    sources[0].open();
    sources[0].push(stateChange(1.0, "in_progress"));
    sources[0].push(stateChange(2.0, "ok"));
    expect(client.model.state).toBe("ok");
    expect(client.model.connection).toBe("live");
  });

  it("reflects a state change within 200 ms of receipt", () => {
    vi.useRealTimers();
    const { client, sources, views } = harness();
    client.start();
    sources[0].open();
    const before = performance.now();
    sources[0].push(stateChange(1.0, "in_progress"));
    const elapsed = performance.now() - before;
    const view = views[views.length - 1];
    expect(view.state).toBe("in_progress");
    expect(view.banner).toBe("washing");
    expect(elapsed).toBeLessThan(200);
  });

  it("shows reconnecting and keeps the last snapshot after a drop", () => {
    const { client, sources } = harness();
    client.start();
    sources[0].open();
    sources[0].push(stateChange(1.0, "in_progress"));
    sources[0].fail();
    expect(client.model.connection).toBe("reconnecting");
    expect(client.model.state).toBe("in_progress");
    expect(client.model.movement).toBe(2);
  });

  it("reconnects with exponential backoff", () => {
    const { client, sources } = harness();
    client.start();
    expect(sources.length).toBe(1);
    sources[0].fail();
    vi.advanceTimersByTime(100);
    expect(sources.length).toBe(2);
    sources[1].fail();
    vi.advanceTimersByTime(199);
    expect(sources.length).toBe(2);
    vi.advanceTimersByTime(1);
    expect(sources.length).toBe(3);
    sources[2].open();
    expect(client.model.connection).toBe("live");
  });

  it("falls back to polling the status endpoint while disconnected", async () => {
    const { client, sources, statuses } = harness();
    client.start();
    sources[0].open();
    sources[0].fail();
    // Reconnect attempt is scheduled at 100 ms; let a poll fire first (the
    // second source is created but never opens, so polling continues).
    await vi.advanceTimersByTimeAsync(250);
    expect(statuses.length).toBeGreaterThanOrEqual(1);
    expect(client.model.connection).toBe("polling");
    expect(client.model.movement).toBe(7);
    await vi.advanceTimersByTimeAsync(250);
    expect(statuses.length).toBeGreaterThanOrEqual(2);
  });

  it("stops polling once the stream is live again", async () => {
    const { client, sources, statuses } = harness();
    client.start();
    sources[0].fail();
    await vi.advanceTimersByTimeAsync(250);
    const pollsWhileDown = statuses.length;
    vi.advanceTimersByTime(100);
    sources[sources.length - 1].open();
    expect(client.model.connection).toBe("live");
    await vi.advanceTimersByTimeAsync(2000);
    expect(statuses.length).toBe(pollsWhileDown);
  });

  it("ignores malformed frames without crashing", () => {
    const { client, sources } = harness();
    client.start();
    sources[0].open();
    sources[0].onmessage?.({ data: "{not json" });
    expect(client.model.state).toBe("waiting");
  });

  it("stop() silences everything", async () => {
    const { client, sources, statuses, views } = harness();
    client.start();
    sources[0].fail();
    client.stop();
    const viewCount = views.length;
    await vi.advanceTimersByTimeAsync(5000);
    expect(sources.length).toBe(1);
    expect(statuses.length).toBe(0);
    expect(views.length).toBe(viewCount);
  });
});
