// Event stream consumption: server-push first, reconnect with backoff on
// drop, and a polling fallback against GET /status so the display keeps
// moving while the stream is down. Connection trouble is surfaced through
// the model's connection field, never thrown.

import { applyEvent, initialModel, type UiModel } from "./model.js";
import { render, type ViewDescription } from "./render.js";
import type { MonitorConfig, StatusEvent, StatusResponse } from "./types.js";

export interface EventSourceLike {
  onopen: (() => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onerror: (() => void) | null;
  close(): void;
}

export interface ClientOptions {
  config: MonitorConfig;
  eventsUrl?: string;
  statusUrl?: string;
  onChange?: (model: UiModel, view: ViewDescription) => void;
  createEventSource?: (url: string) => EventSourceLike;
  fetchStatus?: () => Promise<StatusResponse>;
  reconnectBaseMs?: number;
  reconnectMaxMs?: number;
  pollPeriodMs?: number;
}

const defaultCreateEventSource = (url: string): EventSourceLike =>
  new EventSource(url) as unknown as EventSourceLike;

export class MonitorClient {
  model: UiModel;

  private readonly config: MonitorConfig;
  private readonly eventsUrl: string;
  private readonly statusUrl: string;
  private readonly onChange: (model: UiModel, view: ViewDescription) => void;
  private readonly createEventSource: (url: string) => EventSourceLike;
  private readonly fetchStatus: () => Promise<StatusResponse>;
  private readonly reconnectBaseMs: number;
  private readonly reconnectMaxMs: number;
  private readonly pollPeriodMs: number;

  private source: EventSourceLike | null = null;
  private live = false;
  private reconnectDelayMs: number;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private pollTimer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;

  constructor(options: ClientOptions) {
    this.config = options.config;
    this.eventsUrl = options.eventsUrl ?? "/events";
    this.statusUrl = options.statusUrl ?? "/status";
    this.onChange = options.onChange ?? (() => {});
    this.createEventSource = options.createEventSource ?? defaultCreateEventSource;
    this.fetchStatus =
      options.fetchStatus ??
      (async () => (await fetch(this.statusUrl)).json() as Promise<StatusResponse>);
    this.reconnectBaseMs = options.reconnectBaseMs ?? 1000;
    this.reconnectMaxMs = options.reconnectMaxMs ?? 15000;
    this.pollPeriodMs = options.pollPeriodMs ?? Math.round(this.config.poll_period_s * 1000);
    this.reconnectDelayMs = this.reconnectBaseMs;
    this.model = initialModel(this.config);
  }

  start(): void {
    this.stopped = false;
    this.connect();
  }

  stop(): void {
    this.stopped = true;
    this.live = false;
    this.source?.close();
    this.source = null;
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    if (this.pollTimer !== null) clearTimeout(this.pollTimer);
    this.reconnectTimer = null;
    this.pollTimer = null;
  }

  /** Feed one already-decoded event (also the test seam). */
  receive(event: StatusEvent): void {
    this.model = applyEvent(this.model, event, this.config);
    this.emit();
  }

  private emit(): void {
    this.onChange(this.model, render(this.model, this.config));
  }

  private setConnection(connection: UiModel["connection"]): void {
    if (this.model.connection !== connection) {
      this.model = { ...this.model, connection };
      this.emit();
    }
  }

  private connect(): void {
    if (this.stopped) return;
    this.source = this.createEventSource(this.eventsUrl);
    this.source.onopen = () => {
      this.live = true;
      this.reconnectDelayMs = this.reconnectBaseMs;
      this.stopPolling();
      this.setConnection("live");
    };
    this.source.onmessage = (ev) => {
      try {
        this.receive(JSON.parse(ev.data) as StatusEvent);
      } catch {
        // Malformed frame: ignore; the stream itself is still healthy.
      }
    };
    this.source.onerror = () => {
      this.live = false;
      this.source?.close();
      this.source = null;
      if (this.stopped) return;
      this.setConnection("reconnecting");
      this.startPolling();
      this.reconnectTimer = setTimeout(() => this.connect(), this.reconnectDelayMs);
      this.reconnectDelayMs = Math.min(this.reconnectDelayMs * 2, this.reconnectMaxMs);
    };
  }

  private startPolling(): void {
    if (this.pollTimer !== null || this.stopped) return;
    const tick = async () => {
      if (this.stopped) return;
      // Poll only while the stream is down; a pending reconnect attempt
      // does not count as up. stopPolling() is what ends the chain.
      if (!this.live) {
        try {
          const status = await this.fetchStatus();
          this.model = {
            ...this.model,
            connection: "polling",
            washing: status.washing,
            movement: status.movement,
          };
          this.emit();
        } catch {
          this.setConnection("reconnecting");
        }
      }
      if (!this.stopped && this.pollTimer !== null) {
        this.pollTimer = setTimeout(tick, this.pollPeriodMs);
      }
    };
    this.pollTimer = setTimeout(tick, this.pollPeriodMs);
  }

  private stopPolling(): void {
    if (this.pollTimer !== null) {
      clearTimeout(this.pollTimer);
      this.pollTimer = null;
    }
  }
}

export async function fetchConfig(url = "/config"): Promise<MonitorConfig> {
  const response = await fetch(url);
  if (!response.ok) throw new Error(`config fetch failed: ${response.status}`);
  return (await response.json()) as MonitorConfig;
}
