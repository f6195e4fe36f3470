// Thin DOM adapter: fetch the config, start the client, and paint each
// view description. All logic lives in model.ts / render.ts / client.ts.

import { MonitorClient, fetchConfig } from "./client.js";
import type { ViewDescription } from "./render.js";

const BANNER_CLASSES = ["idle", "washing", "success", "failure"];

function paint(root: HTMLElement, view: ViewDescription): void {
  const banner = root.querySelector<HTMLElement>("#banner")!;
  banner.classList.remove(...BANNER_CLASSES);
  banner.classList.add(view.banner);
  banner.textContent = view.headline;

  root.querySelector<HTMLElement>("#connection")!.textContent = view.connection;
  root.querySelector<HTMLElement>("#connection")!.dataset.state = view.connection;

  const totalBar = root.querySelector<HTMLElement>("#total-bar")!;
  totalBar.style.width = `${Math.round(view.totalFraction * 100)}%`;
  root.querySelector<HTMLElement>("#total-pct")!.textContent =
    `${Math.round(view.totalFraction * 100)}%`;

  const list = root.querySelector<HTMLElement>("#checklist")!;
  list.innerHTML = "";
  for (const row of view.checklist) {
    const item = document.createElement("li");
    item.className = row.complete ? "complete" : row.active ? "active" : "";
    item.innerHTML =
      `<span class="mark">${row.complete ? "✓" : ""}</span>` +
      `<span class="label">${row.code}. ${row.label}</span>` +
      `<span class="bar"><span class="fill" style="width:${Math.round(row.fraction * 100)}%"></span></span>`;
    list.appendChild(item);
  }

  const missing = root.querySelector<HTMLElement>("#missing")!;
  missing.textContent = view.missing.length
    ? `Missing: ${view.missing.map((m) => m.label).join(", ")}`
    : "";
}

async function start(): Promise<void> {
  const root = document.body;
  // Same origin by default; ?server=http://host:8000 points elsewhere.
  const base = new URLSearchParams(location.search).get("server") ?? "";
  const config = await fetchConfig(`${base}/config`);
  const client = new MonitorClient({
    config,
    eventsUrl: `${base}/events`,
    statusUrl: `${base}/status`,
    onChange: (_model, view) => paint(root, view),
  });
  client.start();
}

start().catch((err) => {
  document.getElementById("banner")!.textContent = `Cannot reach monitor: ${err}`;
});
