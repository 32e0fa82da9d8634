// DOM wiring for the single-page UI: graph editor, world preview, model-DB
// explorer, metrics dashboard. All state-free logic lives in the sibling
// modules; this file only moves data between them and the page.

import { ApiRequestError, WorldgenClient } from "./api.js";
import { GraphEditor } from "./editor.js";
import { levelMeans, parseMetricsCsv } from "./metrics.js";
import { LAYER_IDS, countSvgRooms } from "./viewer.js";

const api = new WorldgenClient();
const editor = new GraphEditor();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(text: string, isError = false): void {
  const bar = el<HTMLElement>("status");
  bar.textContent = text;
  bar.className = isError ? "status error" : "status";
}

function refreshEditorView(): void {
  el<HTMLElement>("graph-json").textContent = JSON.stringify(
    editor.toDocument(), null, 2);
  const errors = editor.validate();
  el<HTMLElement>("validation").textContent =
    errors.length ? errors.join("\n") : "valid";
  el<HTMLButtonElement>("generate-btn").disabled = errors.length > 0;
}

function wireEditor(): void {
  el<HTMLButtonElement>("add-room-btn").addEventListener("click", () => {
    try {
      editor.addRoom(
        el<HTMLInputElement>("room-id").value.trim(),
        el<HTMLInputElement>("room-category").value.trim() || "room",
      );
    } catch (e) {
      setStatus(String(e), true);
    }
    refreshEditorView();
  });
  el<HTMLButtonElement>("add-edge-btn").addEventListener("click", () => {
    try {
      editor.addEdge(
        el<HTMLInputElement>("edge-a").value.trim(),
        el<HTMLInputElement>("edge-b").value.trim(),
      );
    } catch (e) {
      setStatus(String(e), true);
    }
    refreshEditorView();
  });
  el<HTMLSelectElement>("context").addEventListener("change", (ev) => {
    editor.context = (ev.target as HTMLSelectElement).value;
    refreshEditorView();
  });
}

async function generateAndPreview(): Promise<void> {
  const btn = el<HTMLButtonElement>("generate-btn");
  btn.disabled = true; // one in-flight generate at a time
  try {
    const seed = Number(el<HTMLInputElement>("seed").value) || 0;
    const res = await api.generateFromGraph(editor.toDocument(), seed);
    if (res.failures.length) {
      setStatus(`generation failed: ${res.failures[0].error}`, true);
      return;
    }
    const wid = res.worldIds[0];
    const svg = await api.worldSvg(wid);
    el<HTMLElement>("preview").innerHTML = svg;
    setStatus(
      `world ${wid}: ${countSvgRooms(svg)} rooms rendered, ` +
      `${res.timings.total.toFixed(0)} ms`,
    );
    el<HTMLInputElement>("metrics-ids").value = res.worldIds.join(",");
  } catch (e) {
    const msg = e instanceof ApiRequestError ? `${e.code}: ${e.message}` : String(e);
    setStatus(msg, true);
  } finally {
    btn.disabled = false;
  }
}

function wireLayerToggles(): void {
  const box = el<HTMLElement>("layer-toggles");
  for (const layer of LAYER_IDS) {
    const label = document.createElement("label");
    const input = document.createElement("input");
    input.type = "checkbox";
    input.checked = true;
    input.addEventListener("change", () => {
      const g = el<HTMLElement>("preview").querySelector<SVGGElement>(`#${layer}`);
      if (g) g.style.display = input.checked ? "" : "none";
    });
    label.append(input, ` ${layer.replace("layer-", "")}`);
    box.append(label);
  }
}

async function runDbQuery(): Promise<void> {
  try {
    const res = await api.queryDb(el<HTMLInputElement>("db-text").value, 8);
    const tbody = el<HTMLElement>("db-results");
    tbody.innerHTML = "";
    for (const r of res.results) {
      const tr = document.createElement("tr");
      tr.innerHTML =
        `<td>${r.id}</td><td>${r.description}</td>` +
        `<td>${(r.score ?? 0).toFixed(3)}</td><td>${r.tags.join(" ")}</td>`;
      tr.addEventListener("click", () => {
        el<HTMLInputElement>("annot-id").value = r.id;
        el<HTMLInputElement>("annot-desc").value = r.description;
      });
      tbody.append(tr);
    }
    setStatus(`bundle v${res.bundleVersion}: ${res.results.length} hits`);
  } catch (e) {
    setStatus(String(e), true);
  }
}

async function stageAnnotation(): Promise<void> {
  try {
    const id = el<HTMLInputElement>("annot-id").value.trim();
    await api.annotate(id, {
      description: el<HTMLInputElement>("annot-desc").value,
    }, el<HTMLInputElement>("annot-overwrite").checked);
    setStatus(`staged edit for ${id}; rebuild to apply`);
  } catch (e) {
    const msg = e instanceof ApiRequestError && e.status === 409
      ? "staged edit conflict: tick overwrite to replace it"
      : String(e);
    setStatus(msg, true);
  }
}

async function rebuildBundle(): Promise<void> {
  try {
    const res = await api.rebuildDb();
    setStatus(`rebuilt model bundle: now v${res.bundleVersion}`);
  } catch (e) {
    setStatus(String(e), true);
  }
}

async function loadMetrics(): Promise<void> {
  try {
    const ids = el<HTMLInputElement>("metrics-ids").value
      .split(",").map((s) => s.trim()).filter(Boolean);
    const parsed = parseMetricsCsv(await api.metricsCsv(ids));
    const lines = ["metric  level:mean ..."];
    for (const metric of ["rooms", "assets", "edges", "diameter"]) {
      const means = levelMeans(parsed, metric);
      const cells = [...means.entries()]
        .map(([lvl, m]) => `${lvl}:${m.toFixed(1)}`).join("  ");
      lines.push(`${metric.padEnd(8)} ${cells}  (r=${parsed.pearson[metric]?.toFixed(3)})`);
    }
    el<HTMLElement>("metrics-table").textContent = lines.join("\n");
  } catch (e) {
    setStatus(String(e), true);
  }
}

export function boot(): void {
  wireEditor();
  wireLayerToggles();
  el<HTMLButtonElement>("generate-btn").addEventListener("click", () => {
    void generateAndPreview();
  });
  el<HTMLButtonElement>("db-query-btn").addEventListener("click", () => void runDbQuery());
  el<HTMLButtonElement>("annot-btn").addEventListener("click", () => void stageAnnotation());
  el<HTMLButtonElement>("rebuild-btn").addEventListener("click", () => void rebuildBundle());
  el<HTMLButtonElement>("metrics-btn").addEventListener("click", () => void loadMetrics());
  refreshEditorView();
}

if (typeof document !== "undefined" && document.getElementById("generate-btn")) {
  boot();
}
