// Browser entry point: wires the editor state, the API client, the client
// renderer, and the reduction explorer into the page. All derived views are
// recomputed locally on every edit; the service is only hit for list, load,
// and save.

import { ApiClient, SaveResult } from "./api.js";
import { EditorState } from "./editor.js";
import { VOICES, VoiceName, SHORT_OF } from "./model.js";
import {
  Stack,
  ancestorLabels,
  clusterStack,
  noteRef,
  survivorLabels,
} from "./reduction.js";
import { deriveModel, renderSvg, slotFromX, voiceFromY } from "./render.js";
import { Finding, validate } from "./validation.js";

const api = new ApiClient(
  new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8321",
);
const editor = new EditorState();

let stack: Stack | null = null;
let findings: Finding[] = [];
let layer = 0;
let highlight: Set<string> | null = null;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

const picker = $<HTMLSelectElement>("picker");
const saveButton = $<HTMLButtonElement>("save");
const dirtyBadge = $("dirty");
const status = $("status");
const banner = $("banner");
const findingsList = $<HTMLUListElement>("findings");
const score = $("score");
const slider = $<HTMLInputElement>("layer");
const layerLabel = $("layer-label");
const survivorsOut = $("survivors");

function setStatus(text: string): void {
  status.textContent = text;
}

function recompute(): void {
  stack = null;
  findings = [];
  if (!editor.doc) return;
  const report = validate(editor.doc);
  findings = report.findings;
  if (report.ok) {
    try {
      stack = clusterStack(editor.doc);
    } catch {
      stack = null;
    }
  }
  const max = stack ? stack.layers.length : 0;
  slider.max = String(max);
  if (layer > max) layer = max;
  slider.value = String(layer);
}

function findingSlot(f: Finding): { voice: VoiceName; slot: number } | null {
  const m = /^(sop|alto|ten|bass)\[(\d+)\]$/.exec(f.location);
  if (!m) return null;
  const voice = VOICES.find((v) => SHORT_OF[v] === m[1]);
  return voice ? { voice, slot: parseInt(m[2]!, 10) } : null;
}

function redraw(): void {
  if (!editor.doc) {
    score.innerHTML = "";
    survivorsOut.textContent = "";
    return;
  }
  const liveRefs = stack && layer > 0 ? new Set(survivorLabels(stack, layer)) : null;
  score.innerHTML = renderSvg(deriveModel(editor.doc), {
    cursor: editor.cursor,
    liveRefs,
    highlight,
  });
  markFindingSlots();

  dirtyBadge.hidden = !editor.dirty;
  layerLabel.textContent = `layer ${layer}`;
  survivorsOut.textContent = stack
    ? survivorLabels(stack, layer).join("  ") || "(empty)"
    : "";

  const warnings = findings.filter((f) => f.severity === "warning");
  banner.hidden = !warnings.length;
  banner.textContent = warnings.map((f) => `${f.code}: ${f.message}`).join(" | ");

  findingsList.innerHTML = "";
  for (const f of findings) {
    const li = document.createElement("li");
    li.className = f.severity;
    li.textContent = `${f.severity.toUpperCase()} ${f.code} ${f.location} ${f.message}`;
    const target = findingSlot(f);
    if (target) {
      li.addEventListener("click", () => {
        editor.cursor = { ...target };
        redraw();
      });
    }
    findingsList.appendChild(li);
  }
}

// Error findings with a slot-level location get a marker under the slot so
// 422 responses land visually where the problem is.
function markFindingSlots(): void {
  const svg = score.querySelector("svg");
  if (!svg) return;
  for (const f of findings) {
    if (f.severity !== "error") continue;
    const target = findingSlot(f);
    if (!target) continue;
    const note = svg.querySelector(`#note-${SHORT_OF[target.voice]}-${target.slot}`);
    const mark = document.createElementNS("http://www.w3.org/2000/svg", "text");
    const cx = note?.getAttribute("cx");
    mark.setAttribute("x", cx ?? "0");
    mark.setAttribute("y", "252");
    mark.setAttribute("fill", "#dc2626");
    mark.textContent = "!";
    mark.setAttribute("class", "finding-mark");
    svg.appendChild(mark);
  }
}

async function refreshList(selected?: string): Promise<void> {
  const items = await api.list();
  picker.innerHTML = "";
  for (const item of items) {
    const opt = document.createElement("option");
    opt.value = item.id;
    const title = item.meta["title"];
    opt.textContent = title ? `${item.id} - ${title}` : item.id;
    picker.appendChild(opt);
  }
  if (selected) picker.value = selected;
}

async function open(id: string): Promise<void> {
  const loaded = await api.load(id);
  editor.setLoaded(id, loaded.doc, loaded.etag);
  layer = 0;
  highlight = null;
  recompute();
  redraw();
  setStatus(`loaded ${id} (${loaded.etag.slice(0, 12)})`);
}

async function save(): Promise<void> {
  if (!editor.doc || !editor.id) return;
  const report = validate(editor.doc);
  findings = report.findings;
  if (!report.ok) {
    // The server would reject this with the same codes; keep it local.
    setStatus("not saved: document has validation errors");
    redraw();
    return;
  }
  let result: SaveResult;
  try {
    result = await api.save(editor.id, editor.doc, editor.etag);
  } catch {
    setStatus("network error; your changes are still here");
    return;
  }
  if (result.outcome === "saved") {
    editor.markSaved(result.etag);
    setStatus(`saved (${result.etag.slice(0, 12)})`);
  } else if (result.outcome === "conflict") {
    const reload = confirm(
      "Someone else changed this document. Reload their version? " +
        "Cancel keeps your local edits so you can merge by hand.",
    );
    if (reload && editor.id) {
      await open(editor.id);
      return;
    }
    setStatus("stale: server has a newer version");
  } else if (result.outcome === "invalid") {
    findings = result.findings;
    setStatus("server rejected the document; see findings");
  } else {
    setStatus(`save failed: ${result.message}`);
  }
  recomputeAfterSaveAttempt();
  redraw();
}

function recomputeAfterSaveAttempt(): void {
  // Keep server-reported findings visible but refresh local state too.
  const serverFindings = findings;
  recompute();
  if (serverFindings.length && !findings.length) findings = serverFindings;
}

function hoverTarget(el: Element | null): void {
  highlight = null;
  if (stack && layer > 0 && el instanceof SVGElement) {
    const m = /^note-(sop|alto|ten|bass)-(\d+)$/.exec(el.id ?? "");
    if (m) {
      const voice = VOICES.find((v) => SHORT_OF[v] === m[1])!;
      const ref = noteRef(voice, parseInt(m[2]!, 10));
      const col = survivorLabels(stack, layer).indexOf(ref);
      if (col >= 0) highlight = new Set(ancestorLabels(stack, layer, col));
    }
  }
  redraw();
}

picker.addEventListener("change", () => {
  void open(picker.value).catch(() => setStatus(`failed to load ${picker.value}`));
});

saveButton.addEventListener("click", () => void save());

slider.addEventListener("input", () => {
  layer = parseInt(slider.value, 10) || 0;
  redraw();
});

score.addEventListener("mousemove", (evt) => {
  hoverTarget(evt.target as Element | null);
});
score.addEventListener("mouseleave", () => {
  highlight = null;
  redraw();
});
score.addEventListener("click", (evt) => {
  if (!editor.doc) return;
  const svg = score.querySelector("svg");
  if (!svg) return;
  const rect = svg.getBoundingClientRect();
  const slot = slotFromX(evt.clientX - rect.left, editor.slots);
  if (slot === null) return;
  const voice = voiceFromY(evt.clientY - rect.top);
  editor.cursor = { voice, slot };
  redraw();
});

window.addEventListener("keydown", (evt) => {
  if (evt.target instanceof HTMLInputElement || evt.target instanceof HTMLSelectElement) return;
  if (evt.ctrlKey || evt.metaKey || evt.altKey) {
    if ((evt.key === "s" || evt.key === "S") && (evt.ctrlKey || evt.metaKey)) {
      evt.preventDefault();
      void save();
    }
    return;
  }
  if (editor.handleKey(evt.key)) {
    evt.preventDefault();
    recompute();
    redraw();
  }
});

void (async () => {
  try {
    await refreshList();
    if (picker.value) await open(picker.value);
    else setStatus("no analyses on the server yet");
  } catch {
    setStatus("cannot reach the service; start it with: schakit serve --root <dir> --cors <origin>");
  }
})();
