// Client-side mirror of the server's clustering layers, used by the
// reduction explorer so slider moves and hover queries need no round trip.
// Row order is verticality index major, voice order minor; entries are
// 0, 0.5, or 1 and every row sums to 1.

import {
  AnalysisDoc,
  SHORT_OF,
  VOICES,
  VoiceName,
  isPitchToken,
  voiceOf,
  slotCount,
} from "./model.js";

export class ReductionError extends Error {
  code: string;
  constructor(code: string, message: string) {
    super(message);
    this.code = code;
  }
}

export interface LiveNote {
  voice: VoiceName;
  index: number;
  depth: number;
}

export interface Layer {
  rows: number;
  cols: number;
  data: number[][];
  rowLabels: string[];
  colLabels: string[];
}

export interface Stack {
  n0: number;
  layers: Layer[];
}

export function noteRef(voice: VoiceName, index: number): string {
  return `${SHORT_OF[voice]}:${index}`;
}

export function liveNotes(doc: AnalysisDoc): LiveNote[] {
  const out: LiveNote[] = [];
  const n = slotCount(doc);
  for (let i = 0; i < n; i++) {
    for (const voice of VOICES) {
      const v = voiceOf(doc, voice);
      if (isPitchToken(v.pitches[i] ?? "R")) {
        out.push({ voice, index: i, depth: v.depths[i] ?? 0 });
      }
    }
  }
  return out;
}

const OUTER = new Set<VoiceName>(["soprano", "bass"]);

export function clusterAssignment(
  voice: VoiceName,
  index: number,
  notes: LiveNote[],
  lenient = false,
): [VoiceName, number, number][] {
  const own = notes.filter((n) => n.voice === voice && n.depth > 0);
  const left = own.filter((n) => n.index < index);
  if (left.length) {
    const j = Math.max(...left.map((n) => n.index));
    return [[voice, j, 1]];
  }
  const right = own.filter((n) => n.index > index);
  if (right.length) {
    const j = Math.min(...right.map((n) => n.index));
    return [[voice, j, 1]];
  }

  if (OUTER.has(voice)) {
    if (!lenient) {
      throw new ReductionError(
        "E_INFEASIBLE",
        `outer voice ${SHORT_OF[voice]} has no positive-depth note to absorb index ${index}`,
      );
    }
    const other: VoiceName = voice === "soprano" ? "bass" : "soprano";
    const targets = notes.filter((n) => n.voice === other && n.depth > 0);
    if (!targets.length) {
      throw new ReductionError(
        "E_INFEASIBLE",
        `lenient fallback for ${SHORT_OF[voice]} index ${index}: no survivor in ${SHORT_OF[other]}`,
      );
    }
    let best = targets[0]!;
    for (const t of targets) {
      const da = Math.abs(t.index - index);
      const db = Math.abs(best.index - index);
      if (da < db || (da === db && t.index < best.index)) best = t;
    }
    return [[other, best.index, 1]];
  }

  const sops = notes.filter((n) => n.voice === "soprano" && n.depth > 0).map((n) => n.index);
  const basses = notes.filter((n) => n.voice === "bass" && n.depth > 0).map((n) => n.index);
  if (!sops.length || !basses.length) {
    const missing = sops.length ? "bass" : "soprano";
    throw new ReductionError(
      "E_INFEASIBLE",
      `inner voice ${SHORT_OF[voice]} index ${index} needs a 50/50 split but ${missing} has no survivor`,
    );
  }

  let pairs: [number, number][] = [];
  for (const j1 of sops) {
    for (const j2 of basses) {
      if ((index - j1) * (index - j2) <= 0) pairs.push([j1, j2]);
    }
  }
  if (!pairs.length) {
    // All outer survivors sit on one side; relax the opposite-side rule.
    for (const j1 of sops) for (const j2 of basses) pairs.push([j1, j2]);
  }
  const rank = (j1: number, j2: number): [number, number, number, number] => {
    const d1 = Math.abs(index - j1);
    const d2 = Math.abs(index - j2);
    return [Math.min(d1, d2), Math.max(d1, d2), j1, j2];
  };
  let bestPair = pairs[0]!;
  let bestRank = rank(...bestPair);
  for (const p of pairs.slice(1)) {
    const r = rank(...p);
    for (let k = 0; k < 4; k++) {
      if (r[k]! < bestRank[k]!) {
        bestPair = p;
        bestRank = r;
        break;
      }
      if (r[k]! > bestRank[k]!) break;
    }
  }
  const [j1, j2] = bestPair;
  return [
    ["soprano", j1, 0.5],
    ["bass", j2, 0.5],
  ];
}

export function buildLayer(notes: LiveNote[], lenient = false): Layer {
  const rowLabels = notes.map((n) => noteRef(n.voice, n.index));
  const survivors = notes.filter((n) => n.depth > 0);
  const colLabels = survivors.map((n) => noteRef(n.voice, n.index));
  const colPos = new Map(colLabels.map((ref, k) => [ref, k]));
  const data = notes.map(() => colLabels.map(() => 0));
  notes.forEach((note, r) => {
    const row = data[r]!;
    if (note.depth > 0) {
      row[colPos.get(noteRef(note.voice, note.index))!] = 1;
    } else {
      for (const [voice, j, weight] of clusterAssignment(note.voice, note.index, notes, lenient)) {
        const c = colPos.get(noteRef(voice, j))!;
        row[c] = (row[c] ?? 0) + weight;
      }
    }
  });
  return { rows: notes.length, cols: survivors.length, data, rowLabels, colLabels };
}

export function clusterStack(doc: AnalysisDoc, lenient = false): Stack {
  let notes = liveNotes(doc);
  const n0 = notes.length;
  const layers: Layer[] = [];
  while (notes.length && notes.some((n) => n.depth > 0)) {
    layers.push(buildLayer(notes, lenient));
    notes = notes.filter((n) => n.depth > 0).map((n) => ({ ...n, depth: n.depth - 1 }));
  }
  return { n0, layers };
}

export function compose(stack: Stack, i: number, j: number): number[][] {
  if (!(0 <= i && i < j && j <= stack.layers.length)) {
    throw new ReductionError(
      "E_BOUNDS",
      `compose(${i}, ${j}) outside 0 <= i < j <= ${stack.layers.length}`,
    );
  }
  let out = stack.layers[i]!.data.map((row) => [...row]);
  for (let k = i + 1; k < j; k++) {
    const m = stack.layers[k]!.data;
    const cols = m[0]?.length ?? 0;
    out = out.map((row) => {
      const next = new Array<number>(cols).fill(0);
      row.forEach((x, r) => {
        if (x) for (let c = 0; c < cols; c++) next[c]! += x * m[r]![c]!;
      });
      return next;
    });
  }
  return out;
}

// Labels of the notes alive at a given layer: 0 is the surface, the last
// layer's columns are the final reduction.
export function survivorLabels(stack: Stack, level: number): string[] {
  if (level === 0) {
    return stack.layers.length ? stack.layers[0]!.rowLabels : [];
  }
  const layer = stack.layers[level - 1];
  if (!layer) throw new ReductionError("E_BOUNDS", `no layer ${level}`);
  return layer.colLabels;
}

// Surface notes that cluster (with any weight) into one survivor at `level`.
export function ancestorLabels(stack: Stack, level: number, col: number): string[] {
  const m = compose(stack, 0, level);
  const out: string[] = [];
  m.forEach((row, r) => {
    if ((row[col] ?? 0) > 0) out.push(stack.layers[0]!.rowLabels[r]!);
  });
  return out;
}

export interface Prolongation {
  level: number;
  voice: VoiceName;
  start: number;
  middles: number[];
  end: number;
}

export function prolongationsAtLevel(doc: AnalysisDoc, level: number): Prolongation[] {
  const out: Prolongation[] = [];
  for (const voice of VOICES) {
    const v = voiceOf(doc, voice);
    const notes: [number, number][] = [];
    v.pitches.forEach((p, i) => {
      if (isPitchToken(p)) notes.push([i, v.depths[i] ?? 0]);
    });
    const survivors = notes.filter(([, d]) => d >= level).map(([i]) => i);
    for (let k = 0; k + 1 < survivors.length; k++) {
      const s = survivors[k]!;
      const e = survivors[k + 1]!;
      const middles = notes.filter(([i, d]) => s < i && i < e && d < level).map(([i]) => i);
      out.push({ level, voice, start: s, middles, end: e });
    }
  }
  return out;
}
