// Document model shared by the editor, the client-side reduction, and the
// API layer. Mirrors the .scha.json schema; see FORMAT.md in the repo root.

export type VoiceName = "soprano" | "alto" | "tenor" | "bass";

export const VOICES: VoiceName[] = ["soprano", "alto", "tenor", "bass"];
export const OUTER_VOICES: VoiceName[] = ["soprano", "bass"];

const SHORT_NAMES: Record<string, VoiceName> = {
  sop: "soprano",
  soprano: "soprano",
  alto: "alto",
  ten: "tenor",
  tenor: "tenor",
  bass: "bass",
};

export const SHORT_OF: Record<VoiceName, string> = {
  soprano: "sop",
  alto: "alto",
  tenor: "ten",
  bass: "bass",
};

export interface VoiceData {
  pitches: string[];
  depths: (number | null)[];
  ursatz?: number[];
  flags?: number[];
  parens?: number[];
  accidentals?: number[];
  harmony?: Record<string, string>;
}

export interface AnalysisDoc {
  key: { tonic: string; mode: string };
  voices: Partial<Record<VoiceName, VoiceData>>;
  meta?: Record<string, string>;
  meter?: { beatsPerBar: number; beatUnit?: number; offset?: number };
  crossVoice?: { kind: string; endpoints: [string, number][] }[];
  customProlongations?: unknown[];
  [extra: string]: unknown;
}

export const REST = "R";
export const HOLD = "_";

export interface Pitch {
  letter: string;
  accidental: number; // -2..2
  octave: number;
}

const LETTER_STEPS: Record<string, number> = { C: 0, D: 2, E: 4, F: 5, G: 7, A: 9, B: 11 };
const LETTER_INDEX: Record<string, number> = { C: 0, D: 1, E: 2, F: 3, G: 4, A: 5, B: 6 };
const ACC_SUFFIX: Record<number, string> = { [-2]: "bb", [-1]: "b", 0: "", 1: "#", 2: "##" };

const PITCH_RE = /^([A-G])(bb|b|##|#)?(-?\d+)$/;

export function parsePitch(token: string): Pitch | null {
  const m = PITCH_RE.exec(token);
  if (!m) return null;
  const acc = { bb: -2, b: -1, "#": 1, "##": 2 }[m[2] ?? ""] ?? 0;
  const p = { letter: m[1]!, accidental: acc, octave: parseInt(m[3]!, 10) };
  const midi = midiOf(p);
  return midi >= 0 && midi <= 127 ? p : null;
}

export function pitchToken(p: Pitch): string {
  return `${p.letter}${ACC_SUFFIX[p.accidental]}${p.octave}`;
}

export function midiOf(p: Pitch): number {
  return 12 * (p.octave + 1) + LETTER_STEPS[p.letter]! + p.accidental;
}

// Diatonic staff position: letter step within the octave plus 7 per octave.
// Accidentals do not move the notehead.
export function diatonicOf(p: Pitch): number {
  return 7 * p.octave + LETTER_INDEX[p.letter]!;
}

export function isPitchToken(token: string): boolean {
  return token !== REST && token !== HOLD;
}

export function emptyVoice(slots: number): VoiceData {
  return {
    pitches: new Array(slots).fill(REST),
    depths: new Array(slots).fill(null),
  };
}

export function voiceOf(doc: AnalysisDoc, name: VoiceName): VoiceData {
  const v = doc.voices[name];
  if (v) return v;
  const filled = emptyVoice(slotCount(doc));
  doc.voices[name] = filled;
  return filled;
}

export function slotCount(doc: AnalysisDoc): number {
  for (const name of VOICES) {
    const v = doc.voices[name];
    if (v) return v.pitches.length;
  }
  return 0;
}

export function maxDepth(doc: AnalysisDoc): number {
  let m = 0;
  for (const name of VOICES) {
    for (const d of doc.voices[name]?.depths ?? []) {
      if (d !== null && d > m) m = d;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Normalization: the same shape the service's canonical serializer produces,
// so string equality on stableStringify(normalizeDoc(...)) detects unsaved
// changes without false positives.
// ---------------------------------------------------------------------------

export function normalizeDoc(raw: AnalysisDoc): AnalysisDoc {
  const doc: AnalysisDoc = { key: { ...raw.key }, voices: {} };

  let slots = 0;
  for (const [name, v] of Object.entries(raw.voices)) {
    if (v) slots = Math.max(slots, v.pitches.length);
    if (!(name in SHORT_NAMES)) throw new Error(`unknown voice name ${name}`);
  }
  for (const long of VOICES) {
    const src =
      raw.voices[long] ?? (raw.voices as Record<string, VoiceData | undefined>)[SHORT_OF[long]];
    const out: VoiceData = src
      ? {
          pitches: [...src.pitches],
          depths: src.depths ? [...src.depths] : new Array(src.pitches.length).fill(null),
        }
      : emptyVoice(slots);
    for (const key of ["ursatz", "flags", "parens", "accidentals"] as const) {
      const indices = src?.[key];
      if (indices && indices.length) out[key] = [...indices].sort((a, b) => a - b);
    }
    if (src?.harmony && Object.keys(src.harmony).length) out.harmony = { ...src.harmony };
    doc.voices[long] = out;
  }

  if (raw.meta && Object.keys(raw.meta).length) doc.meta = { ...raw.meta };
  if (raw.meter) doc.meter = { ...raw.meter };
  if (raw.crossVoice && raw.crossVoice.length) doc.crossVoice = raw.crossVoice;
  if (raw.customProlongations && raw.customProlongations.length) {
    doc.customProlongations = raw.customProlongations;
  }
  for (const [k, v] of Object.entries(raw)) {
    if (!["key", "voices", "meta", "meter", "crossVoice", "customProlongations"].includes(k)) {
      doc[k] = v;
    }
  }
  return doc;
}

// JSON.stringify with object keys sorted at every level, matching the
// service's sort_keys order for comparison purposes.
export function stableStringify(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(stableStringify).join(",")}]`;
  }
  if (value !== null && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${stableStringify(v)}`);
    return `{${entries.join(",")}}`;
  }
  return JSON.stringify(value);
}

export function cloneDoc(doc: AnalysisDoc): AnalysisDoc {
  return JSON.parse(JSON.stringify(doc)) as AnalysisDoc;
}
