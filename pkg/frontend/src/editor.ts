// Editing state: a working copy of one analysis, a cursor, and the keyboard
// command map. The dirty flag compares the normalized working copy against
// the content the server last acknowledged, so undone edits clear it again.

import {
  AnalysisDoc,
  HOLD,
  REST,
  VOICES,
  VoiceName,
  cloneDoc,
  isPitchToken,
  normalizeDoc,
  parsePitch,
  pitchToken,
  slotCount,
  stableStringify,
  voiceOf,
} from "./model.js";

export interface Cursor {
  voice: VoiceName;
  slot: number;
}

const DEFAULT_OCTAVE: Record<VoiceName, number> = {
  soprano: 4,
  alto: 4,
  tenor: 3,
  bass: 3,
};

const INDEX_SET_KEYS = ["ursatz", "flags", "parens", "accidentals"] as const;

export class EditorState {
  id: string | null = null;
  doc: AnalysisDoc | null = null;
  etag: string | null = null;
  cursor: Cursor = { voice: "soprano", slot: 0 };
  private lastAcked: string | null = null;

  setLoaded(id: string, doc: AnalysisDoc, etag: string): void {
    this.id = id;
    this.doc = normalizeDoc(cloneDoc(doc));
    this.etag = etag;
    this.lastAcked = stableStringify(this.doc);
    this.cursor = { voice: "soprano", slot: 0 };
  }

  // Called when a save came back 200/201: the current content is now the
  // acknowledged one.
  markSaved(etag: string): void {
    if (!this.doc) return;
    this.etag = etag;
    this.lastAcked = stableStringify(normalizeDoc(this.doc));
  }

  get dirty(): boolean {
    if (!this.doc || this.lastAcked === null) return false;
    return stableStringify(normalizeDoc(this.doc)) !== this.lastAcked;
  }

  get slots(): number {
    return this.doc ? slotCount(this.doc) : 0;
  }

  // Returns true when the key was an editing command (so the caller can
  // re-render and stop the browser from scrolling).
  handleKey(key: string): boolean {
    if (!this.doc) return false;
    switch (key) {
      case "ArrowLeft":
        this.cursor.slot = Math.max(0, this.cursor.slot - 1);
        return true;
      case "ArrowRight":
        this.cursor.slot = Math.min(Math.max(this.slots - 1, 0), this.cursor.slot + 1);
        return true;
      case "ArrowUp":
        this.cursor.voice = VOICES[Math.max(0, VOICES.indexOf(this.cursor.voice) - 1)]!;
        return true;
      case "ArrowDown":
        this.cursor.voice =
          VOICES[Math.min(VOICES.length - 1, VOICES.indexOf(this.cursor.voice) + 1)]!;
        return true;
      case "+":
      case "=":
        return this.bumpDepth(1);
      case "-":
      case "_":
        return this.bumpDepth(-1);
      case "u":
        return this.toggleSet("ursatz");
      case "p":
        return this.toggleSet("parens");
      case "[":
        return this.bumpOctave(-1);
      case "]":
        return this.bumpOctave(1);
      case "#":
        return this.cycleAccidental();
      case "r":
        return this.setRest();
      case "h":
        return this.setHold();
      default:
        if (/^[a-gA-G]$/.test(key)) return this.setLetter(key.toUpperCase());
        return false;
    }
  }

  private voiceData() {
    return voiceOf(this.doc!, this.cursor.voice);
  }

  private bumpDepth(delta: number): boolean {
    const v = this.voiceData();
    const i = this.cursor.slot;
    if (!isPitchToken(v.pitches[i] ?? REST)) return true;
    v.depths[i] = Math.max(0, (v.depths[i] ?? 0) + delta);
    return true;
  }

  private setLetter(letter: string): boolean {
    const v = this.voiceData();
    const i = this.cursor.slot;
    const current = v.pitches[i] ?? REST;
    const parsed = isPitchToken(current) ? parsePitch(current) : null;
    const octave = parsed ? parsed.octave : DEFAULT_OCTAVE[this.cursor.voice];
    const accidental = parsed ? parsed.accidental : 0;
    v.pitches[i] = pitchToken({ letter, accidental, octave });
    if (!parsed) v.depths[i] = 0;
    return true;
  }

  private bumpOctave(delta: number): boolean {
    const v = this.voiceData();
    const i = this.cursor.slot;
    const parsed = isPitchToken(v.pitches[i] ?? REST) ? parsePitch(v.pitches[i]!) : null;
    if (!parsed) return true;
    const moved = { ...parsed, octave: parsed.octave + delta };
    const midi = 12 * (moved.octave + 1);
    if (midi >= 0 && midi <= 120) v.pitches[i] = pitchToken(moved);
    return true;
  }

  private cycleAccidental(): boolean {
    const v = this.voiceData();
    const i = this.cursor.slot;
    const parsed = isPitchToken(v.pitches[i] ?? REST) ? parsePitch(v.pitches[i]!) : null;
    if (!parsed) return true;
    const next = { 0: 1, 1: -1, [-1]: 0 }[parsed.accidental] ?? 0;
    v.pitches[i] = pitchToken({ ...parsed, accidental: next });
    return true;
  }

  private toggleSet(key: (typeof INDEX_SET_KEYS)[number]): boolean {
    const v = this.voiceData();
    const i = this.cursor.slot;
    if (!isPitchToken(v.pitches[i] ?? REST)) return true;
    const set = new Set(v[key] ?? []);
    if (set.has(i)) set.delete(i);
    else set.add(i);
    if (set.size) v[key] = [...set].sort((a, b) => a - b);
    else delete v[key];
    return true;
  }

  private clearSlotMarks(i: number): void {
    const v = this.voiceData();
    for (const key of INDEX_SET_KEYS) {
      const kept = (v[key] ?? []).filter((k) => k !== i);
      if (kept.length) v[key] = kept;
      else delete v[key];
    }
  }

  private setRest(): boolean {
    const v = this.voiceData();
    const i = this.cursor.slot;
    v.pitches[i] = REST;
    v.depths[i] = null;
    this.clearSlotMarks(i);
    // A hold can only follow a pitch or hold, so the run after a new rest
    // has to become rests too.
    for (let k = i + 1; k < v.pitches.length && v.pitches[k] === HOLD; k++) {
      v.pitches[k] = REST;
      v.depths[k] = null;
    }
    return true;
  }

  private setHold(): boolean {
    const v = this.voiceData();
    const i = this.cursor.slot;
    if (i === 0 || v.pitches[i - 1] === REST) return true;
    v.pitches[i] = HOLD;
    v.depths[i] = null;
    this.clearSlotMarks(i);
    return true;
  }
}
