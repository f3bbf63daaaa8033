// In-browser SVG rendering. Geometry matches the server renderer: the
// constants come from the generated renderConstants module, and glyph ids
// follow the same naming so tests and hit-testing can address elements.

import {
  AnalysisDoc,
  SHORT_OF,
  VOICES,
  VoiceName,
  diatonicOf,
  isPitchToken,
  parsePitch,
  slotCount,
  voiceOf,
} from "./model.js";
import { noteRef, prolongationsAtLevel } from "./reduction.js";
import * as C from "./renderConstants.js";

const ACCIDENTAL_GLYPHS: Record<number, string> = {
  [-2]: "♭♭",
  [-1]: "♭",
  1: "♯",
  2: "♯♯",
};

export interface Glyph {
  voice: VoiceName;
  index: number;
  x: number;
  y: number;
  depth: number;
  accidental: string | null;
  parenthesized: boolean;
  ursatz: boolean;
}

export interface RenderModel {
  nSlots: number;
  glyphs: Glyph[]; // outer voices
  innerGlyphs: Glyph[];
  stems: { voice: VoiceName; index: number; length: number; up: boolean }[];
  beams: { voice: VoiceName; level: number; start: number; end: number }[];
  slurs: { voice: VoiceName; start: number; end: number; level: number }[];
  harmony: { voice: VoiceName; index: number; text: string }[];
  carets: { voice: VoiceName; index: number; text: string }[];
  crossVoice: { kind: string; src: [VoiceName, number]; dst: [VoiceName, number] }[];
}

export function slotX(index: number): number {
  return C.LEFT_MARGIN + index * C.SLOT_WIDTH + Math.floor(C.SLOT_WIDTH / 2);
}

// Inverse of slotX for click-to-cursor; null outside the slot band.
export function slotFromX(x: number, nSlots: number): number | null {
  const i = Math.floor((x - C.LEFT_MARGIN) / C.SLOT_WIDTH);
  return i >= 0 && i < nSlots ? i : null;
}

export function voiceFromY(y: number): VoiceName {
  const trebleBottom = C.TREBLE_TOP + 4 * C.STAFF_SPACE;
  const mid = Math.floor((trebleBottom + C.BASS_TOP) / 2);
  return y < mid ? "soprano" : "bass";
}

export function noteY(voice: VoiceName, token: string): number {
  const p = parsePitch(token);
  if (!p) throw new Error(`not a pitch token: ${token}`);
  const half = Math.floor(C.STAFF_SPACE / 2);
  if (voice === "soprano" || voice === "alto") {
    const bottom = C.TREBLE_TOP + 4 * C.STAFF_SPACE;
    return bottom - (diatonicOf(p) - C.TREBLE_BOTTOM_LINE) * half;
  }
  const bottom = C.BASS_TOP + 4 * C.STAFF_SPACE;
  return bottom - (diatonicOf(p) - C.BASS_BOTTOM_LINE) * half;
}

export function beamRuns(
  depths: (number | null)[],
  indices: number[],
): [number, number, number][] {
  const present = depths.filter((d): d is number => d !== null);
  if (!present.length) return [];
  const runs: [number, number, number][] = [];
  const top = Math.max(...present);
  for (let level = 1; level <= top; level++) {
    let start: number | null = null;
    const padded: (number | null)[] = [...depths, null];
    padded.forEach((d, pos) => {
      const ok = d !== null && d >= level;
      if (ok && start === null) {
        start = pos;
      } else if (!ok && start !== null) {
        if (pos - start >= 2) runs.push([level, indices[start]!, indices[pos - 1]!]);
        start = null;
      }
    });
  }
  return runs;
}

const LONG_OF: Record<string, VoiceName> = {
  sop: "soprano",
  soprano: "soprano",
  alto: "alto",
  ten: "tenor",
  tenor: "tenor",
  bass: "bass",
};

function caretDegree(pitchToken: string, tonic: string): number {
  const letters = "CDEFGAB";
  const p = parsePitch(pitchToken)!;
  const t = tonic[0] ?? "C";
  return ((letters.indexOf(p.letter) - letters.indexOf(t)) % 7 + 7) % 7 + 1;
}

export function deriveModel(doc: AnalysisDoc): RenderModel {
  const n = slotCount(doc);
  const m: RenderModel = {
    nSlots: n,
    glyphs: [],
    innerGlyphs: [],
    stems: [],
    beams: [],
    slurs: [],
    harmony: [],
    carets: [],
    crossVoice: [],
  };

  for (const voice of VOICES) {
    const v = voiceOf(doc, voice);
    const outer = voice === "soprano" || voice === "bass";
    for (const [idxStr, text] of Object.entries(v.harmony ?? {})) {
      m.harmony.push({ voice, index: parseInt(idxStr, 10), text });
    }
    const seqIndices: number[] = [];
    const seqDepths: (number | null)[] = [];
    v.pitches.forEach((tok, i) => {
      if (!isPitchToken(tok)) return;
      const p = parsePitch(tok);
      if (!p) return;
      const depth = v.depths[i] ?? 0;
      const ursatz = (v.ursatz ?? []).includes(i);
      let acc: string | null = null;
      if (p.accidental !== 0) acc = ACCIDENTAL_GLYPHS[p.accidental] ?? null;
      else if ((v.accidentals ?? []).includes(i)) acc = "♮";
      const g: Glyph = {
        voice,
        index: i,
        x: slotX(i),
        y: noteY(voice, tok),
        depth,
        accidental: acc,
        parenthesized: (v.parens ?? []).includes(i),
        ursatz,
      };
      if (outer) {
        m.glyphs.push(g);
        m.stems.push({
          voice,
          index: i,
          length: C.STEM_BASE + depth * C.STEM_UNIT,
          up: voice === "soprano",
        });
        if (ursatz) {
          m.carets.push({ voice, index: i, text: `^${caretDegree(tok, doc.key.tonic)}` });
        }
        seqIndices.push(i);
        seqDepths.push(depth);
      } else {
        m.innerGlyphs.push(g);
      }
    });
    if (outer) {
      for (const [level, s, e] of beamRuns(seqDepths, seqIndices)) {
        m.beams.push({ voice, level, start: s, end: e });
      }
    }
  }

  let top = 0;
  for (const voice of VOICES) {
    for (const d of voiceOf(doc, voice).depths) if (d !== null && d > top) top = d;
  }
  for (let level = 1; level <= top; level++) {
    for (const p of prolongationsAtLevel(doc, level)) {
      if (p.middles.length && (p.voice === "soprano" || p.voice === "bass")) {
        m.slurs.push({ voice: p.voice, start: p.start, end: p.end, level: p.level });
      }
    }
  }

  for (const c of doc.crossVoice ?? []) {
    const [e1, e2] = c.endpoints;
    if (!e1 || !e2) continue;
    const v1 = LONG_OF[e1[0]];
    const v2 = LONG_OF[e2[0]];
    if (v1 && v2) m.crossVoice.push({ kind: c.kind, src: [v1, e1[1]], dst: [v2, e2[1]] });
  }
  return m;
}

export interface RenderOptions {
  cursor?: { voice: VoiceName; slot: number } | null;
  // Note refs ("sop:3") alive at the chosen layer; anything else is dimmed.
  liveRefs?: Set<string> | null;
  // Note refs to emphasize (hover over a survivor highlights its ancestors).
  highlight?: Set<string> | null;
}

export function width(nSlots: number): number {
  return C.LEFT_MARGIN + Math.max(nSlots, 1) * C.SLOT_WIDTH + C.RIGHT_MARGIN;
}

export function height(): number {
  return C.HARMONY_ROW_Y + 28;
}

export function renderSvg(m: RenderModel, opts: RenderOptions = {}): string {
  const w = width(m.nSlots);
  const h = height();
  const out: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${w}" height="${h}" ` +
      `viewBox="0 0 ${w} ${h}" font-family="serif" font-size="12">`,
    `<rect width="${w}" height="${h}" fill="white"/>`,
  ];

  if (opts.cursor) {
    const cx = slotX(opts.cursor.slot);
    const onTreble = opts.cursor.voice === "soprano" || opts.cursor.voice === "alto";
    const top = (onTreble ? C.TREBLE_TOP : C.BASS_TOP) - 3 * C.STAFF_SPACE;
    out.push(
      `<rect id="cursor" x="${cx - C.SLOT_WIDTH / 2}" y="${top}" width="${C.SLOT_WIDTH}" ` +
        `height="${10 * C.STAFF_SPACE}" fill="#dbeafe" stroke="#60a5fa"/>`,
    );
  }

  const staffNames: [string, number][] = [
    ["treble", C.TREBLE_TOP],
    ["bass", C.BASS_TOP],
  ];
  for (const [name, top] of staffNames) {
    for (let ln = 0; ln < 5; ln++) {
      const y = top + ln * C.STAFF_SPACE;
      out.push(
        `<line id="staff-${name}-${ln}" x1="${C.LEFT_MARGIN}" y1="${y}" ` +
          `x2="${w - C.RIGHT_MARGIN}" y2="${y}" stroke="black" stroke-width="1"/>`,
      );
    }
  }

  const glyphY = new Map<string, number>();
  for (const g of [...m.glyphs, ...m.innerGlyphs]) glyphY.set(noteRef(g.voice, g.index), g.y);
  const stemByNote = new Map(m.stems.map((s) => [noteRef(s.voice, s.index), s]));
  const dimmed = (ref: string): boolean =>
    opts.liveRefs != null && !opts.liveRefs.has(ref);

  for (const s of m.stems) {
    const ref = noteRef(s.voice, s.index);
    const y = glyphY.get(ref)!;
    const x = slotX(s.index) + (s.up ? C.NOTEHEAD_RX : -C.NOTEHEAD_RX);
    const y2 = s.up ? y - s.length : y + s.length;
    const extra = dimmed(ref) ? ' opacity="0.25"' : "";
    out.push(
      `<line id="stem-${SHORT_OF[s.voice]}-${s.index}" x1="${x}" y1="${y}" ` +
        `x2="${x}" y2="${y2}" stroke="black" stroke-width="1"${extra}/>`,
    );
  }

  for (const b of m.beams) {
    const up = b.voice === "soprano";
    const xs = slotX(b.start) + (up ? C.NOTEHEAD_RX : -C.NOTEHEAD_RX);
    const xe = slotX(b.end) + (up ? C.NOTEHEAD_RX : -C.NOTEHEAD_RX);
    const tips: number[] = [];
    for (const g of m.glyphs) {
      if (g.voice === b.voice && b.start <= g.index && g.index <= b.end) {
        const s = stemByNote.get(noteRef(g.voice, g.index))!;
        tips.push(up ? g.y - s.length : g.y + s.length);
      }
    }
    const y = up
      ? Math.min(...tips) + (b.level - 1) * 4
      : Math.max(...tips) - (b.level - 1) * 4;
    out.push(
      `<rect id="beam-${SHORT_OF[b.voice]}-${b.level}-${b.start}-${b.end}" class="beam" ` +
        `x="${Math.min(xs, xe)}" y="${y - 1}" width="${Math.abs(xe - xs)}" height="3" fill="black"/>`,
    );
  }

  const ordered = [...m.glyphs, ...m.innerGlyphs].sort(
    (a, b) => VOICES.indexOf(a.voice) - VOICES.indexOf(b.voice) || a.index - b.index,
  );
  for (const g of ordered) {
    const ref = noteRef(g.voice, g.index);
    const inner = g.voice === "alto" || g.voice === "tenor";
    const classes = ["notehead"];
    if (dimmed(ref)) classes.push("reduced-out");
    if (opts.highlight?.has(ref)) classes.push("highlight");
    const fill = opts.highlight?.has(ref) ? "#2563eb" : inner ? "none" : "black";
    const extra = dimmed(ref) ? ' opacity="0.25"' : "";
    out.push(
      `<ellipse id="note-${SHORT_OF[g.voice]}-${g.index}" class="${classes.join(" ")}" ` +
        `cx="${g.x}" cy="${g.y}" rx="${C.NOTEHEAD_RX}" ry="${C.NOTEHEAD_RY}" ` +
        `fill="${fill}" stroke="black"${extra}/>`,
    );
    if (g.accidental) {
      out.push(
        `<text id="acc-${SHORT_OF[g.voice]}-${g.index}" x="${g.x - 18}" y="${g.y + 4}">` +
          `${g.accidental}</text>`,
      );
    }
    if (g.voice === "soprano" || g.voice === "bass") {
      out.push(
        `<text id="depth-${SHORT_OF[g.voice]}-${g.index}" class="depth-label" ` +
          `x="${g.x - 26}" y="${g.y + 4}" font-size="10"${extra}>${g.depth}</text>`,
      );
    }
    if (g.parenthesized) {
      out.push(
        `<text id="paren-open-${SHORT_OF[g.voice]}-${g.index}" class="paren" ` +
          `x="${g.x - 12}" y="${g.y + 4}">(</text>`,
      );
      out.push(
        `<text id="paren-close-${SHORT_OF[g.voice]}-${g.index}" class="paren" ` +
          `x="${g.x + 8}" y="${g.y + 4}">)</text>`,
      );
    }
  }

  for (const s of m.slurs) {
    const up = s.voice === "soprano";
    const x1 = slotX(s.start);
    const x2 = slotX(s.end);
    const off = up ? -C.NOTEHEAD_RY - 2 : C.NOTEHEAD_RY + 2;
    const y1 = glyphY.get(noteRef(s.voice, s.start))! + off;
    const y2 = glyphY.get(noteRef(s.voice, s.end))! + off;
    const rise = 10 + 4 * s.level;
    const cy = up ? Math.min(y1, y2) - rise : Math.max(y1, y2) + rise;
    out.push(
      `<path id="slur-${SHORT_OF[s.voice]}-${s.start}-${s.end}" class="slur" ` +
        `d="M ${x1} ${y1} Q ${Math.floor((x1 + x2) / 2)} ${cy} ${x2} ${y2}" ` +
        `fill="none" stroke="black" stroke-width="1"/>`,
    );
  }

  for (const t of m.carets) {
    out.push(
      `<text id="caret-${SHORT_OF[t.voice]}-${t.index}" class="caret" ` +
        `x="${slotX(t.index) - 6}" y="${C.CARET_ROW_Y}">${t.text}</text>`,
    );
  }
  for (const t of m.harmony) {
    out.push(
      `<text id="harm-${SHORT_OF[t.voice]}-${t.index}" class="harmony" ` +
        `x="${slotX(t.index) - 6}" y="${C.HARMONY_ROW_Y}">${t.text}</text>`,
    );
  }

  m.crossVoice.forEach((c, k) => {
    const [v1, i1] = c.src;
    const [v2, i2] = c.dst;
    const y1 = glyphY.get(noteRef(v1, i1)) ?? C.TREBLE_TOP + 2 * C.STAFF_SPACE;
    const y2 = glyphY.get(noteRef(v2, i2)) ?? C.BASS_TOP + 2 * C.STAFF_SPACE;
    out.push(
      `<line id="xv-${k}" class="cross-voice ${c.kind}" x1="${slotX(i1)}" y1="${y1}" ` +
        `x2="${slotX(i2)}" y2="${y2}" stroke="black" stroke-width="1" stroke-dasharray="4 3"/>`,
    );
  });

  out.push("</svg>");
  return out.join("\n") + "\n";
}
