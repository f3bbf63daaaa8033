// Client-side validation. Outcomes (ok flag and finding codes) match what
// the service reports for the rules implemented here, so the editor can
// refuse a save that the server would reject anyway.

import { AnalysisDoc, SHORT_OF, VOICES, VoiceName, isPitchToken, voiceOf } from "./model.js";
import { LiveNote, liveNotes } from "./reduction.js";

export type Severity = "error" | "warning";

export interface Finding {
  severity: Severity;
  code: string;
  location: string;
  message: string;
}

export interface Report {
  ok: boolean;
  findings: Finding[];
}

const LONG_TO_SHORT: Record<string, string> = {
  soprano: "sop",
  sop: "sop",
  alto: "alto",
  tenor: "ten",
  ten: "ten",
  bass: "bass",
};

export function validate(doc: AnalysisDoc, lenient = false): Report {
  const findings = structuralFindings(doc);
  if (!findings.some((f) => f.code === "V_LENGTH" || f.code === "V_HOLD")) {
    findings.push(...feasibilityFindings(doc, lenient));
    findings.push(...warningFindings(doc));
  }
  return { ok: !findings.some((f) => f.severity === "error"), findings };
}

function structuralFindings(doc: AnalysisDoc): Finding[] {
  const out: Finding[] = [];
  const lengths = VOICES.map((name) => voiceOf(doc, name).pitches.length);
  if (new Set(lengths).size > 1) {
    const detail = VOICES.map((name, k) => `${SHORT_OF[name]}=${lengths[k]}`).join(", ");
    out.push({
      severity: "error",
      code: "V_LENGTH",
      location: "-",
      message: `voices have unequal slot counts (${detail})`,
    });
    return out;
  }

  for (const name of VOICES) {
    const v = voiceOf(doc, name);
    v.pitches.forEach((p, i) => {
      if (p === "_" && (i === 0 || v.pitches[i - 1] === "R")) {
        out.push({
          severity: "error",
          code: "V_HOLD",
          location: `${SHORT_OF[name]}[${i}]`,
          message: "hold must follow a pitch or hold slot",
        });
      }
    });
  }

  const nSlots = lengths[0] ?? 0;
  (doc.crossVoice ?? []).forEach((sym, k) => {
    for (const [rawName, idx] of sym.endpoints) {
      const short = LONG_TO_SHORT[rawName];
      const long = VOICES.find((v) => SHORT_OF[v] === short);
      const pitched =
        long !== undefined &&
        idx >= 0 &&
        idx < nSlots &&
        isPitchToken(voiceOf(doc, long).pitches[idx] ?? "R");
      if (!pitched) {
        out.push({
          severity: "error",
          code: "V_INDEX",
          location: `crossVoice[${k}]`,
          message: `endpoint (${short ?? rawName}, ${idx}) does not reference a pitched slot`,
        });
      }
    }
  });
  return out;
}

function feasibilityFindings(doc: AnalysisDoc, lenient: boolean): Finding[] {
  const out: Finding[] = [];
  let live: LiveNote[] = liveNotes(doc);
  const reported = new Set<string>();
  let layer = 0;
  while (live.length) {
    const clustering = live.some((n) => n.depth > 0);
    // Layer 0 is checked even when nothing clusters; the final all-zero
    // layer of a deeper analysis is the result and is not checked.
    if (layer > 0 && !clustering) break;
    const zeros = live.filter((n) => n.depth === 0);
    const survivors = new Map<VoiceName, boolean>(
      VOICES.map((p) => [p, live.some((n) => n.voice === p && n.depth > 0)]),
    );
    for (const { voice } of zeros) {
      if (survivors.get(voice)) continue;
      if (voice === "soprano" || voice === "bass") {
        if (reported.has(`V_NO_SURVIVOR|${voice}`)) continue;
        reported.add(`V_NO_SURVIVOR|${voice}`);
        const other: VoiceName = voice === "soprano" ? "bass" : "soprano";
        const fallbackOk = !clustering || survivors.get(other) === true;
        if (lenient && fallbackOk) {
          const detail = clustering
            ? `falling back to the ${SHORT_OF[other]} voice`
            : "all depths are 0; nothing clusters";
          out.push({
            severity: "warning",
            code: "V_NO_SURVIVOR",
            location: SHORT_OF[voice],
            message: `no positive-depth note at layer ${layer}; ${detail}`,
          });
        } else {
          let msg = `outer voice has no positive-depth note at layer ${layer}`;
          if (lenient && !fallbackOk) {
            msg += ` and the ${SHORT_OF[other]} voice offers no fallback target`;
          }
          out.push({ severity: "error", code: "V_NO_SURVIVOR", location: SHORT_OF[voice], message: msg });
        }
      } else {
        if (reported.has(`V_INNER_NEEDS_OUTER|${voice}`)) continue;
        const missing = (["soprano", "bass"] as VoiceName[])
          .filter((q) => !survivors.get(q))
          .map((q) => SHORT_OF[q]);
        if (missing.length) {
          reported.add(`V_INNER_NEEDS_OUTER|${voice}`);
          out.push({
            severity: "error",
            code: "V_INNER_NEEDS_OUTER",
            location: SHORT_OF[voice],
            message:
              `inner voice needs a 50/50 split at layer ${layer} but ` +
              `${missing.join(" and ")} ${missing.length === 1 ? "has" : "have"} no positive-depth note`,
          });
        }
      }
    }
    live = live.filter((n) => n.depth > 0).map((n) => ({ ...n, depth: n.depth - 1 }));
    layer += 1;
  }
  return out;
}

function warningFindings(doc: AnalysisDoc): Finding[] {
  const out: Finding[] = [];
  const notes = liveNotes(doc);
  if (!notes.length) return out;
  if (notes.every((n) => n.depth > 0)) {
    out.push({
      severity: "warning",
      code: "W_ALL_POSITIVE",
      location: "-",
      message: "no depth-0 note anywhere; first clustering layer is an identity",
    });
  }
  const anyUrsatz = VOICES.some((name) => {
    const v = voiceOf(doc, name);
    return (v.ursatz ?? []).some((i) => isPitchToken(v.pitches[i] ?? "R"));
  });
  if (!anyUrsatz) {
    out.push({
      severity: "warning",
      code: "W_NO_URSATZ",
      location: "-",
      message: "no note is marked as part of the Ursatz",
    });
  }
  return out;
}
