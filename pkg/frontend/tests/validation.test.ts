import { describe, expect, it } from "vitest";

import { AnalysisDoc, normalizeDoc } from "../src/model.js";
import { validate } from "../src/validation.js";
import { fixtureA, fixtureB } from "./fixtures.js";

function doc(voices: AnalysisDoc["voices"]): AnalysisDoc {
  return normalizeDoc({ key: { tonic: "C", mode: "major" }, voices });
}

describe("validate", () => {
  it("accepts the worked examples with only an Ursatz warning", () => {
    for (const fixture of [fixtureA(), fixtureB()]) {
      const report = validate(normalizeDoc(fixture));
      expect(report.ok).toBe(true);
      expect(report.findings.map((f) => f.code)).toEqual(["W_NO_URSATZ"]);
    }
  });

  it("rejects an outer voice with no positive depth", () => {
    const report = validate(doc({ soprano: { pitches: ["C5"], depths: [0] } }));
    expect(report.ok).toBe(false);
    const codes = report.findings.map((f) => `${f.severity}:${f.code}:${f.location}`);
    expect(codes).toContain("error:V_NO_SURVIVOR:sop");
  });

  it("catches voices stranded only at deeper layers", () => {
    const report = validate(
      doc({
        soprano: { pitches: ["C5", "D5"], depths: [1, 1] },
        bass: { pitches: ["C3", "G2"], depths: [2, 2] },
      }),
    );
    expect(report.ok).toBe(false);
    const bad = report.findings.find((f) => f.code === "V_NO_SURVIVOR");
    expect(bad?.location).toBe("sop");
    expect(bad?.message).toContain("layer 1");
  });

  it("requires both outer voices for a stranded inner voice", () => {
    const report = validate(
      doc({
        soprano: { pitches: ["C5"], depths: [1] },
        alto: { pitches: ["E4"], depths: [0] },
      }),
    );
    expect(report.ok).toBe(false);
    const bad = report.findings.find((f) => f.code === "V_INNER_NEEDS_OUTER");
    expect(bad?.location).toBe("alto");
    expect(bad?.message).toContain("bass has no positive-depth note");
  });

  it("degrades the stranded-outer error under lenient when a fallback exists", () => {
    const d = doc({
      soprano: { pitches: ["C5", "R"], depths: [0, null] },
      bass: { pitches: ["C3", "G2"], depths: [1, 1] },
    });
    expect(validate(d).ok).toBe(false);
    const lenient = validate(d, true);
    expect(lenient.ok).toBe(true);
    const warn = lenient.findings.find((f) => f.code === "V_NO_SURVIVOR");
    expect(warn?.severity).toBe("warning");
  });

  it("flags all-positive depths as a warning only", () => {
    const report = validate(doc({ soprano: { pitches: ["C5", "D5"], depths: [1, 1] } }));
    expect(report.ok).toBe(true);
    expect(report.findings.map((f) => f.code)).toContain("W_ALL_POSITIVE");
  });

  it("reports structural slot problems before feasibility", () => {
    const holds = validate(doc({ soprano: { pitches: ["R", "_"], depths: [null, null] } }));
    expect(holds.findings.map((f) => f.code)).toEqual(["V_HOLD"]);
    const lengths = validate({
      key: { tonic: "C", mode: "major" },
      voices: {
        soprano: { pitches: ["C5"], depths: [1] },
        bass: { pitches: ["C3", "G2"], depths: [1, 1] },
      },
    });
    expect(lengths.findings.map((f) => f.code)).toEqual(["V_LENGTH"]);
  });

  it("checks cross-voice endpoints", () => {
    const d = doc({ soprano: { pitches: ["C5", "R"], depths: [1, null] } });
    d.crossVoice = [{ kind: "voice-exchange", endpoints: [["soprano", 0], ["bass", 1]] }];
    const report = validate(d);
    const bad = report.findings.find((f) => f.code === "V_INDEX");
    expect(bad?.location).toBe("crossVoice[0]");
    expect(bad?.message).toContain("(bass, 1)");
  });
});
