import { AnalysisDoc } from "../src/model.js";

// Worked examples shared with the backend test suite: a five-note soprano
// line with depths 3 1 0 2 3, and a three-slot three-voice texture whose
// stranded alto forces a 50/50 split.

export function fixtureA(): AnalysisDoc {
  return {
    key: { tonic: "C", mode: "major" },
    voices: {
      soprano: { pitches: ["C5", "D5", "E5", "D5", "C5"], depths: [3, 1, 0, 2, 3] },
    },
  };
}

export function fixtureB(): AnalysisDoc {
  return {
    key: { tonic: "C", mode: "major" },
    voices: {
      soprano: { pitches: ["F4", "E4", "D4"], depths: [2, 1, 2] },
      alto: { pitches: ["A3", "R", "R"], depths: [0, null, null] },
      bass: { pitches: ["F2", "G2", "D3"], depths: [2, 0, 2] },
    },
  };
}
