// Generated by scripts/gen-constants.py from the Python render module.
// Do not edit by hand; rerun the script after changing the geometry.

export const SLOT_WIDTH = 40;
export const STEM_BASE = 14;
export const STEM_UNIT = 6;
export const LEFT_MARGIN = 60;
export const RIGHT_MARGIN = 20;
export const STAFF_SPACE = 8;
export const TREBLE_TOP = 60;
export const BASS_TOP = 160;
export const CARET_ROW_Y = 36;
export const HARMONY_ROW_Y = 232;
export const NOTEHEAD_RX = 6;
export const NOTEHEAD_RY = 4;

// Diatonic positions (letter step + 7 * octave) of the bottom staff lines.
export const TREBLE_BOTTOM_LINE = 30;
export const BASS_BOTTOM_LINE = 18;
