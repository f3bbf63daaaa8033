#!/usr/bin/env python3
"""Regenerates src/renderConstants.ts from the installed schakit package so
the browser draws with exactly the geometry the server renders with.

Run from the frontend directory:

    python3 scripts/gen-constants.py
"""

from pathlib import Path

from schakit import render

NAMES = [
    "SLOT_WIDTH",
    "STEM_BASE",
    "STEM_UNIT",
    "LEFT_MARGIN",
    "RIGHT_MARGIN",
    "STAFF_SPACE",
    "TREBLE_TOP",
    "BASS_TOP",
    "CARET_ROW_Y",
    "HARMONY_ROW_Y",
    "NOTEHEAD_RX",
    "NOTEHEAD_RY",
]

out = Path(__file__).resolve().parent.parent / "src" / "renderConstants.ts"

lines = [
    "// Generated by scripts/gen-constants.py from the Python render module.",
    "// Do not edit by hand; rerun the script after changing the geometry.",
    "",
]
for name in NAMES:
    lines.append(f"export const {name} = {getattr(render, name)};")
lines.append("")
lines.append("// Diatonic positions (letter step + 7 * octave) of the bottom staff lines.")
lines.append(f"export const TREBLE_BOTTOM_LINE = {render._TREBLE_BOTTOM_LINE};")
lines.append(f"export const BASS_BOTTOM_LINE = {render._BASS_BOTTOM_LINE};")
lines.append("")

out.write_text("\n".join(lines), encoding="utf-8")
print(f"wrote {out}")
