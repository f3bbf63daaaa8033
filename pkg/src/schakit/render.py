"""Notation geometry derived from depths, and its static SVG export.

Beams at level d cover the maximal runs (two or more consecutive notes of the
voice's onset sequence) whose depths are all >= d; slurs are exactly the
non-empty-middle prolongations; stems grow with depth. Only the outer voices
carry stems, beams, slurs, and depth labels. Inner-voice noteheads are drawn
plain so cross-voice lines have visible anchors.

All geometry uses integer coordinates so the SVG text is byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Analysis, Key, NoteEvent, Part, PitchSpec
from .reduction import all_prolongations

SLOT_WIDTH = 40
STEM_BASE = 14
STEM_UNIT = 6

LEFT_MARGIN = 60
RIGHT_MARGIN = 20
STAFF_SPACE = 8  # distance between adjacent staff lines
TREBLE_TOP = 60  # y of the treble staff's top line
BASS_TOP = 160
CARET_ROW_Y = 36
HARMONY_ROW_Y = 232
NOTEHEAD_RX = 6
NOTEHEAD_RY = 4

# Diatonic positions of the bottom staff lines (letter step + 7 * octave).
_TREBLE_BOTTOM_LINE = 4 * 7 + 2  # E4
_BASS_BOTTOM_LINE = 2 * 7 + 4  # G2

_ACCIDENTAL_GLYPHS = {-2: "♭♭", -1: "♭", 1: "♯", 2: "♯♯"}


@dataclass(frozen=True)
class NoteGlyph:
    part: Part
    index: int  # slot index
    x: int  # notehead center
    y: int  # notehead center
    depth: int | None
    accidental: str | None
    parenthesized: bool
    flagged: bool
    ursatz: bool


@dataclass(frozen=True)
class Stem:
    part: Part
    index: int
    length: int  # STEM_BASE + depth * STEM_UNIT
    up: bool


@dataclass(frozen=True)
class Beam:
    part: Part
    level: int
    start: int  # slot index of the first note in the run
    end: int


@dataclass(frozen=True)
class Slur:
    part: Part
    start: int
    end: int
    level: int


@dataclass(frozen=True)
class TextItem:
    part: Part
    index: int
    text: str


@dataclass(frozen=True)
class CrossVoiceLine:
    kind: str
    src: tuple[Part, int]
    dst: tuple[Part, int]


@dataclass(frozen=True)
class RenderModel:
    n_v: int
    glyphs: tuple[NoteGlyph, ...]  # outer voices
    inner_glyphs: tuple[NoteGlyph, ...]
    stems: tuple[Stem, ...]
    beams: tuple[Beam, ...]
    slurs: tuple[Slur, ...]
    harmony: tuple[TextItem, ...]
    carets: tuple[TextItem, ...]
    cross_voice: tuple[CrossVoiceLine, ...]

    @property
    def width(self) -> int:
        return LEFT_MARGIN + max(self.n_v, 1) * SLOT_WIDTH + RIGHT_MARGIN

    @property
    def height(self) -> int:
        return HARMONY_ROW_Y + 28


def slot_x(index: int) -> int:
    return LEFT_MARGIN + index * SLOT_WIDTH + SLOT_WIDTH // 2


def note_y(part: Part, pitch: PitchSpec) -> int:
    """Vertical center from the diatonic position; one staff step is half a
    line gap. Outer voices sit on their own staff, inner voices on the nearer
    one (alto treble, tenor bass)."""
    if part in (Part.SOP, Part.ALTO):
        bottom = TREBLE_TOP + 4 * STAFF_SPACE
        return bottom - (pitch.diatonic - _TREBLE_BOTTOM_LINE) * (STAFF_SPACE // 2)
    bottom = BASS_TOP + 4 * STAFF_SPACE
    return bottom - (pitch.diatonic - _BASS_BOTTOM_LINE) * (STAFF_SPACE // 2)


def beam_runs(depths: list[int | None], indices: list[int]) -> list[tuple[int, int, int]]:
    """(level, startIndex, endIndex) for maximal runs of length >= 2 with
    depth >= level, per level 1..max. `indices` maps sequence position to
    slot index."""
    present = [d for d in depths if d is not None]
    if not present:
        return []
    runs = []
    for level in range(1, max(present) + 1):
        start: int | None = None
        for pos, d in enumerate(depths + [None]):
            ok = d is not None and d >= level
            if ok and start is None:
                start = pos
            elif not ok and start is not None:
                if pos - start >= 2:
                    runs.append((level, indices[start], indices[pos - 1]))
                start = None
    return runs


def _glyph(part: Part, i: int, ev: NoteEvent) -> NoteGlyph:
    pitch = ev.pitch
    assert pitch is not None
    acc = None
    if pitch.accidental != 0:
        acc = _ACCIDENTAL_GLYPHS[pitch.accidental]
    elif ev.accidental_displayed:
        acc = "♮"
    return NoteGlyph(
        part,
        i,
        slot_x(i),
        note_y(part, pitch),
        ev.depth,
        acc,
        ev.parenthesized,
        ev.flagged,
        ev.ursatz,
    )


def _caret_degree(pitch: PitchSpec, key: Key) -> int:
    letters = "CDEFGAB"
    return (letters.index(pitch.letter) - letters.index(key.tonic[0])) % 7 + 1


def derive_render_model(a: Analysis) -> RenderModel:
    glyphs: list[NoteGlyph] = []
    inner: list[NoteGlyph] = []
    stems: list[Stem] = []
    beams: list[Beam] = []
    harmony: list[TextItem] = []
    carets: list[TextItem] = []

    for voice in a.voices:
        outer = voice.part.is_outer
        for i, ev in enumerate(voice.slots):
            if ev.harmony:
                harmony.append(TextItem(voice.part, i, ev.harmony))
        for i, ev in voice.pitched():
            g = _glyph(voice.part, i, ev)
            if outer:
                glyphs.append(g)
                depth = ev.depth or 0
                stems.append(Stem(voice.part, i, STEM_BASE + depth * STEM_UNIT, up=voice.part is Part.SOP))
                if ev.ursatz:
                    degree = _caret_degree(ev.pitch, a.key)  # type: ignore[arg-type]
                    carets.append(TextItem(voice.part, i, f"^{degree}"))
            else:
                inner.append(g)
        if outer:
            seq = list(voice.pitched())
            depths = [ev.depth for _, ev in seq]
            indices = [i for i, _ in seq]
            for level, s, e in beam_runs(depths, indices):
                beams.append(Beam(voice.part, level, s, e))

    slurs = [
        Slur(p.voice, p.start[1], p.end[1], p.level)
        for p in all_prolongations(a).non_trivial()
        if p.voice.is_outer
    ]

    cross = [CrossVoiceLine(c.kind, c.endpoints[0], c.endpoints[1]) for c in a.cross_voice]

    return RenderModel(
        a.n_v,
        tuple(glyphs),
        tuple(inner),
        tuple(stems),
        tuple(beams),
        tuple(slurs),
        tuple(harmony),
        tuple(carets),
        tuple(cross),
    )


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------


def render_svg(m: RenderModel) -> str:
    w, h = m.width, m.height
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}" font-family="serif" font-size="12">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]

    for name, top in (("treble", TREBLE_TOP), ("bass", BASS_TOP)):
        for ln in range(5):
            y = top + ln * STAFF_SPACE
            out.append(
                f'<line id="staff-{name}-{ln}" x1="{LEFT_MARGIN}" y1="{y}" '
                f'x2="{w - RIGHT_MARGIN}" y2="{y}" stroke="black" stroke-width="1"/>'
            )

    stem_by_note = {(s.part, s.index): s for s in m.stems}
    glyph_y = {(g.part, g.index): g.y for g in list(m.glyphs) + list(m.inner_glyphs)}

    for s in m.stems:
        y = glyph_y[(s.part, s.index)]
        x = slot_x(s.index) + (NOTEHEAD_RX if s.up else -NOTEHEAD_RX)
        y2 = y - s.length if s.up else y + s.length
        out.append(
            f'<line id="stem-{s.part.value}-{s.index}" x1="{x}" y1="{y}" '
            f'x2="{x}" y2="{y2}" stroke="black" stroke-width="1"/>'
        )

    for b in m.beams:
        up = b.part is Part.SOP
        xs = slot_x(b.start) + (NOTEHEAD_RX if up else -NOTEHEAD_RX)
        xe = slot_x(b.end) + (NOTEHEAD_RX if up else -NOTEHEAD_RX)
        tips = []
        for g in m.glyphs:
            if g.part is b.part and b.start <= g.index <= b.end:
                s = stem_by_note[(g.part, g.index)]
                tips.append(g.y - s.length if up else g.y + s.length)
        y = (min(tips) + (b.level - 1) * 4) if up else (max(tips) - (b.level - 1) * 4)
        out.append(
            f'<rect id="beam-{b.part.value}-{b.level}-{b.start}-{b.end}" class="beam" '
            f'x="{min(xs, xe)}" y="{y - 1}" width="{abs(xe - xs)}" height="3" fill="black"/>'
        )

    for g in sorted(list(m.glyphs) + list(m.inner_glyphs), key=lambda g: (g.part.order, g.index)):
        inner = not g.part.is_outer
        fill = "none" if inner else "black"
        out.append(
            f'<ellipse id="note-{g.part.value}-{g.index}" class="notehead" '
            f'cx="{g.x}" cy="{g.y}" rx="{NOTEHEAD_RX}" ry="{NOTEHEAD_RY}" '
            f'fill="{fill}" stroke="black"/>'
        )
        if g.accidental:
            out.append(
                f'<text id="acc-{g.part.value}-{g.index}" x="{g.x - 18}" y="{g.y + 4}">'
                f"{g.accidental}</text>"
            )
        if g.depth is not None and g.part.is_outer:
            out.append(
                f'<text id="depth-{g.part.value}-{g.index}" class="depth-label" '
                f'x="{g.x - 26}" y="{g.y + 4}" font-size="10">{g.depth}</text>'
            )
        if g.parenthesized:
            out.append(
                f'<text id="paren-open-{g.part.value}-{g.index}" class="paren" '
                f'x="{g.x - 12}" y="{g.y + 4}">(</text>'
            )
            out.append(
                f'<text id="paren-close-{g.part.value}-{g.index}" class="paren" '
                f'x="{g.x + 8}" y="{g.y + 4}">)</text>'
            )

    for s in m.slurs:
        up = s.part is Part.SOP
        x1, x2 = slot_x(s.start), slot_x(s.end)
        y1 = glyph_y[(s.part, s.start)] + (-NOTEHEAD_RY - 2 if up else NOTEHEAD_RY + 2)
        y2 = glyph_y[(s.part, s.end)] + (-NOTEHEAD_RY - 2 if up else NOTEHEAD_RY + 2)
        rise = 10 + 4 * s.level
        cy = min(y1, y2) - rise if up else max(y1, y2) + rise
        out.append(
            f'<path id="slur-{s.part.value}-{s.start}-{s.end}" class="slur" '
            f'd="M {x1} {y1} Q {(x1 + x2) // 2} {cy} {x2} {y2}" '
            f'fill="none" stroke="black" stroke-width="1"/>'
        )

    for t in m.carets:
        out.append(
            f'<text id="caret-{t.part.value}-{t.index}" class="caret" '
            f'x="{slot_x(t.index) - 6}" y="{CARET_ROW_Y}">{t.text}</text>'
        )
    for t in m.harmony:
        out.append(
            f'<text id="harm-{t.part.value}-{t.index}" class="harmony" '
            f'x="{slot_x(t.index) - 6}" y="{HARMONY_ROW_Y}">{t.text}</text>'
        )

    for k, c in enumerate(m.cross_voice):
        (p1, i1), (p2, i2) = c.src, c.dst
        x1, x2 = slot_x(i1), slot_x(i2)
        y1 = glyph_y.get((p1, i1), TREBLE_TOP + 2 * STAFF_SPACE)
        y2 = glyph_y.get((p2, i2), BASS_TOP + 2 * STAFF_SPACE)
        out.append(
            f'<line id="xv-{k}" class="cross-voice {c.kind}" x1="{x1}" y1="{y1}" '
            f'x2="{x2}" y2="{y2}" stroke="black" stroke-width="1" stroke-dasharray="4 3"/>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
