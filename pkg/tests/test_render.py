import json
import random

from schakit import derive_render_model, parse_analysis, parse_pitch, render_svg
from schakit.model import Part
from schakit.reduction import all_prolongations
from schakit.render import STEM_BASE, STEM_UNIT, beam_runs, note_y, slot_x

from conftest import random_valid_analysis

KEY = {"tonic": "C", "mode": "major"}


def build(voices: dict, **extra):
    return parse_analysis(json.dumps({"key": KEY, "voices": voices, **extra}))


# ---------------------------------------------------------------------------
# Geometry primitives
# ---------------------------------------------------------------------------


def test_slot_x_is_affine():
    assert slot_x(0) == 80
    assert slot_x(1) - slot_x(0) == 40
    assert slot_x(4) == 240


def test_note_y_staff_steps():
    # E4 sits on the treble bottom line; each diatonic step is 4px
    e4 = note_y(Part.SOP, parse_pitch("E4"))
    f4 = note_y(Part.SOP, parse_pitch("F4"))
    assert e4 - f4 == 4
    assert note_y(Part.SOP, parse_pitch("E5")) == e4 - 28
    # accidentals do not move the head
    assert note_y(Part.SOP, parse_pitch("F#4")) == f4
    # alto shares the treble staff, tenor the bass staff
    assert note_y(Part.ALTO, parse_pitch("E4")) == e4
    assert note_y(Part.TEN, parse_pitch("G2")) == note_y(Part.BASS, parse_pitch("G2"))


def test_beam_runs_fixture_a_depths():
    assert beam_runs([3, 1, 0, 2, 3], [0, 1, 2, 3, 4]) == [
        (1, 0, 1),
        (1, 3, 4),
        (2, 3, 4),
    ]


def test_beam_runs_skip_rests_use_slot_indices():
    # pitched sequence occupies slots 0, 2, 3
    assert beam_runs([1, 2, 2], [0, 2, 3]) == [(1, 0, 3), (2, 2, 3)]


def test_beam_runs_singletons_and_empty():
    assert beam_runs([2, 0, 2], [0, 1, 2]) == []
    assert beam_runs([0, 0], [0, 1]) == []
    assert beam_runs([], []) == []
    assert beam_runs([None, None], [0, 1]) == []


# ---------------------------------------------------------------------------
# Model derivation
# ---------------------------------------------------------------------------


def test_fixture_a_model(fixture_a):
    m = derive_render_model(fixture_a)
    assert m.n_v == 5
    assert [g.index for g in m.glyphs] == [0, 1, 2, 3, 4]
    assert m.inner_glyphs == ()
    assert [(b.level, b.start, b.end) for b in m.beams] == [(1, 0, 1), (1, 3, 4), (2, 3, 4)]
    assert [(s.start, s.end, s.level) for s in m.slurs] == [(1, 3, 1), (0, 3, 2), (0, 4, 3)]
    assert [s.length for s in m.stems] == [
        STEM_BASE + d * STEM_UNIT for d in (3, 1, 0, 2, 3)
    ]
    assert all(s.up for s in m.stems)


def test_stem_direction_and_length_by_part():
    a = build(
        {
            "sop": {"pitches": ["C5"], "depths": [2]},
            "bass": {"pitches": ["C3"], "depths": [1]},
        }
    )
    m = derive_render_model(a)
    stems = {s.part: s for s in m.stems}
    assert stems[Part.SOP].up and not stems[Part.BASS].up
    assert stems[Part.SOP].length == 26
    assert stems[Part.BASS].length == 20


def test_all_zero_depths_no_beams_or_slurs():
    a = build({"sop": {"pitches": ["C5", "D5"], "depths": [0, 0]}})
    m = derive_render_model(a)
    assert m.beams == ()
    assert m.slurs == ()


def test_adjacent_survivors_beam_without_slur():
    a = build({"sop": {"pitches": ["C5", "D5"], "depths": [1, 1]}})
    m = derive_render_model(a)
    assert [(b.level, b.start, b.end) for b in m.beams] == [(1, 0, 1)]
    assert m.slurs == ()


def test_inner_voices_have_no_stems_beams_or_slurs():
    a = build(
        {
            "sop": {"pitches": ["C5", "D5"], "depths": [1, 1]},
            "alto": {"pitches": ["E4", "F4"], "depths": [1, 1]},
            "bass": {"pitches": ["C3", "D3"], "depths": [1, 1]},
        }
    )
    m = derive_render_model(a)
    assert {g.part for g in m.inner_glyphs} == {Part.ALTO}
    assert all(s.part is not Part.ALTO for s in m.stems)
    assert all(b.part is not Part.ALTO for b in m.beams)
    assert all(s.part is not Part.ALTO for s in m.slurs)


def test_carets_follow_key():
    a = parse_analysis(
        json.dumps(
            {
                "key": {"tonic": "G", "mode": "major"},
                "voices": {
                    "sop": {
                        "pitches": ["B4", "A4", "G4"],
                        "depths": [2, 1, 2],
                        "ursatz": [0, 1, 2],
                    }
                },
            }
        )
    )
    m = derive_render_model(a)
    assert [(t.index, t.text) for t in m.carets] == [(0, "^3"), (1, "^2"), (2, "^1")]


def test_harmony_and_cross_voice_items():
    a = build(
        {
            "sop": {"pitches": ["C5", "D5"], "depths": [1, 1]},
            "bass": {"pitches": ["C3", "G2"], "depths": [1, 1], "harmony": {"0": "I", "1": "V"}},
        },
        crossVoice=[{"kind": "voice-exchange", "endpoints": [["sop", 0], ["bass", 1]]}],
    )
    m = derive_render_model(a)
    assert [(t.part, t.index, t.text) for t in m.harmony] == [
        (Part.BASS, 0, "I"),
        (Part.BASS, 1, "V"),
    ]
    assert len(m.cross_voice) == 1
    assert m.cross_voice[0].kind == "voice-exchange"
    assert m.cross_voice[0].src == (Part.SOP, 0)
    assert m.cross_voice[0].dst == (Part.BASS, 1)


# ---------------------------------------------------------------------------
# SVG text
# ---------------------------------------------------------------------------


def test_fixture_a_svg_structure(fixture_a):
    svg = render_svg(derive_render_model(fixture_a))
    assert svg.startswith('<svg xmlns="http://www.w3.org/2000/svg" width="280" height="260"')
    assert svg.endswith("</svg>\n")
    assert svg.count('class="notehead"') == 5
    assert svg.count('class="beam"') == 3
    assert svg.count('class="slur"') == 3
    assert 'id="note-sop-3"' in svg
    assert 'id="beam-sop-1-0-1"' in svg
    assert 'id="beam-sop-2-3-4"' in svg
    assert 'id="slur-sop-0-4"' in svg
    assert 'id="depth-sop-2"' in svg
    assert svg.count("staff-treble") == 5 and svg.count("staff-bass") == 5


def test_svg_byte_determinism(fixture_a, fixture_b):
    rng = random.Random(10001)
    cases = [fixture_a, fixture_b] + [random_valid_analysis(rng, max_nv=8) for _ in range(10)]
    for a in cases:
        first = render_svg(derive_render_model(a))
        assert render_svg(derive_render_model(a)) == first
        assert "\r" not in first
        assert first == first.strip("\x00")


def test_empty_analysis_svg_has_staves_only():
    a = build({"sop": {"pitches": ["R", "R"]}})
    svg = render_svg(derive_render_model(a))
    assert svg.count("<line") == 10
    assert "notehead" not in svg
    assert "beam" not in svg


def test_parenthesized_and_accidental_glyphs():
    a = build(
        {"sop": {"pitches": ["F#4", "G4"], "depths": [0, 1], "parens": [0]}}
    )
    svg = render_svg(derive_render_model(a))
    assert 'id="paren-open-sop-0"' in svg
    assert 'id="paren-close-sop-0"' in svg
    assert 'id="acc-sop-0"' in svg and "♯" in svg
    assert 'id="paren-open-sop-1"' not in svg


def test_inner_noteheads_are_hollow():
    a = build(
        {
            "sop": {"pitches": ["C5"], "depths": [1]},
            "alto": {"pitches": ["E4"], "depths": [1]},
        }
    )
    svg = render_svg(derive_render_model(a))
    assert 'id="note-alto-0" class="notehead" cx="80"' in svg
    line = next(l for l in svg.splitlines() if 'note-alto-0' in l)
    assert 'fill="none"' in line
    line = next(l for l in svg.splitlines() if 'note-sop-0' in l)
    assert 'fill="black"' in line


def test_cross_voice_line_rendered_dashed():
    a = build(
        {
            "sop": {"pitches": ["C5", "R"], "depths": [1, None]},
            "bass": {"pitches": ["R", "C3"], "depths": [None, 1]},
        },
        crossVoice=[{"kind": "voice-exchange", "endpoints": [["sop", 0], ["bass", 1]]}],
    )
    svg = render_svg(derive_render_model(a))
    line = next(l for l in svg.splitlines() if 'id="xv-0"' in l)
    assert "stroke-dasharray" in line
    assert 'class="cross-voice voice-exchange"' in line


# ---------------------------------------------------------------------------
# Duality properties
# ---------------------------------------------------------------------------


def test_slurs_match_prolongations_on_random_analyses():
    rng = random.Random(10002)
    for _ in range(80):
        a = random_valid_analysis(rng, max_nv=10)
        m = derive_render_model(a)
        got = {(s.part, s.start, s.end, s.level) for s in m.slurs}
        want = {
            (p.voice, p.start[1], p.end[1], p.level)
            for p in all_prolongations(a).non_trivial()
            if p.voice.is_outer
        }
        assert got == want


def test_beams_match_recomputed_runs_on_random_analyses():
    rng = random.Random(10003)
    for _ in range(80):
        a = random_valid_analysis(rng, max_nv=10)
        m = derive_render_model(a)
        got = {(b.part, b.level, b.start, b.end) for b in m.beams}
        want = set()
        for part in (Part.SOP, Part.BASS):
            seq = list(a.voice(part).pitched())
            if not seq:
                continue
            top = max(ev.depth for _, ev in seq)
            for level in range(1, top + 1):
                run: list[int] = []
                for i, ev in seq + [(None, None)]:  # type: ignore[list-item]
                    if ev is not None and ev.depth >= level:
                        run.append(i)
                    else:
                        if len(run) >= 2:
                            want.add((part, level, run[0], run[-1]))
                        run = []
        assert got == want
