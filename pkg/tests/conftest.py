"""Shared fixtures and seeded generators.

`random_valid_analysis` produces documents that pass strict validation, which
requires care around depth feasibility: with M the global max depth, an outer
voice can never use the 50/50 split, so every non-empty outer voice must reach
M; inner voices may use any depths when both outer voices are present (the
split always has targets), otherwise they must reach M themselves.
"""

from __future__ import annotations

import json
import random

import pytest

from schakit import Analysis, parse_analysis

FIXTURE_A = {
    "key": {"tonic": "C", "mode": "major"},
    "voices": {
        "soprano": {"pitches": ["C5", "D5", "E5", "D5", "C5"], "depths": [3, 1, 0, 2, 3]},
    },
}

FIXTURE_B = {
    "key": {"tonic": "C", "mode": "major"},
    "voices": {
        "soprano": {"pitches": ["F4", "E4", "D4"], "depths": [2, 1, 2]},
        "alto": {"pitches": ["A3", "R", "R"], "depths": [0, None, None]},
        "bass": {"pitches": ["F2", "G2", "D3"], "depths": [2, 0, 2]},
    },
}


@pytest.fixture
def fixture_a() -> Analysis:
    return parse_analysis(json.dumps(FIXTURE_A))


@pytest.fixture
def fixture_b() -> Analysis:
    return parse_analysis(json.dumps(FIXTURE_B))


_RANGES = {"sop": (4, 5), "alto": (3, 4), "ten": (2, 3), "bass": (1, 3)}
_LETTERS = "CDEFGAB"


def _random_pitch(rng: random.Random, part: str) -> str:
    lo, hi = _RANGES[part]
    letter = rng.choice(_LETTERS)
    acc = rng.choice(["", "", "", "", "#", "b", "##", "bb"])
    return f"{letter}{acc}{rng.randint(lo, hi)}"


def _random_slots(rng: random.Random, part: str, n_v: int) -> list[str]:
    """Pitch/Rest/Hold tokens with at least one pitch and legal hold placement."""
    tokens = []
    prev_sounding = False
    for _ in range(n_v):
        roll = rng.random()
        if prev_sounding and roll < 0.15:
            tokens.append("_")
        elif roll < 0.35:
            tokens.append("R")
            prev_sounding = False
        else:
            tokens.append(_random_pitch(rng, part))
            prev_sounding = True
    if not any(t not in ("R", "_") for t in tokens):
        tokens[rng.randrange(n_v)] = _random_pitch(rng, part)
    # a hold straight after a rest is illegal; demote such holds to rests
    for i, t in enumerate(tokens):
        if t == "_" and (i == 0 or tokens[i - 1] == "R"):
            tokens[i] = "R"
    return tokens


def random_valid_document(
    rng: random.Random,
    *,
    max_nv: int = 20,
    max_depth: int = 4,
    decorate: bool = False,
) -> dict:
    """A document that passes strict validation."""
    n_v = rng.randint(1, max_nv)
    m = rng.randint(1, max_depth)
    voices: dict[str, dict] = {}
    present = [p for p in ("sop", "alto", "ten", "bass") if rng.random() < 0.7]
    if not present:
        present = [rng.choice(["sop", "bass"])]
    both_outers = "sop" in present and "bass" in present

    for part in present:
        tokens = _random_slots(rng, part, n_v)
        note_pos = [i for i, t in enumerate(tokens) if t not in ("R", "_")]
        depths: list[int | None] = [None] * n_v
        for i in note_pos:
            depths[i] = rng.randint(0, m)
        pinned = part in ("sop", "bass") or not both_outers
        if pinned and not any(depths[i] == m for i in note_pos):
            depths[rng.choice(note_pos)] = m
        voices[part] = {"pitches": tokens, "depths": depths}

    doc: dict = {"key": {"tonic": rng.choice(["C", "G", "D", "F", "Bb", "A"]), "mode": rng.choice(["major", "minor"])}, "voices": voices}

    if decorate:
        for part, v in voices.items():
            note_pos = [i for i, t in enumerate(v["pitches"]) if t not in ("R", "_")]
            if note_pos and rng.random() < 0.4:
                v["ursatz"] = sorted(rng.sample(note_pos, rng.randint(1, len(note_pos))))
            if note_pos and rng.random() < 0.3:
                v["parens"] = sorted(rng.sample(note_pos, rng.randint(1, len(note_pos))))
            if note_pos and rng.random() < 0.3:
                v["harmony"] = {str(rng.choice(note_pos)): rng.choice(["I", "V", "IV", "ii6", "V7"])}
        if rng.random() < 0.3:
            doc["meter"] = {
                "beatsPerBar": rng.randint(2, 4),
                "beatUnit": rng.randint(1, 2),
                "offset": rng.randint(0, 2),
            }
        pitched_refs = [
            (part, i)
            for part, v in voices.items()
            for i, t in enumerate(v["pitches"])
            if t not in ("R", "_")
        ]
        if len(pitched_refs) >= 2 and rng.random() < 0.25:
            a_ref, b_ref = rng.sample(pitched_refs, 2)
            doc["crossVoice"] = [
                {
                    "kind": rng.choice(["voice-exchange", "relation-line"]),
                    "endpoints": [[a_ref[0], a_ref[1]], [b_ref[0], b_ref[1]]],
                }
            ]
    return doc


def random_valid_analysis(
    rng: random.Random,
    *,
    max_nv: int = 20,
    max_depth: int = 4,
    decorate: bool = False,
) -> Analysis:
    return parse_analysis(json.dumps(random_valid_document(rng, max_nv=max_nv, max_depth=max_depth, decorate=decorate)))


def random_document(rng: random.Random, *, max_nv: int = 12) -> dict:
    """Any parseable document (validity not required) for round-trip tests."""
    doc = random_valid_document(rng, max_nv=max_nv, decorate=True)
    # scramble depths freely; round-tripping does not need feasibility
    for v in doc["voices"].values():
        if rng.random() < 0.1:
            v["pitches"] = ["R"] * len(v["pitches"])
            del v["depths"]
            for key in ("ursatz", "parens", "harmony"):
                v.pop(key, None)
            doc.pop("crossVoice", None)
        else:
            v["depths"] = [None if t in ("R", "_") else rng.randint(0, 4) for t in v["pitches"]]
    if rng.random() < 0.3:
        doc["meta"] = {"title": f"excerpt {rng.randint(1, 99)}", "composer": rng.choice(["Bach", "Handel", "Corelli"])}
    if rng.random() < 0.2:
        doc["customProlongations"] = [
            {"start": ["sop", 0], "end": ["sop", 1], "label": "custom"}
        ]
    if rng.random() < 0.2:
        doc["x-annotations"] = {"reviewed": bool(rng.getrandbits(1)), "pass": rng.randint(0, 3)}
    return doc
