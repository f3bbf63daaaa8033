"""Reading and writing the ``.scha.json`` analysis file format.

The on-disk document is plain JSON; FORMAT.md in the repository root documents
the schema and the bit-exact canonical form produced by :func:`serialize_analysis`.
Index-set encodings in the file (ursatz, flags, parens, accidentals as lists of
slot indices) become per-slot booleans in memory; unknown top-level keys are
preserved verbatim so that editing tools can round-trip files they do not fully
understand.
"""

from __future__ import annotations

import json
import re
from typing import Any

from .model import (
    PARTS,
    Analysis,
    CrossVoiceSymbol,
    Key,
    Meta,
    Meter,
    NoteEvent,
    ParseError,
    Part,
    PitchSpec,
    SchaError,
    SlotKind,
    Voice,
    part_from_name,
)

REST_TOKEN = "R"
HOLD_TOKEN = "_"

_PITCH_RE = re.compile(r"^([A-G])(bb|b|##|#)?(-?\d+)$")
_ACCIDENTALS = {None: 0, "bb": -2, "b": -1, "#": 1, "##": 2}
_TONIC_RE = re.compile(r"^[A-G](bb|b|##|#)?$")

_KNOWN_TOP_KEYS = frozenset(
    {"meta", "key", "voices", "crossVoice", "meter", "customProlongations"}
)
_INDEX_SET_KEYS = ("ursatz", "flags", "parens", "accidentals")
_META_FIELDS = ("analyst", "composer", "title", "subtitle", "description")


def parse_pitch(token: str) -> PitchSpec:
    """Parses a ``C4`` / ``Bb3`` / ``F##2`` style token; E_PITCH on failure."""
    m = _PITCH_RE.match(token)
    if m is None:
        raise ParseError("E_PITCH", f"unparseable pitch token {token!r}")
    p = PitchSpec(m.group(1), _ACCIDENTALS[m.group(2)], int(m.group(3)))
    try:
        p.midi
    except SchaError as exc:
        raise ParseError("E_PITCH", f"pitch {token!r}: {exc.message}") from None
    return p


def parse_analysis(text: str | bytes) -> Analysis:
    """Parses a UTF-8 JSON document into an :class:`Analysis`.

    Raises :class:`ParseError` with code E_SYNTAX (malformed JSON), E_SCHEMA
    (wrong document shape), E_LENGTH (voice arrays of unequal length), E_PITCH
    (bad pitch token), E_DEPTH (depth/slot mismatch), E_INDEX (index-set entry
    out of range), or E_HOLD (hold in first slot or after a rest).
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("E_SYNTAX", f"malformed JSON: {exc}") from exc
    return analysis_from_obj(doc)


def analysis_from_obj(doc: Any) -> Analysis:
    """Builds an Analysis from an already-decoded JSON object."""
    if not isinstance(doc, dict):
        raise ParseError("E_SCHEMA", "top-level value must be a JSON object")
    if "voices" not in doc:
        raise ParseError("E_SCHEMA", "missing required key 'voices'")
    if "key" not in doc:
        raise ParseError("E_SCHEMA", "missing required key 'key'")

    voices_obj = doc["voices"]
    if not isinstance(voices_obj, dict):
        raise ParseError("E_SCHEMA", "'voices' must be an object")
    for name in voices_obj:
        part_from_name(name)

    n_v = _common_length(voices_obj)
    voices = tuple(_parse_voice(part, _voice_obj(voices_obj, part), n_v) for part in PARTS)

    meta = _parse_meta(doc.get("meta", {}))
    key = _parse_key(doc["key"])
    meter = _parse_meter(doc.get("meter"))
    cross = _parse_cross_voice(doc.get("crossVoice", []), voices, n_v)
    custom = _parse_custom_prolongations(doc.get("customProlongations", []))
    extra = {k: v for k, v in doc.items() if k not in _KNOWN_TOP_KEYS}

    return Analysis(
        meta=meta,
        key=key,
        voices=voices,  # type: ignore[arg-type]
        cross_voice=cross,
        meter=meter,
        custom_prolongations=custom,
        extra=extra,
    )


def _voice_obj(voices_obj: dict, part: Part) -> dict:
    for name in (part.long_name, part.value):
        if name in voices_obj:
            obj = voices_obj[name]
            if not isinstance(obj, dict):
                raise ParseError("E_SCHEMA", f"voice {name!r} must be an object")
            return obj
    return {}  # omitted voice: all rests


def _common_length(voices_obj: dict) -> int:
    lengths: dict[str, int] = {}
    for name, obj in voices_obj.items():
        if not isinstance(obj, dict):
            raise ParseError("E_SCHEMA", f"voice {name!r} must be an object")
        pitches = obj.get("pitches", [])
        if not isinstance(pitches, list):
            raise ParseError("E_SCHEMA", f"voice {name!r}: 'pitches' must be an array")
        lengths[name] = len(pitches)
        depths = obj.get("depths")
        if depths is not None:
            if not isinstance(depths, list):
                raise ParseError("E_SCHEMA", f"voice {name!r}: 'depths' must be an array")
            if len(depths) != len(pitches):
                raise ParseError(
                    "E_LENGTH",
                    f"voice {name!r}: {len(pitches)} pitches but {len(depths)} depths",
                )
    if not lengths:
        return 0
    distinct = set(lengths.values())
    if len(distinct) > 1:
        detail = ", ".join(f"{k}={v}" for k, v in sorted(lengths.items()))
        raise ParseError("E_LENGTH", f"voice arrays of unequal length ({detail})")
    return distinct.pop()


def _parse_voice(part: Part, obj: dict, n_v: int) -> Voice:
    name = part.long_name
    pitches = obj.get("pitches", [REST_TOKEN] * n_v)
    if len(pitches) != n_v:
        raise ParseError("E_LENGTH", f"voice {name!r} has {len(pitches)} slots, expected {n_v}")
    depths = obj.get("depths")
    if depths is None:
        if any(tok not in (REST_TOKEN, HOLD_TOKEN) for tok in pitches):
            raise ParseError("E_DEPTH", f"voice {name!r} has pitches but no 'depths' array")
        depths = [None] * n_v

    flag_sets = {k: _parse_index_set(obj.get(k, []), n_v, f"{name}.{k}") for k in _INDEX_SET_KEYS}
    harmony = _parse_harmony(obj.get("harmony", {}), n_v, name)

    slots = []
    for i, tok in enumerate(pitches):
        if not isinstance(tok, str):
            raise ParseError("E_PITCH", f"voice {name!r} slot {i}: pitch token must be a string")
        depth = depths[i]
        if tok == REST_TOKEN:
            if depth is not None:
                raise ParseError("E_DEPTH", f"voice {name!r} slot {i}: rest slot carries a depth")
            slots.append(NoteEvent.rest(harmony=harmony.get(i)))
        elif tok == HOLD_TOKEN:
            if depth is not None:
                raise ParseError("E_DEPTH", f"voice {name!r} slot {i}: hold slot carries a depth")
            if i == 0 or slots[i - 1].is_rest:
                raise ParseError(
                    "E_HOLD",
                    f"voice {name!r} slot {i}: hold must follow a pitch or hold slot",
                )
            slots.append(NoteEvent.hold(harmony=harmony.get(i)))
        else:
            pitch = parse_pitch(tok)
            if not isinstance(depth, int) or isinstance(depth, bool) or depth < 0:
                raise ParseError(
                    "E_DEPTH",
                    f"voice {name!r} slot {i}: pitch slot needs a non-negative integer depth",
                )
            slots.append(
                NoteEvent.note(
                    pitch,
                    depth,
                    ursatz=i in flag_sets["ursatz"],
                    flagged=i in flag_sets["flags"],
                    parenthesized=i in flag_sets["parens"],
                    accidental_displayed=i in flag_sets["accidentals"],
                    harmony=harmony.get(i),
                )
            )
    return Voice(part, tuple(slots))


def _parse_index_set(value: Any, n_v: int, where: str) -> set[int]:
    if not isinstance(value, list):
        raise ParseError("E_SCHEMA", f"{where} must be an array of slot indices")
    out: set[int] = set()
    for entry in value:
        if not isinstance(entry, int) or isinstance(entry, bool) or not 0 <= entry < n_v:
            raise ParseError("E_INDEX", f"{where}: index {entry!r} outside [0, {n_v})")
        out.add(entry)
    return out


def _parse_harmony(value: Any, n_v: int, name: str) -> dict[int, str]:
    if not isinstance(value, dict):
        raise ParseError("E_SCHEMA", f"voice {name!r}: 'harmony' must be an object")
    out: dict[int, str] = {}
    for k, label in value.items():
        try:
            idx = int(k)
        except ValueError:
            raise ParseError("E_INDEX", f"voice {name!r}: harmony key {k!r} is not an index") from None
        if not 0 <= idx < n_v:
            raise ParseError("E_INDEX", f"voice {name!r}: harmony index {idx} outside [0, {n_v})")
        if not isinstance(label, str):
            raise ParseError("E_SCHEMA", f"voice {name!r}: harmony label at {idx} must be a string")
        out[idx] = label
    return out


def _parse_meta(obj: Any) -> Meta:
    if not isinstance(obj, dict):
        raise ParseError("E_SCHEMA", "'meta' must be an object")
    fields = {}
    for f in _META_FIELDS:
        v = obj.get(f)
        if v is not None and not isinstance(v, str):
            raise ParseError("E_SCHEMA", f"meta.{f} must be a string")
        fields[f] = v
    return Meta(**fields)


def _parse_key(obj: Any) -> Key:
    if not isinstance(obj, dict) or "tonic" not in obj or "mode" not in obj:
        raise ParseError("E_SCHEMA", "'key' must be an object with 'tonic' and 'mode'")
    tonic, mode = obj["tonic"], obj["mode"]
    if not isinstance(tonic, str) or _TONIC_RE.match(tonic) is None:
        raise ParseError("E_SCHEMA", f"key tonic {tonic!r} is not a pitch class")
    if mode not in ("major", "minor"):
        raise ParseError("E_SCHEMA", f"key mode must be 'major' or 'minor', got {mode!r}")
    return Key(tonic, mode)


def _parse_meter(obj: Any) -> Meter | None:
    if obj is None:
        return None
    if not isinstance(obj, dict) or "beatsPerBar" not in obj:
        raise ParseError("E_SCHEMA", "'meter' must be an object with 'beatsPerBar'")
    try:
        meter = Meter(
            beats_per_bar=int(obj["beatsPerBar"]),
            beat_unit=int(obj.get("beatUnit", 1)),
            offset=int(obj.get("offset", 0)),
        )
    except (TypeError, ValueError):
        raise ParseError("E_SCHEMA", "meter fields must be integers") from None
    if meter.beats_per_bar < 1 or meter.beat_unit < 1:
        raise ParseError("E_SCHEMA", "meter beatsPerBar and beatUnit must be positive")
    return meter


def _parse_cross_voice(value: Any, voices: tuple[Voice, ...], n_v: int) -> tuple[CrossVoiceSymbol, ...]:
    if not isinstance(value, list):
        raise ParseError("E_SCHEMA", "'crossVoice' must be an array")
    out = []
    for entry in value:
        if not isinstance(entry, dict) or "kind" not in entry or "endpoints" not in entry:
            raise ParseError("E_SCHEMA", "crossVoice entry needs 'kind' and 'endpoints'")
        kind = entry["kind"]
        if kind not in ("voice-exchange", "relation-line"):
            raise ParseError("E_SCHEMA", f"unknown crossVoice kind {kind!r}")
        eps = entry["endpoints"]
        if not isinstance(eps, list) or len(eps) != 2:
            raise ParseError("E_SCHEMA", "crossVoice endpoints must be a pair")
        parsed = []
        for ep in eps:
            if not isinstance(ep, list) or len(ep) != 2 or not isinstance(ep[1], int):
                raise ParseError("E_SCHEMA", f"crossVoice endpoint {ep!r} must be [part, index]")
            part = part_from_name(ep[0])
            idx = ep[1]
            if not 0 <= idx < n_v:
                raise ParseError("E_INDEX", f"crossVoice endpoint index {idx} outside [0, {n_v})")
            if not voices[part.order].slots[idx].is_pitch:
                raise ParseError("E_INDEX", f"crossVoice endpoint ({part.value}, {idx}) is not a pitched slot")
            parsed.append((part, idx))
        out.append(CrossVoiceSymbol(kind, (parsed[0], parsed[1])))
    return tuple(out)


def _parse_custom_prolongations(value: Any) -> tuple[dict, ...]:
    if not isinstance(value, list):
        raise ParseError("E_SCHEMA", "'customProlongations' must be an array")
    for entry in value:
        if not isinstance(entry, dict) or "start" not in entry or "end" not in entry:
            raise ParseError("E_SCHEMA", "customProlongations entry needs 'start' and 'end'")
    return tuple(value)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def analysis_to_obj(a: Analysis) -> dict:
    """The canonical JSON object for an analysis (see FORMAT.md)."""
    doc: dict[str, Any] = {}

    meta = {f: getattr(a.meta, f) for f in _META_FIELDS if getattr(a.meta, f) is not None}
    if meta:
        doc["meta"] = meta
    doc["key"] = {"tonic": a.key.tonic, "mode": a.key.mode}

    voices: dict[str, Any] = {}
    for voice in a.voices:
        vobj: dict[str, Any] = {
            "pitches": [_slot_token(ev) for ev in voice.slots],
            "depths": [ev.depth for ev in voice.slots],
        }
        sets = {
            "ursatz": [i for i, ev in enumerate(voice.slots) if ev.ursatz],
            "flags": [i for i, ev in enumerate(voice.slots) if ev.flagged],
            "parens": [i for i, ev in enumerate(voice.slots) if ev.parenthesized],
            "accidentals": [i for i, ev in enumerate(voice.slots) if ev.accidental_displayed],
        }
        for k, indices in sets.items():
            if indices:
                vobj[k] = indices
        harmony = {str(i): ev.harmony for i, ev in enumerate(voice.slots) if ev.harmony is not None}
        if harmony:
            vobj["harmony"] = harmony
        voices[voice.part.long_name] = vobj
    doc["voices"] = voices

    if a.cross_voice:
        doc["crossVoice"] = [
            {
                "kind": s.kind,
                "endpoints": [[p.long_name, i] for p, i in s.endpoints],
            }
            for s in a.cross_voice
        ]
    if a.meter is not None:
        doc["meter"] = {
            "beatsPerBar": a.meter.beats_per_bar,
            "beatUnit": a.meter.beat_unit,
            "offset": a.meter.offset,
        }
    if a.custom_prolongations:
        doc["customProlongations"] = list(a.custom_prolongations)
    for k in sorted(a.extra):
        doc[k] = a.extra[k]
    return doc


def serialize_analysis(a: Analysis) -> str:
    """Canonical UTF-8 JSON text: sorted keys, 2-space indent, trailing newline.

    ``parse_analysis(serialize_analysis(a))`` is structurally equal to ``a``,
    and serialization is byte-idempotent.
    """
    return json.dumps(analysis_to_obj(a), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _slot_token(ev: NoteEvent) -> str:
    if ev.kind is SlotKind.REST:
        return REST_TOKEN
    if ev.kind is SlotKind.HOLD:
        return HOLD_TOKEN
    assert ev.pitch is not None
    return ev.pitch.token()
