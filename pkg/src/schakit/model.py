"""Core in-memory model of a Schenkerian analysis.

An analysis is four aligned theoretical voices (soprano, alto, tenor, bass),
each a sequence of slots. A slot holds either a pitched note with a structural
depth, a rest, or a hold that extends the previous note. Cross-voice symbols
(voice exchanges, relation lines) connect slots across voices. All types are
immutable values; every operation in this package is a pure function over them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator


class SchaError(Exception):
    """Toolkit error with a stable machine-readable code (e.g. ``E_PITCH``)."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class ParseError(SchaError):
    """Raised by the file-format parser; code is one of the E_* parse codes."""


class Part(str, Enum):
    """The four theoretical voices, in conventional top-down order."""

    SOP = "sop"
    ALTO = "alto"
    TEN = "ten"
    BASS = "bass"

    @property
    def long_name(self) -> str:
        return _PART_LONG[self]

    @property
    def is_outer(self) -> bool:
        return self in (Part.SOP, Part.BASS)

    @property
    def order(self) -> int:
        return _PART_ORDER[self]


_PART_LONG = {
    Part.SOP: "soprano",
    Part.ALTO: "alto",
    Part.TEN: "tenor",
    Part.BASS: "bass",
}
_PART_ORDER = {Part.SOP: 0, Part.ALTO: 1, Part.TEN: 2, Part.BASS: 3}

PARTS = (Part.SOP, Part.ALTO, Part.TEN, Part.BASS)
OUTER_PARTS = (Part.SOP, Part.BASS)
INNER_PARTS = (Part.ALTO, Part.TEN)


def part_from_name(name: str) -> Part:
    """Accepts either short ("sop") or long ("soprano") part names."""
    for p in PARTS:
        if name == p.value or name == p.long_name:
            return p
    raise SchaError("E_SCHEMA", f"unknown part name {name!r}")


_LETTER_SEMITONE = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
_LETTER_DIATONIC = {"C": 0, "D": 1, "E": 2, "F": 3, "G": 4, "A": 5, "B": 6}
_ACCIDENTAL_SUFFIX = {-2: "bb", -1: "b", 0: "", 1: "#", 2: "##"}


@dataclass(frozen=True)
class PitchSpec:
    """A spelled pitch: letter A-G, accidental -2..+2, octave in scientific
    pitch notation (C4 is middle C)."""

    letter: str
    accidental: int
    octave: int

    def __post_init__(self) -> None:
        if self.letter not in _LETTER_SEMITONE:
            raise ValueError(f"pitch letter must be A-G, got {self.letter!r}")
        if not -2 <= self.accidental <= 2:
            raise ValueError(f"accidental must be in [-2, 2], got {self.accidental}")

    @property
    def midi(self) -> int:
        """MIDI note number; raises E_RANGE outside [0, 127]."""
        return midi_number(self)

    @property
    def diatonic(self) -> int:
        """Diatonic step index (octave * 7 + letter step), used for staff layout."""
        return self.octave * 7 + _LETTER_DIATONIC[self.letter]

    def token(self) -> str:
        """The file token, e.g. ``C4``, ``Bb3``, ``F##2``."""
        return f"{self.letter}{_ACCIDENTAL_SUFFIX[self.accidental]}{self.octave}"

    def __str__(self) -> str:
        return self.token()


def midi_number(p: PitchSpec) -> int:
    """12 * (octave + 1) + letter semitone + accidental; E_RANGE outside [0, 127]."""
    n = 12 * (p.octave + 1) + _LETTER_SEMITONE[p.letter] + p.accidental
    if not 0 <= n <= 127:
        raise SchaError("E_RANGE", f"MIDI number {n} for {p.token()} outside [0, 127]")
    return n


class SlotKind(str, Enum):
    PITCH = "pitch"
    REST = "rest"
    HOLD = "hold"


@dataclass(frozen=True)
class NoteEvent:
    """One slot of one voice.

    ``depth`` is present exactly for pitched slots: 0 is the musical surface,
    larger values are deeper structural levels. The boolean markers mirror the
    file's index sets (Ursatz membership, flags, parentheses, displayed
    accidentals); ``harmony`` is a free-text Roman numeral / scale degree label.
    """

    kind: SlotKind
    pitch: PitchSpec | None = None
    depth: int | None = None
    ursatz: bool = False
    flagged: bool = False
    parenthesized: bool = False
    accidental_displayed: bool = False
    harmony: str | None = None

    def __post_init__(self) -> None:
        if self.kind is SlotKind.PITCH:
            if self.pitch is None:
                raise ValueError("pitch slot requires a PitchSpec")
            if self.depth is None or self.depth < 0:
                raise ValueError("pitch slot requires a non-negative depth")
        else:
            if self.pitch is not None or self.depth is not None:
                raise ValueError(f"{self.kind.value} slot carries no pitch or depth")

    @classmethod
    def note(cls, pitch: PitchSpec, depth: int, **flags: Any) -> NoteEvent:
        return cls(SlotKind.PITCH, pitch=pitch, depth=depth, **flags)

    @classmethod
    def rest(cls, harmony: str | None = None) -> NoteEvent:
        return cls(SlotKind.REST, harmony=harmony)

    @classmethod
    def hold(cls, harmony: str | None = None) -> NoteEvent:
        return cls(SlotKind.HOLD, harmony=harmony)

    @property
    def is_pitch(self) -> bool:
        return self.kind is SlotKind.PITCH

    @property
    def is_rest(self) -> bool:
        return self.kind is SlotKind.REST

    @property
    def is_hold(self) -> bool:
        return self.kind is SlotKind.HOLD


@dataclass(frozen=True)
class Voice:
    """An ordered sequence of slots for one part."""

    part: Part
    slots: tuple[NoteEvent, ...]

    def __len__(self) -> int:
        return len(self.slots)

    def pitched(self) -> Iterator[tuple[int, NoteEvent]]:
        """Yields (slot index, event) for pitched slots, in order."""
        for i, ev in enumerate(self.slots):
            if ev.is_pitch:
                yield i, ev

    @property
    def is_empty(self) -> bool:
        """True when the voice has no pitched slot."""
        return not any(ev.is_pitch for ev in self.slots)

    @property
    def max_depth(self) -> int:
        """Largest depth among pitched slots; 0 for an empty voice."""
        return max((ev.depth for _, ev in self.pitched()), default=0)


@dataclass(frozen=True)
class CrossVoiceSymbol:
    """A symbol connecting two slots across voices.

    ``kind`` is "voice-exchange" or "relation-line"; endpoints are
    (part, slot index) pairs that must reference pitched slots.
    """

    kind: str
    endpoints: tuple[tuple[Part, int], tuple[Part, int]]


@dataclass(frozen=True)
class Meta:
    analyst: str | None = None
    composer: str | None = None
    title: str | None = None
    subtitle: str | None = None
    description: str | None = None


@dataclass(frozen=True)
class Key:
    tonic: str
    mode: str  # "major" | "minor"


@dataclass(frozen=True)
class Meter:
    """Metric grid over verticality slots: ``beat_unit`` slots per beat,
    ``beats_per_bar`` beats per bar, first downbeat at slot ``offset``."""

    beats_per_bar: int
    beat_unit: int = 1
    offset: int = 0


@dataclass(frozen=True)
class Analysis:
    """One excerpt's full annotation: metadata, key, the four voices, and
    cross-voice symbols. All four voices share the same slot count n_v."""

    meta: Meta
    key: Key
    voices: tuple[Voice, Voice, Voice, Voice]
    cross_voice: tuple[CrossVoiceSymbol, ...] = ()
    meter: Meter | None = None
    custom_prolongations: tuple[dict, ...] = ()
    extra: dict = field(default_factory=dict)

    def voice(self, part: Part) -> Voice:
        return self.voices[part.order]

    @property
    def soprano(self) -> Voice:
        return self.voices[0]

    @property
    def alto(self) -> Voice:
        return self.voices[1]

    @property
    def tenor(self) -> Voice:
        return self.voices[2]

    @property
    def bass(self) -> Voice:
        return self.voices[3]

    @property
    def n_v(self) -> int:
        return len(self.voices[0])

    @property
    def max_depth(self) -> int:
        return max(v.max_depth for v in self.voices)

    @property
    def note_count(self) -> int:
        """Total number of pitched slots across all voices."""
        return sum(1 for v in self.voices for _ in v.pitched())

    def notes(self) -> Iterator[tuple[Part, int, NoteEvent]]:
        """All pitched slots in (verticality index, part order) order."""
        for i in range(self.n_v):
            for v in self.voices:
                ev = v.slots[i]
                if ev.is_pitch:
                    yield v.part, i, ev
