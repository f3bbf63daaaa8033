"""Depth-driven reduction: prolongation extraction and clustering matrices.

One clustering layer maps the currently live notes onto the subset with
positive depth: every depth-0 note is absorbed by the nearest positive-depth
note in its own voice (left first, then right), and a note whose voice has no
positive-depth note left is split 50/50 between the nearest soprano and bass
survivors on opposite sides. Surviving depths are decremented and the step
repeats; stacking the per-layer matrices and multiplying them yields the
clustering between any two layers.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .model import Analysis, Part, SchaError

NoteRef = tuple[Part, int]


@dataclass(frozen=True)
class Prolongation:
    """An X (Y) Z triple: ``middles`` elaborate the motion from start to end."""

    level: int
    voice: Part
    start: NoteRef
    middles: tuple[NoteRef, ...]
    end: NoteRef

    @property
    def triple(self) -> tuple[NoteRef, int, NoteRef]:
        return (self.start, self.level, self.end)


@dataclass(frozen=True)
class ProlongationSet:
    """All derived prolongations plus custom records carried in the file."""

    derived: tuple[Prolongation, ...]
    custom: tuple[dict, ...] = ()

    def non_trivial(self) -> tuple[Prolongation, ...]:
        return tuple(p for p in self.derived if p.middles)


@dataclass(frozen=True)
class LiveNote:
    part: Part
    index: int
    depth: int


@dataclass(frozen=True)
class LayerState:
    """The live notes at one clustering layer, in row order
    (verticality index major, part order minor)."""

    notes: tuple[LiveNote, ...]

    def depth_of(self, part: Part, index: int) -> int | None:
        for n in self.notes:
            if n.part is part and n.index == index:
                return n.depth
        return None

    def survivors(self) -> tuple[LiveNote, ...]:
        return tuple(n for n in self.notes if n.depth > 0)


@dataclass(frozen=True)
class ClusterMatrix:
    """One layer's clustering: rows are live notes before, columns after.

    Entries are 0, 0.5, or 1 (all binary-exact in float64); every row sums
    to exactly 1 and every surviving note's row is one-hot on itself.
    """

    data: np.ndarray
    row_labels: tuple[NoteRef, ...]
    col_labels: tuple[NoteRef, ...]

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class ClusterStack:
    """The ordered layer matrices for one analysis; ``n0`` is the total note
    count, which equals the first layer's row count when any layer exists."""

    layers: tuple[ClusterMatrix, ...]
    n0: int


def initial_layer(a: Analysis) -> LayerState:
    notes = [LiveNote(part, i, ev.depth) for part, i, ev in a.notes()]  # type: ignore[arg-type]
    return LayerState(tuple(notes))


def cluster_assignment(
    part: Part, index: int, state: LayerState, lenient: bool = False
) -> tuple[tuple[NoteRef, float], ...]:
    """Targets and weights for one depth-0 live note.

    Branch order: nearest positive-depth note in the same voice to the left,
    then to the right, then a 50/50 split between the nearest soprano and bass
    survivors on opposite sides of the note. With ``lenient``, an outer-voice
    note whose own voice has no survivor falls back to the nearest survivor in
    the other outer voice with weight 1.
    """
    own = [n for n in state.notes if n.part is part and n.depth > 0]
    left = [n for n in own if n.index < index]
    if left:
        j = max(left, key=lambda n: n.index).index
        return (((part, j), 1.0),)
    right = [n for n in own if n.index > index]
    if right:
        j = min(right, key=lambda n: n.index).index
        return (((part, j), 1.0),)

    if part.is_outer:
        if not lenient:
            raise SchaError(
                "E_INFEASIBLE",
                f"outer voice {part.value} has no positive-depth note to absorb index {index}",
            )
        other = Part.BASS if part is Part.SOP else Part.SOP
        targets = [n for n in state.notes if n.part is other and n.depth > 0]
        if not targets:
            raise SchaError(
                "E_INFEASIBLE",
                f"lenient fallback for {part.value} index {index}: no survivor in {other.value}",
            )
        j = min(targets, key=lambda n: (abs(n.index - index), n.index)).index
        return (((other, j), 1.0),)

    sops = [n.index for n in state.notes if n.part is Part.SOP and n.depth > 0]
    basses = [n.index for n in state.notes if n.part is Part.BASS and n.depth > 0]
    if not sops or not basses:
        missing = "soprano" if not sops else "bass"
        raise SchaError(
            "E_INFEASIBLE",
            f"inner voice {part.value} index {index} needs a 50/50 split but {missing} has no survivor",
        )

    def rank(j1: int, j2: int) -> tuple[int, int, int, int]:
        d1, d2 = abs(index - j1), abs(index - j2)
        return (min(d1, d2), max(d1, d2), j1, j2)

    pairs = [(j1, j2) for j1 in sops for j2 in basses if (index - j1) * (index - j2) <= 0]
    if not pairs:
        # All outer survivors sit on one side; relax the opposite-side rule.
        pairs = [(j1, j2) for j1 in sops for j2 in basses]
    j1, j2 = min(pairs, key=lambda p: rank(*p))
    return (((Part.SOP, j1), 0.5), ((Part.BASS, j2), 0.5))


def build_cluster_matrix(state: LayerState, lenient: bool = False) -> ClusterMatrix:
    """One layer's matrix: survivor rows are one-hot on their own column,
    depth-0 rows are filled from :func:`cluster_assignment`."""
    rows = [(n.part, n.index) for n in state.notes]
    cols = [(n.part, n.index) for n in state.notes if n.depth > 0]
    col_pos = {ref: k for k, ref in enumerate(cols)}
    data = np.zeros((len(rows), len(cols)))
    for r, note in enumerate(state.notes):
        if note.depth > 0:
            data[r, col_pos[(note.part, note.index)]] = 1.0
        else:
            for ref, weight in cluster_assignment(note.part, note.index, state, lenient):
                data[r, col_pos[ref]] += weight
    return ClusterMatrix(data, tuple(rows), tuple(cols))


def next_layer(state: LayerState) -> LayerState:
    """Drops depth-0 notes and decrements the survivors."""
    return LayerState(tuple(LiveNote(n.part, n.index, n.depth - 1) for n in state.notes if n.depth > 0))


def cluster_stack(a: Analysis, lenient: bool = False) -> ClusterStack:
    """All layer matrices for an analysis; the layer count equals the maximum
    depth, and identity layers are emitted where no depth-0 note exists."""
    state = initial_layer(a)
    n0 = len(state.notes)
    layers = []
    while state.notes and any(n.depth > 0 for n in state.notes):
        layers.append(build_cluster_matrix(state, lenient))
        state = next_layer(state)
    return ClusterStack(tuple(layers), n0)


def compose(stack: ClusterStack, i: int, j: int) -> np.ndarray:
    """Product of layers i..j-1: how layer-i live notes cluster into layer-j
    survivors. Requires 0 <= i < j <= len(layers)."""
    if not 0 <= i < j <= len(stack.layers):
        raise SchaError("E_BOUNDS", f"compose({i}, {j}) outside 0 <= i < j <= {len(stack.layers)}")
    out = stack.layers[i].data.copy()
    for k in range(i + 1, j):
        out = out @ stack.layers[k].data
    return out


# ---------------------------------------------------------------------------
# Prolongations
# ---------------------------------------------------------------------------


def prolongations_at_level(a: Analysis, level: int) -> tuple[Prolongation, ...]:
    """Consecutive same-voice pairs of notes with depth >= level; the middles
    are the intervening notes of lower depth. Pairs with no middles are
    emitted too (callers may filter)."""
    if level < 1 or level > a.max_depth:
        raise SchaError("E_LEVEL", f"level {level} outside [1, {a.max_depth}]")
    out: list[Prolongation] = []
    for voice in a.voices:
        notes = [(i, ev.depth) for i, ev in voice.pitched()]
        survivors = [i for i, d in notes if d >= level]  # type: ignore[operator]
        for s, e in zip(survivors, survivors[1:]):
            middles = tuple(
                (voice.part, i) for i, d in notes if s < i < e and d < level  # type: ignore[operator]
            )
            out.append(Prolongation(level, voice.part, (voice.part, s), middles, (voice.part, e)))
    return tuple(out)


def all_prolongations(a: Analysis) -> ProlongationSet:
    """Union over all levels, plus custom records from the file verbatim."""
    derived: list[Prolongation] = []
    for level in range(1, a.max_depth + 1):
        derived.extend(prolongations_at_level(a, level))
    derived.sort(key=lambda p: (p.level, p.voice.order, p.start[1]))
    return ProlongationSet(tuple(derived), a.custom_prolongations)


def export_kirlin_text(a: Analysis) -> str:
    """One ``X ( Y ) Z`` line per prolongation with a non-empty middle,
    ordered by (level, voice, start index)."""
    lines = []
    for p in all_prolongations(a).non_trivial():
        mids = " ".join(_ref(m) for m in p.middles)
        lines.append(f"{_ref(p.start)} ( {mids} ) {_ref(p.end)}")
    return "\n".join(lines) + ("\n" if lines else "")


def _ref(ref: NoteRef) -> str:
    part, idx = ref
    return f"{part.value}:{idx}"


def prolongation_obj(p: Prolongation) -> dict:
    return {
        "level": p.level,
        "voice": p.voice.value,
        "start": [p.start[0].value, p.start[1]],
        "middles": [[m[0].value, m[1]] for m in p.middles],
        "end": [p.end[0].value, p.end[1]],
    }


def prolongations_obj(a: Analysis) -> dict:
    ps = all_prolongations(a)
    return {
        "prolongations": [prolongation_obj(p) for p in ps.derived],
        "custom": list(ps.custom),
    }


# ---------------------------------------------------------------------------
# Matrix export
# ---------------------------------------------------------------------------


def stack_obj(stack: ClusterStack) -> dict:
    """JSON-ready form of a stack: one entry per layer with shapes, data,
    and ``part:index`` row/column labels."""
    return {
        "n0": stack.n0,
        "layers": [
            {
                "rows": m.rows,
                "cols": m.cols,
                "data": [[_num(x) for x in row] for row in m.data.tolist()],
                "rowLabels": [_ref(r) for r in m.row_labels],
                "colLabels": [_ref(c) for c in m.col_labels],
            }
            for m in stack.layers
        ],
    }


def matrix_csv(data: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in data.tolist():
        writer.writerow(format(x, "g") for x in row)
    return buf.getvalue()


def _num(x: float) -> float | int:
    return int(x) if x == int(x) else x
