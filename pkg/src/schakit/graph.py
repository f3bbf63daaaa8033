"""Heterogeneous edge-typed score graph built from an analysis.

Nodes are pitched onsets (holds extend the previous onset's duration). Five
edge kinds relate them: forward (consecutive onsets within a voice), rest
(forward across at least one rest slot), onset (simultaneous onsets in
different voices, both directions), sustain (a held note to a note onsetting
under it), and linear (a note to the nearest later onset at a configured
semitone interval).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .model import Analysis, Meter, Part, PitchSpec, SchaError


class EdgeKind(str, Enum):
    FORWARD = "forward"
    ONSET = "onset"
    SUSTAIN = "sustain"
    REST = "rest"
    LINEAR = "linear"


@dataclass(frozen=True)
class GraphConfig:
    """Linear-edge parameters: target intervals in signed semitones, lookahead
    window in verticalities, and whether targets stay within the source voice."""

    linear_intervals: frozenset[int] = frozenset({-2, -1, 1, 2})
    linear_window: int = 8
    linear_same_voice: bool = False


@dataclass(frozen=True)
class GraphNode:
    part: Part
    index: int
    pitch: PitchSpec
    duration: int  # verticality slots covered, holds included

    @property
    def node_id(self) -> str:
        return f"{self.part.value}:{self.index}"


@dataclass(frozen=True)
class Edge:
    src: int  # node positions in ScoreGraph.nodes
    dst: int
    kind: EdgeKind
    interval: int | None = None  # linear edges only


@dataclass(frozen=True)
class ScoreGraph:
    nodes: tuple[GraphNode, ...]
    edges: tuple[Edge, ...]
    features: tuple[dict[str, float | int], ...] = ()


DEFAULT_FEATURES = ("pitch-class", "octave", "duration", "position-absolute", "position-relative")


def graph_nodes(a: Analysis) -> tuple[GraphNode, ...]:
    """Pitched onsets in (verticality index, part order) order, with durations
    counted through the trailing holds."""
    nodes = []
    for part, i, ev in a.notes():
        voice = a.voice(part)
        dur = 1
        while i + dur < len(voice) and voice.slots[i + dur].is_hold:
            dur += 1
        nodes.append(GraphNode(part, i, ev.pitch, dur))  # type: ignore[arg-type]
    return tuple(nodes)


def build_graph(a: Analysis, cfg: GraphConfig = GraphConfig()) -> ScoreGraph:
    nodes = graph_nodes(a)
    pos = {(n.part, n.index): k for k, n in enumerate(nodes)}
    by_onset: dict[int, list[int]] = {}
    for k, n in enumerate(nodes):
        by_onset.setdefault(n.index, []).append(k)

    edges: list[Edge] = []

    # Forward / rest: consecutive onsets within one voice; any rest slot
    # strictly between them turns the edge into a rest edge.
    for voice in a.voices:
        onsets = [i for i, _ in voice.pitched()]
        for i1, i2 in zip(onsets, onsets[1:]):
            between_rest = any(voice.slots[j].is_rest for j in range(i1 + 1, i2))
            kind = EdgeKind.REST if between_rest else EdgeKind.FORWARD
            edges.append(Edge(pos[(voice.part, i1)], pos[(voice.part, i2)], kind))

    # Onset: both directions for every simultaneous pair in different voices.
    for i in sorted(by_onset):
        group = by_onset[i]
        for u in group:
            for v in group:
                if u != v:
                    edges.append(Edge(u, v, EdgeKind.ONSET))

    # Sustain: source still sounding (via holds) when the target onsets.
    for u, n in enumerate(nodes):
        for j in range(n.index + 1, n.index + n.duration):
            for v in by_onset.get(j, []):
                edges.append(Edge(u, v, EdgeKind.SUSTAIN))

    # Linear: nearest later onset at each configured interval, one per (u, k).
    max_index = max((n.index for n in nodes), default=-1)
    for u, n in enumerate(nodes):
        src_midi = n.pitch.midi
        for k in sorted(cfg.linear_intervals):
            target = src_midi + k
            found = None
            for j in range(n.index + 1, min(n.index + cfg.linear_window, max_index) + 1):
                for v in by_onset.get(j, []):
                    cand = nodes[v]
                    if cfg.linear_same_voice and cand.part is not n.part:
                        continue
                    if cand.pitch.midi == target:
                        found = v
                        break
                if found is not None:
                    break
            if found is not None:
                edges.append(Edge(u, found, EdgeKind.LINEAR, interval=k))

    features = node_features(a, list(DEFAULT_FEATURES) + (["metric-strength"] if a.meter else []))
    return ScoreGraph(nodes, tuple(edges), features)


def node_features(a: Analysis, columns: list[str]) -> tuple[dict[str, float | int], ...]:
    """Per-node feature dicts in node order.

    Supported columns: pitch-class, octave, duration, position-absolute,
    position-relative, metric-strength (requires a meter). Raises E_FEATURE
    for unknown names and E_METER when metric strength is requested without
    a meter.
    """
    for col in columns:
        if col not in DEFAULT_FEATURES + ("metric-strength",):
            raise SchaError("E_FEATURE", f"unknown feature column {col!r}")
    if "metric-strength" in columns and a.meter is None:
        raise SchaError("E_METER", "metric-strength requested but the analysis has no meter")

    n_v = a.n_v
    out = []
    for node in graph_nodes(a):
        row: dict[str, float | int] = {}
        for col in columns:
            if col == "pitch-class":
                row[col] = node.pitch.midi % 12
            elif col == "octave":
                row[col] = node.pitch.octave
            elif col == "duration":
                row[col] = node.duration
            elif col == "position-absolute":
                row[col] = node.index
            elif col == "position-relative":
                row[col] = 0.0 if n_v <= 1 else node.index / (n_v - 1)
            elif col == "metric-strength":
                row[col] = _metric_strength(node.index, a.meter)  # type: ignore[arg-type]
        out.append(row)
    return tuple(out)


def _metric_strength(slot: int, meter: Meter) -> int:
    t = slot - meter.offset
    if t % (meter.beats_per_bar * meter.beat_unit) == 0:
        return 2
    if t % meter.beat_unit == 0:
        return 1
    return 0


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

DOT_STYLES = {
    EdgeKind.FORWARD: "solid",
    EdgeKind.ONSET: "dotted",
    EdgeKind.SUSTAIN: "dashed",
    EdgeKind.REST: "bold",
    EdgeKind.LINEAR: "solid",
}


def graph_obj(g: ScoreGraph) -> dict:
    nodes = []
    for k, n in enumerate(g.nodes):
        entry: dict = {
            "id": n.node_id,
            "part": n.part.value,
            "index": n.index,
            "pitch": n.pitch.token(),
        }
        if g.features:
            entry["features"] = g.features[k]
        nodes.append(entry)
    edges = []
    for e in g.edges:
        entry = {"src": g.nodes[e.src].node_id, "dst": g.nodes[e.dst].node_id, "kind": e.kind.value}
        if e.interval is not None:
            entry["interval"] = e.interval
        edges.append(entry)
    return {"nodes": nodes, "edges": edges}


def export_graph(g: ScoreGraph, format: str = "edgelist-json") -> str:
    if format in ("edgelist-json", "edgelist"):
        return json.dumps(graph_obj(g), indent=2, sort_keys=True) + "\n"
    if format == "dot":
        return _export_dot(g)
    raise SchaError("E_FORMAT", f"unknown graph export format {format!r}")


def _export_dot(g: ScoreGraph) -> str:
    lines = ["digraph score {"]
    for n in g.nodes:
        lines.append(f'  "{n.node_id}" [label="{n.pitch.token()}"];')
    for e in g.edges:
        src, dst = g.nodes[e.src].node_id, g.nodes[e.dst].node_id
        attrs = f'kind={e.kind.value}, style={DOT_STYLES[e.kind]}'
        if e.kind is EdgeKind.LINEAR:
            attrs += f', label="{e.interval:+d}"'
        lines.append(f'  "{src}" -> "{dst}" [{attrs}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
