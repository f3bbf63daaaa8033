"""Corpus-level statistics over directories of analysis files.

Depth statistics count notes per depth both literally (the depth stored on
the note) and inclusively (a note of depth d counts at every depth <= d);
interval histograms take signed semitone differences between consecutive
outer-voice notes surviving at a given depth.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .fileformat import parse_analysis
from .model import Analysis, Part, SchaError


@dataclass(frozen=True)
class DepthStats:
    per_depth: dict[int, tuple[int, int]]  # depth -> (literal, inclusive)
    max_depth_histogram: dict[int, int]  # max depth -> excerpt count

    def literal(self, depth: int) -> int:
        return self.per_depth.get(depth, (0, 0))[0]

    def inclusive(self, depth: int) -> int:
        return self.per_depth.get(depth, (0, 0))[1]


def verticality_count(a: Analysis) -> int:
    """Number of time slots at which a treble or bass note exists (onset or
    continuation)."""
    count = 0
    for i in range(a.n_v):
        if any(not a.voice(p).slots[i].is_rest for p in (Part.SOP, Part.BASS)):
            count += 1
    return count


def depth_stats(corpus: list[Analysis]) -> DepthStats:
    literal: dict[int, int] = {}
    max_hist: dict[int, int] = {}
    for a in corpus:
        depths = [ev.depth for _, _, ev in a.notes()]
        if not depths:
            continue
        for d in depths:
            literal[d] = literal.get(d, 0) + 1
        m = max(depths)
        max_hist[m] = max_hist.get(m, 0) + 1

    per_depth: dict[int, tuple[int, int]] = {}
    if literal:
        top = max(literal)
        running = 0
        for d in range(top, -1, -1):
            running += literal.get(d, 0)
            per_depth[d] = (literal.get(d, 0), running)
        per_depth = dict(sorted(per_depth.items()))
    return DepthStats(per_depth, dict(sorted(max_hist.items())))


def interval_histogram(corpus: list[Analysis], voice: str, depth: int) -> dict[int, int]:
    """Signed semitone intervals between consecutive notes of the chosen outer
    voice whose depth is at least `depth`, accumulated over the corpus."""
    part = {"treble": Part.SOP, "bass": Part.BASS}.get(voice)
    if part is None:
        raise SchaError("E_VOICE", f"interval histograms cover outer voices only, not {voice!r}")
    hist: dict[int, int] = {}
    for a in corpus:
        midis = [
            ev.pitch.midi  # type: ignore[union-attr]
            for _, ev in a.voice(part).pitched()
            if ev.depth is not None and ev.depth >= depth
        ]
        for m1, m2 in zip(midis, midis[1:]):
            hist[m2 - m1] = hist.get(m2 - m1, 0) + 1
    return dict(sorted(hist.items()))


def load_corpus(root: str | Path, jobs: int = 1) -> list[tuple[Path, Analysis]]:
    """Parse every `*.scha.json` under `root` (recursively), in path order."""
    paths = sorted(Path(root).rglob("*.scha.json"))

    def load(p: Path) -> tuple[Path, Analysis]:
        return p, parse_analysis(p.read_text(encoding="utf-8"))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(load, paths))
    return [load(p) for p in paths]


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def write_stats_csv(path: str | Path, corpus: list[Analysis]) -> None:
    """Summary file with (statistic, key, value) rows."""
    ds = depth_stats(corpus)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["statistic", "key", "value"])
        w.writerow(["excerpts", "", len(corpus)])
        w.writerow(["verticalities", "", sum(verticality_count(a) for a in corpus)])
        w.writerow(["notes", "", sum(a.note_count for a in corpus)])
        for d, (lit, inc) in ds.per_depth.items():
            w.writerow(["depth-literal", d, lit])
            w.writerow(["depth-inclusive", d, inc])
        for d, n in ds.max_depth_histogram.items():
            w.writerow(["max-depth", d, n])


def write_interval_csvs(prefix: str | Path, corpus: list[Analysis]) -> list[Path]:
    """One CSV per (outer voice, depth) with interval counts; returns the
    paths written."""
    ds = depth_stats(corpus)
    top = max(ds.per_depth) if ds.per_depth else -1
    written = []
    for voice in ("treble", "bass"):
        for d in range(top + 1):
            hist = interval_histogram(corpus, voice, d)
            out = Path(f"{prefix}intervals_{voice}_d{d}.csv")
            with open(out, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["interval", "count"])
                for k, n in hist.items():
                    w.writerow([k, n])
            written.append(out)
    return written
