"""Toolkit for hierarchical (Schenkerian) music analyses: a JSON file format,
depth-driven reduction into clustering matrices, prolongations, an edge-typed
score graph, corpus statistics, SVG rendering, and an HTTP service."""

from .fileformat import analysis_from_obj, analysis_to_obj, parse_analysis, parse_pitch, serialize_analysis
from .graph import EdgeKind, GraphConfig, ScoreGraph, build_graph, export_graph, node_features
from .model import (
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
    midi_number,
    part_from_name,
)
from .reduction import (
    ClusterMatrix,
    ClusterStack,
    Prolongation,
    ProlongationSet,
    all_prolongations,
    build_cluster_matrix,
    cluster_stack,
    compose,
    export_kirlin_text,
    prolongations_at_level,
)
from .render import RenderModel, derive_render_model, render_svg
from .service import create_app
from .stats import DepthStats, depth_stats, interval_histogram, load_corpus, verticality_count
from .validation import Finding, ValidationReport, validate

__version__ = "0.1.0"

__all__ = [
    "Analysis",
    "ClusterMatrix",
    "ClusterStack",
    "CrossVoiceSymbol",
    "DepthStats",
    "EdgeKind",
    "Finding",
    "GraphConfig",
    "Key",
    "Meta",
    "Meter",
    "NoteEvent",
    "ParseError",
    "Part",
    "PitchSpec",
    "Prolongation",
    "ProlongationSet",
    "RenderModel",
    "SchaError",
    "ScoreGraph",
    "SlotKind",
    "ValidationReport",
    "Voice",
    "all_prolongations",
    "analysis_from_obj",
    "analysis_to_obj",
    "build_cluster_matrix",
    "build_graph",
    "cluster_stack",
    "compose",
    "create_app",
    "depth_stats",
    "derive_render_model",
    "export_graph",
    "export_kirlin_text",
    "interval_histogram",
    "load_corpus",
    "midi_number",
    "node_features",
    "parse_analysis",
    "parse_pitch",
    "part_from_name",
    "prolongations_at_level",
    "render_svg",
    "serialize_analysis",
    "validate",
    "verticality_count",
    "__version__",
]
