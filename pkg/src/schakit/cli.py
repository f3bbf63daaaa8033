"""Command-line entry point.

Exit codes: 0 success, 1 validation errors, 2 parse/usage/IO errors.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .fileformat import parse_analysis
from .graph import GraphConfig, build_graph, export_graph
from .model import Analysis, ParseError, SchaError
from .reduction import cluster_stack, compose, export_kirlin_text, matrix_csv, prolongations_obj, stack_obj
from .render import derive_render_model, render_svg
from .stats import load_corpus, write_interval_csvs, write_stats_csv
from .validation import validate


def _load(path: str) -> Analysis:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        return parse_analysis(text)
    except ParseError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


@click.group()
def main() -> None:
    """Tools for hierarchical music-analysis files."""


@main.command("validate")
@click.argument("file", type=click.Path())
@click.option("--lenient", is_flag=True, help="Degrade recoverable structural errors to warnings.")
def validate_cmd(file: str, lenient: bool) -> None:
    """Check FILE and report findings, one per line."""
    a = _load(file)
    report = validate(a, lenient=lenient)
    for f in report.findings:
        click.echo(f.line(), err=True)
    sys.exit(0 if report.ok else 1)


@main.command("clusters")
@click.argument("file", type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--compose", "compose_range", nargs=2, type=int, default=None)
@click.option("--lenient", is_flag=True)
def clusters_cmd(file: str, out_dir: str, fmt: str, compose_range: tuple[int, int] | None, lenient: bool) -> None:
    """Write the clustering matrices of FILE into --out."""
    a = _load(file)
    try:
        stack = cluster_stack(a, lenient=lenient)
    except SchaError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if fmt == "csv":
            for l, m in enumerate(stack.layers):
                (out / f"S{l}.csv").write_text(matrix_csv(m.data), encoding="utf-8")
            if compose_range:
                i, j = compose_range
                (out / f"S_{i}_to_{j}.csv").write_text(matrix_csv(compose(stack, i, j)), encoding="utf-8")
        else:
            import json

            (out / "stack.json").write_text(
                json.dumps(stack_obj(stack), indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
            if compose_range:
                i, j = compose_range
                data = [[float(x) for x in row] for row in compose(stack, i, j).tolist()]
                (out / f"S_{i}_to_{j}.json").write_text(
                    json.dumps(data, indent=2) + "\n", encoding="utf-8"
                )
    except SchaError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


@main.command("prolongations")
@click.argument("file", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["kirlin", "json"]), default="kirlin")
def prolongations_cmd(file: str, fmt: str) -> None:
    """Print the prolongations of FILE."""
    a = _load(file)
    if fmt == "kirlin":
        click.echo(export_kirlin_text(a), nl=False)
    else:
        import json

        click.echo(json.dumps(prolongations_obj(a), indent=2, sort_keys=True))


@main.command("graph")
@click.argument("file", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["edgelist", "dot"]), default="edgelist")
@click.option("--linear-intervals", "intervals", default="-2,-1,1,2", show_default=True)
@click.option("--window", type=int, default=8, show_default=True)
@click.option("--linear-same-voice", is_flag=True)
def graph_cmd(file: str, fmt: str, intervals: str, window: int, linear_same_voice: bool) -> None:
    """Print the edge-typed score graph of FILE."""
    a = _load(file)
    try:
        parsed = frozenset(int(s) for s in intervals.split(",") if s.strip()) if intervals else frozenset()
    except ValueError:
        click.echo(f"error: --linear-intervals must be comma-separated integers, got {intervals!r}", err=True)
        sys.exit(2)
    cfg = GraphConfig(parsed, window, linear_same_voice)
    click.echo(export_graph(build_graph(a, cfg), fmt), nl=False)


@main.command("stats")
@click.argument("dir", type=click.Path(file_okay=False))
@click.option("--out", "prefix", required=True)
@click.option("--histograms", is_flag=True)
@click.option("--jobs", type=int, default=1, show_default=True)
def stats_cmd(dir: str, prefix: str, histograms: bool, jobs: int) -> None:
    """Aggregate statistics over the *.scha.json files under DIR."""
    try:
        corpus = [a for _, a in load_corpus(dir, jobs=jobs)]
    except (OSError, ParseError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        write_stats_csv(f"{prefix}stats.csv", corpus)
        written = [Path(f"{prefix}stats.csv")]
        if histograms:
            written += write_interval_csvs(prefix, corpus)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    for p in written:
        click.echo(str(p))


@main.command("render")
@click.argument("file", type=click.Path())
@click.option("--out", "out_file", required=True, type=click.Path(dir_okay=False))
def render_cmd(file: str, out_file: str) -> None:
    """Write an SVG rendering of FILE to --out."""
    a = _load(file)
    try:
        Path(out_file).write_text(render_svg(derive_render_model(a)), encoding="utf-8")
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


@main.command("serve")
@click.option("--root", required=True, type=click.Path(file_okay=False, exists=True))
@click.option("--port", type=int, default=8321, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--cors", default=None, help="Allowed browser origin for the editor UI.")
def serve_cmd(root: str, port: int, host: str, cors: str | None) -> None:
    """Serve the HTTP API over the analyses under --root."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(root, cors=cors), host=host, port=port)


if __name__ == "__main__":
    main()
