"""HTTP/JSON API over a directory of analysis files.

Documents are stored as canonical `.scha.json` files; the ETag is the SHA-256
hex digest of the canonical bytes, and writes use compare-and-swap on it so
concurrent editors get a clean 409 instead of silently clobbering each other.
"""

from __future__ import annotations

import hashlib
import re
import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .fileformat import parse_analysis, serialize_analysis
from .graph import build_graph, graph_obj
from .model import Analysis, ParseError, SchaError
from .reduction import cluster_stack, prolongations_obj, stack_obj
from .render import derive_render_model, render_svg
from .stats import depth_stats, verticality_count
from .validation import ValidationReport, validate

_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")
SUFFIX = ".scha.json"


def etag_of(canonical: bytes) -> str:
    return hashlib.sha256(canonical).hexdigest()


def _report_obj(report: ValidationReport) -> dict:
    return {
        "ok": report.ok,
        "findings": [
            {"severity": f.severity, "code": f.code, "location": f.location, "message": f.message}
            for f in report.findings
        ],
    }


def _error(status: int, code: str, message: str, findings: ValidationReport | None = None) -> JSONResponse:
    body: dict = {"code": code, "message": message}
    if findings is not None:
        body["findings"] = _report_obj(findings)["findings"]
    return JSONResponse(body, status_code=status)


class AnalysisStore:
    """File-backed store; one lock serializes writes so compare-and-swap on
    the etag is race-free."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.Lock()

    def path(self, id: str) -> Path:
        return self.root / f"{id}{SUFFIX}"

    def ids(self) -> list[str]:
        return sorted(p.name[: -len(SUFFIX)] for p in self.root.glob(f"*{SUFFIX}"))

    def read(self, id: str) -> tuple[bytes, str] | None:
        p = self.path(id)
        if not p.is_file():
            return None
        data = p.read_bytes()
        return data, etag_of(data)

    def compare_and_swap(self, id: str, canonical: bytes, expected: str | None) -> tuple[bool, str | None, int]:
        """Returns (ok, current_etag, status). `expected` is None for a
        create; a mismatch with the stored etag (or an unexpected existing or
        missing document) reports the current etag and 409."""
        with self._lock:
            current = self.read(id)
            if current is None:
                if expected is not None:
                    return False, None, 409
                status = 201
            else:
                if expected is None or expected != current[1]:
                    return False, current[1], 409
                status = 200
            tmp = self.path(id).with_suffix(".tmp")
            tmp.write_bytes(canonical)
            tmp.replace(self.path(id))
            return True, etag_of(canonical), status


def create_app(root: str | Path, cors: str | None = None) -> FastAPI:
    store = AnalysisStore(root)
    app = FastAPI(title="schakit", docs_url=None, redoc_url=None)

    if cors:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors],
            allow_methods=["*"],
            allow_headers=["*"],
            expose_headers=["ETag"],
        )

    def load(id: str) -> tuple[Analysis, bytes, str] | JSONResponse:
        if not _ID_RE.match(id):
            return _error(400, "E_ID", f"invalid analysis id {id!r}")
        stored = store.read(id)
        if stored is None:
            return _error(404, "E_NOT_FOUND", f"no analysis {id!r}")
        data, etag = stored
        try:
            return parse_analysis(data), data, etag
        except ParseError as exc:
            return _error(500, exc.code, f"stored document unreadable: {exc.message}")

    @app.get("/api/analyses")
    def list_analyses() -> JSONResponse:
        out = []
        for id in store.ids():
            loaded = load(id)
            if isinstance(loaded, JSONResponse):
                continue
            a, _, _ = loaded
            meta = {
                k: v
                for k, v in (
                    ("title", a.meta.title),
                    ("subtitle", a.meta.subtitle),
                    ("composer", a.meta.composer),
                    ("analyst", a.meta.analyst),
                    ("description", a.meta.description),
                )
                if v is not None
            }
            out.append({"id": id, "meta": meta, "nv": a.n_v, "maxDepth": a.max_depth})
        return JSONResponse(out)

    @app.get("/api/analyses/{id}")
    def get_analysis(id: str) -> Response:
        loaded = load(id)
        if isinstance(loaded, JSONResponse):
            return loaded
        _, data, etag = loaded
        return Response(data, media_type="application/json", headers={"ETag": etag})

    @app.put("/api/analyses/{id}")
    async def put_analysis(id: str, request: Request) -> Response:
        if not _ID_RE.match(id):
            return _error(400, "E_ID", f"invalid analysis id {id!r}")
        body = await request.body()
        try:
            a = parse_analysis(body)
        except ParseError as exc:
            return _error(400, exc.code, exc.message)
        report = validate(a)
        if not report.ok:
            return _error(422, "E_VALIDATION", "document has validation errors", report)
        canonical = serialize_analysis(a).encode("utf-8")
        expected = request.headers.get("If-Match")
        ok, etag, status = store.compare_and_swap(id, canonical, expected)
        if not ok:
            if etag is None:
                msg = "If-Match given but no stored document"
            elif expected is None:
                msg = "If-Match required to overwrite an existing document"
            else:
                msg = "If-Match does not match the stored document"
            resp = _error(status, "E_STALE", msg)
            if etag:
                resp.headers["ETag"] = etag
            return resp
        return JSONResponse({"id": id, "etag": etag}, status_code=status, headers={"ETag": etag or ""})

    @app.post("/api/analyses/{id}/validate")
    async def validate_analysis(id: str, request: Request) -> Response:
        body = await request.body()
        if body:
            try:
                a = parse_analysis(body)
            except ParseError as exc:
                return _error(400, exc.code, exc.message)
        else:
            loaded = load(id)
            if isinstance(loaded, JSONResponse):
                return loaded
            a = loaded[0]
        return JSONResponse(_report_obj(validate(a)))

    @app.get("/api/analyses/{id}/derived/{kind}")
    def derived(id: str, kind: str) -> Response:
        loaded = load(id)
        if isinstance(loaded, JSONResponse):
            return loaded
        a, _, etag = loaded
        report = validate(a)
        if not report.ok:
            return _error(422, "E_VALIDATION", "document has validation errors", report)
        headers = {"ETag": etag}
        try:
            if kind == "clusters":
                return JSONResponse(stack_obj(cluster_stack(a)), headers=headers)
            if kind == "prolongations":
                return JSONResponse(prolongations_obj(a), headers=headers)
            if kind == "graph":
                return JSONResponse(graph_obj(build_graph(a)), headers=headers)
            if kind == "render":
                svg = render_svg(derive_render_model(a))
                return Response(svg, media_type="image/svg+xml", headers=headers)
        except SchaError as exc:
            return _error(422, exc.code, exc.message)
        return _error(404, "E_NOT_FOUND", f"no derived view {kind!r}")

    @app.get("/api/corpus/stats")
    def corpus_stats() -> JSONResponse:
        corpus = []
        for id in store.ids():
            loaded = load(id)
            if isinstance(loaded, JSONResponse):
                continue
            corpus.append(loaded[0])
        ds = depth_stats(corpus)
        return JSONResponse(
            {
                "excerpts": len(corpus),
                "notes": sum(a.note_count for a in corpus),
                "verticalities": sum(verticality_count(a) for a in corpus),
                "perDepth": {
                    str(d): {"literal": lit, "inclusive": inc}
                    for d, (lit, inc) in ds.per_depth.items()
                },
                "maxDepthHistogram": {str(d): n for d, n in ds.max_depth_histogram.items()},
            }
        )

    return app
