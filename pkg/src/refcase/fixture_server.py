"""In-process HTTP server mimicking the decision-search API.

Serves the same wire protocol the retrieval client speaks (paginated JSON
result pages plus document downloads) from an in-memory catalog, so every
retrieval test runs offline. The bundled catalog lives in package data.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from datetime import date
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from importlib import resources
from pathlib import Path
from urllib.parse import parse_qs, urlparse

SEARCH_PATH = "/en/search/ajaxSearch.do"
DOC_PATH = "/doc/"


@dataclass
class FixtureStub:
    citation: str
    decision_date: date
    keywords: list[str] = field(default_factory=list)
    pdf: bytes | None = None
    html: bytes | None = None


@dataclass
class FixtureCatalog:
    collection_id: str
    page_size: int
    stubs: list[FixtureStub]

    @classmethod
    def bundled(cls) -> "FixtureCatalog":
        """Load the catalog and documents shipped in package data."""
        return cls.from_dir(resources.files("refcase").joinpath("data/fixture"))

    @classmethod
    def from_dir(cls, root) -> "FixtureCatalog":
        """Load a catalog.json plus documents/ directory layout."""
        root = root if hasattr(root, "joinpath") else Path(root)
        meta = json.loads(root.joinpath("catalog.json").read_text(encoding="utf-8"))
        stubs = []
        for entry in meta["stubs"]:
            pdf = html = None
            if entry.get("pdf"):
                pdf = root.joinpath("documents", entry["pdf"]).read_bytes()
            if entry.get("html"):
                html = root.joinpath("documents", entry["html"]).read_bytes()
            stubs.append(
                FixtureStub(
                    citation=entry["citation"],
                    decision_date=date.fromisoformat(entry["decisionDate"]),
                    keywords=list(entry.get("keywords", [])),
                    pdf=pdf,
                    html=html,
                )
            )
        return cls(
            collection_id=meta["collectionId"],
            page_size=int(meta["pageSize"]),
            stubs=stubs,
        )


class _Handler(BaseHTTPRequestHandler):
    catalog: FixtureCatalog  # set by the server

    def log_message(self, fmt, *args):  # silence default stderr logging
        pass

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, payload: dict) -> None:
        self._send(status, json.dumps(payload).encode("utf-8"), "application/json")

    def do_GET(self):
        parsed = urlparse(self.path)
        if parsed.path == SEARCH_PATH:
            self._handle_search(parse_qs(parsed.query))
        elif parsed.path.startswith(DOC_PATH):
            self._handle_document(parsed.path[len(DOC_PATH):])
        else:
            self._send_json(404, {"error": "not found"})

    def _handle_search(self, params: dict) -> None:
        catalog = self.catalog
        try:
            start = date.fromisoformat(params["startDate"][0])
            end = date.fromisoformat(params["endDate"][0])
            page = int(params.get("page", ["1"])[0])
            collection = params.get("ccId", [""])[0]
        except (KeyError, ValueError):
            self._send_json(400, {"error": "bad query"})
            return
        matches = [
            stub
            for stub in catalog.stubs
            if collection == catalog.collection_id
            and start <= stub.decision_date <= end
        ]
        matches.sort(key=lambda s: (s.decision_date, s.citation), reverse=True)
        size = catalog.page_size
        window = matches[(page - 1) * size : page * size]
        host = self.headers.get("Host", "localhost")
        results = []
        for stub in window:
            name = _doc_name(stub.citation)
            results.append(
                {
                    "citation": stub.citation,
                    "decisionDate": stub.decision_date.isoformat(),
                    "keywords": stub.keywords,
                    "pdfUrl": f"http://{host}{DOC_PATH}{name}.pdf" if stub.pdf else None,
                    "htmlUrl": f"http://{host}{DOC_PATH}{name}.html" if stub.html else None,
                }
            )
        self._send_json(200, {"totalResults": len(matches), "results": results})

    def _handle_document(self, name: str) -> None:
        for stub in self.catalog.stubs:
            base = _doc_name(stub.citation)
            if name == f"{base}.pdf" and stub.pdf is not None:
                self._send(200, stub.pdf, "application/pdf")
                return
            if name == f"{base}.html" and stub.html is not None:
                self._send(200, stub.html, "text/html")
                return
        self._send_json(404, {"error": f"no document {name}"})


def _doc_name(citation: str) -> str:
    from .retrieval import slugify

    return slugify(citation)


class FixtureServer:
    """Threaded fixture endpoint; use as a context manager in tests."""

    def __init__(self, catalog: FixtureCatalog, host: str = "127.0.0.1", port: int = 0):
        handler = type("BoundHandler", (_Handler,), {"catalog": catalog})
        self._server = ThreadingHTTPServer((host, port), handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def base_endpoint(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}{SEARCH_PATH}"

    def start(self) -> "FixtureServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self) -> "FixtureServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def write_catalog(catalog: FixtureCatalog, out_dir: str | Path) -> Path:
    """Materialize a catalog to disk in the bundled-data layout."""
    out = Path(out_dir)
    doc_dir = out / "documents"
    doc_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for stub in catalog.stubs:
        name = _doc_name(stub.citation)
        entry = {
            "citation": stub.citation,
            "decisionDate": stub.decision_date.isoformat(),
            "keywords": stub.keywords,
            "pdf": None,
            "html": None,
        }
        if stub.pdf is not None:
            (doc_dir / f"{name}.pdf").write_bytes(stub.pdf)
            entry["pdf"] = f"{name}.pdf"
        if stub.html is not None:
            (doc_dir / f"{name}.html").write_bytes(stub.html)
            entry["html"] = f"{name}.html"
        entries.append(entry)
    (out / "catalog.json").write_text(
        json.dumps(
            {
                "collectionId": catalog.collection_id,
                "pageSize": catalog.page_size,
                "stubs": entries,
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return out
