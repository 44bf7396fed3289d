"""Client for a paginated decision-search web API.

Queries are date-windowed month by month, each window is paged until the
server-reported total is exhausted, and both document formats are downloaded
per result. Politeness controls (request delay, bounded retry) are always on
so a live endpoint is never hammered; the bundled fixture server uses the
same wire protocol with the delay set to zero.
"""

from __future__ import annotations

import json
import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

import requests

logger = logging.getLogger(__name__)

SORT_DECISION_DATE_DESC = "decisionDateDesc"

DEFAULT_ENDPOINT = "https://www.canlii.org/en/search/ajaxSearch.do"


class TransportError(Exception):
    """HTTP request failed after retries."""

    def __init__(self, message: str, url: str, attempts: int):
        super().__init__(message)
        self.url = url
        self.attempts = attempts


class PageParseError(Exception):
    """Result page body is not in the expected JSON shape."""


@dataclass
class SearchQuery:
    text_exact: str
    collection_id: str
    start_date: date
    end_date: date
    sort_order: str = SORT_DECISION_DATE_DESC
    page: int = 1

    def validate(self) -> None:
        if not self.text_exact:
            raise ValueError("search keyword must not be empty")
        if self.start_date > self.end_date:
            raise ValueError(
                f"start_date {self.start_date} is after end_date {self.end_date}"
            )
        if self.page < 1:
            raise ValueError("page must be >= 1")


@dataclass
class ResultStub:
    case_id: str
    citation: str
    decision_date: date
    pdf_url: str | None
    html_url: str | None
    keywords: list[str] = field(default_factory=list)


@dataclass
class CaseDocument:
    case_id: str
    decision_date: date
    html_payload: bytes | None = None
    pdf_payload: bytes | None = None
    source_keywords: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.case_id:
            raise ValueError("case_id must be non-empty")
        if self.html_payload is None and self.pdf_payload is None:
            raise ValueError(f"{self.case_id}: no payload in either format")


@dataclass
class HarvestResult:
    documents: list[CaseDocument]
    failures: list[dict]
    pages_fetched: int


def slugify(citation: str) -> str:
    """Derive a case id from a citation: lowercase, non-alphanumerics to '-'."""
    slug = re.sub(r"[^a-z0-9]+", "-", citation.lower()).strip("-")
    if not slug:
        raise ValueError(f"citation {citation!r} yields an empty case id")
    return slug


def build_query_url(query: SearchQuery, base_endpoint: str = DEFAULT_ENDPOINT) -> str:
    """Assemble the search URL with the fixed parameter order.

    The parameter order and the EXACT() wrapper are part of the wire
    protocol, so the URL is assembled literally instead of going through a
    generic query-string encoder.
    """
    query.validate()
    if "?" in base_endpoint:
        raise ValueError("base_endpoint must not already carry a query string")
    params = (
        ("type", "decision"),
        ("ccId", query.collection_id),
        ("text", f"EXACT({query.text_exact})"),
        ("startDate", query.start_date.isoformat()),
        ("endDate", query.end_date.isoformat()),
        ("sort", query.sort_order),
        ("page", str(query.page)),
    )
    return base_endpoint + "?" + "&".join(f"{k}={v}" for k, v in params)


def parse_result_page(body: bytes | str) -> tuple[list[ResultStub], int]:
    """Decode one JSON result page into stubs plus the server-reported total."""
    try:
        payload = json.loads(body)
        total = int(payload["totalResults"])
        raw_results = payload["results"]
        stubs = []
        for item in raw_results:
            stubs.append(
                ResultStub(
                    case_id=slugify(item["citation"]),
                    citation=item["citation"],
                    decision_date=date.fromisoformat(item["decisionDate"]),
                    pdf_url=item.get("pdfUrl"),
                    html_url=item.get("htmlUrl"),
                    keywords=list(item.get("keywords", [])),
                )
            )
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise PageParseError(f"malformed result page: {exc}") from exc
    return stubs, total


def month_windows(start: date, end: date) -> list[tuple[date, date]]:
    """Calendar-month windows covering [start, end]."""
    if start > end:
        raise ValueError(f"start {start} is after end {end}")
    windows = []
    cur = start
    while cur <= end:
        if cur.month == 12:
            next_month = date(cur.year + 1, 1, 1)
        else:
            next_month = date(cur.year, cur.month + 1, 1)
        windows.append((cur, min(end, next_month - timedelta(days=1))))
        cur = next_month
    return windows


class RetrievalClient:
    """Search, paginate and download against one endpoint."""

    def __init__(
        self,
        base_endpoint: str = DEFAULT_ENDPOINT,
        request_delay: float = 1.0,
        max_attempts: int = 3,
        backoff: float = 0.5,
        max_parallel_downloads: int = 4,
        timeout: float = 30.0,
    ):
        self.base_endpoint = base_endpoint
        self.request_delay = request_delay
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.max_parallel_downloads = max_parallel_downloads
        self.timeout = timeout
        self.session = requests.Session()
        self.pages_fetched = 0

    def _get(self, url: str) -> bytes:
        last_error: Exception | None = None
        for attempt in range(self.max_attempts):
            if self.request_delay:
                time.sleep(self.request_delay)
            try:
                resp = self.session.get(url, timeout=self.timeout)
                resp.raise_for_status()
                return resp.content
            except requests.RequestException as exc:
                last_error = exc
                if attempt < self.max_attempts - 1:
                    time.sleep(self.backoff * (2**attempt))
        raise TransportError(
            f"GET {url} failed after {self.max_attempts} attempts: {last_error}",
            url=url,
            attempts=self.max_attempts,
        )

    def fetch_result_page(self, query: SearchQuery) -> tuple[list[ResultStub], int]:
        url = build_query_url(query, self.base_endpoint)
        body = self._get(url)
        self.pages_fetched += 1
        stubs, total = parse_result_page(body)
        return stubs, total

    def _iter_window_stubs(
        self, query: SearchQuery, failures: list[dict]
    ) -> list[ResultStub]:
        """All stubs of one date window, page 1 until total is exhausted."""
        stubs: list[ResultStub] = []
        page = 1
        total = None
        while total is None or len(stubs) < total:
            page_query = SearchQuery(
                text_exact=query.text_exact,
                collection_id=query.collection_id,
                start_date=query.start_date,
                end_date=query.end_date,
                sort_order=query.sort_order,
                page=page,
            )
            try:
                page_stubs, total = self.fetch_result_page(page_query)
            except PageParseError as exc:
                _record_failure(
                    failures, "", build_query_url(page_query, self.base_endpoint), str(exc)
                )
                break
            if total == 0 or not page_stubs:
                break
            stubs.extend(page_stubs)
            page += 1
        return stubs

    def _download_stub(
        self, stub: ResultStub, failures: list[dict]
    ) -> CaseDocument | None:
        pdf = html = None
        for attr, url in (("pdf", stub.pdf_url), ("html", stub.html_url)):
            if not url:
                continue
            try:
                payload = self._get(url)
            except TransportError as exc:
                _record_failure(failures, stub.case_id, url, str(exc))
                continue
            if attr == "pdf":
                pdf = payload
            else:
                html = payload
        if pdf is None and html is None:
            _record_failure(
                failures, stub.case_id, stub.pdf_url or stub.html_url or "", "no format downloadable"
            )
            return None
        return CaseDocument(
            case_id=stub.case_id,
            decision_date=stub.decision_date,
            html_payload=html,
            pdf_payload=pdf,
            source_keywords=stub.keywords,
        )

    def harvest(
        self, start: date, end: date, collection_id: str, text_exact: str = "REFUGEE"
    ) -> HarvestResult:
        """Retrieve every unique case decided in [start, end]."""
        failures: list[dict] = []
        start_pages = self.pages_fetched
        stubs: dict[str, ResultStub] = {}
        for win_start, win_end in month_windows(start, end):
            window_query = SearchQuery(
                text_exact=text_exact,
                collection_id=collection_id,
                start_date=win_start,
                end_date=win_end,
            )
            for stub in self._iter_window_stubs(window_query, failures):
                stubs.setdefault(stub.case_id, stub)

        documents: list[CaseDocument] = []
        with ThreadPoolExecutor(max_workers=self.max_parallel_downloads) as pool:
            for doc in pool.map(
                lambda s: self._download_stub(s, failures), stubs.values()
            ):
                if doc is not None:
                    documents.append(doc)
        documents.sort(key=lambda d: d.case_id)
        return HarvestResult(
            documents=documents,
            failures=failures,
            pages_fetched=self.pages_fetched - start_pages,
        )


def _record_failure(failures: list[dict], case_id: str, url: str, error: str) -> None:
    entry = {
        "case_id": case_id,
        "url": url,
        "error": error,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    failures.append(entry)
    logger.error("retrieval failure for %s (%s): %s", case_id or "<page>", url, error)


def write_failure_manifest(failures: list[dict], path: str | Path) -> None:
    """One JSON object per line: {case_id, url, error, timestamp}."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for entry in failures:
            fh.write(json.dumps(entry, ensure_ascii=False) + "\n")


def save_corpus(documents: list[CaseDocument], out_dir: str | Path) -> Path:
    """Persist payloads and metadata under out_dir/documents + metadata.jsonl."""
    out = Path(out_dir)
    doc_dir = out / "documents"
    doc_dir.mkdir(parents=True, exist_ok=True)
    with (out / "metadata.jsonl").open("w", encoding="utf-8") as fh:
        for doc in sorted(documents, key=lambda d: d.case_id):
            if doc.pdf_payload:
                (doc_dir / f"{doc.case_id}.pdf").write_bytes(doc.pdf_payload)
            if doc.html_payload:
                (doc_dir / f"{doc.case_id}.html").write_bytes(doc.html_payload)
            fh.write(
                json.dumps(
                    {
                        "case_id": doc.case_id,
                        "decision_date": doc.decision_date.isoformat(),
                        "keywords": doc.source_keywords,
                        "has_pdf": doc.pdf_payload is not None,
                        "has_html": doc.html_payload is not None,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    return out


def load_corpus(corpus_dir: str | Path) -> list[CaseDocument]:
    """Reload a corpus written by save_corpus."""
    corpus_dir = Path(corpus_dir)
    doc_dir = corpus_dir / "documents"
    documents = []
    with (corpus_dir / "metadata.jsonl").open(encoding="utf-8") as fh:
        for line in fh:
            meta = json.loads(line)
            case_id = meta["case_id"]
            pdf_path = doc_dir / f"{case_id}.pdf"
            html_path = doc_dir / f"{case_id}.html"
            documents.append(
                CaseDocument(
                    case_id=case_id,
                    decision_date=date.fromisoformat(meta["decision_date"]),
                    pdf_payload=pdf_path.read_bytes() if pdf_path.exists() else None,
                    html_payload=html_path.read_bytes() if html_path.exists() else None,
                    source_keywords=list(meta.get("keywords", [])),
                )
            )
    return documents
