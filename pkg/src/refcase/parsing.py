"""Document preprocessing: cover extraction, main-text parsing, segmentation.

The cover page is taken from the PDF (page anchors are reliable there), the
main text from the HTML (paragraph tags are reliable there); each operation
falls back to the other format when a payload is missing.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from html.parser import HTMLParser
from pathlib import Path

import pandas as pd

from . import pdftext

logger = logging.getLogger(__name__)

# Headings that open the decision body; everything before them is cover.
MAIN_TEXT_MARKERS = (
    "reasons for decision",
    "reasons and decision",
    "decision and reasons",
    "reasons for judgment",
    "introduction",
)

# Tokens after which a period never ends a sentence (legal citations).
GUARD_ABBREVIATIONS = ("v.", "no.", "s.", "inc.", "ss.")

_BLOCK_TAGS = {"p", "h1", "h2", "h3", "h4", "h5", "h6", "li", "blockquote"}
_HEADING_TAGS = {"h1", "h2", "h3", "h4"}
_SKIP_TAGS = {"script", "style"}


@dataclass
class CaseCoverText:
    case_id: str
    text: str


@dataclass
class MainTextSentence:
    case_id: str
    sentence_index: int
    text: str


class ParseError(Exception):
    """Raised when a document payload cannot be converted to text."""


def clean_text(raw: str) -> str:
    """Lowercase and collapse all whitespace runs to single spaces."""
    return re.sub(r"\s+", " ", raw).strip().lower()


_SPACED_LETTERS_RE = re.compile(r"(?<![^\s])[^\W\d_](?: [^\W\d_]){2,}(?![^\s])")


def repair_pdf_spacing(text: str) -> str:
    """Undo the extractor artifact of spaces between letters of one word.

    A run of three or more single-letter tokens separated by single spaces is
    joined; genuine word gaps in the artifact appear as double spaces and are
    left alone.
    """
    return _SPACED_LETTERS_RE.sub(lambda m: m.group(0).replace(" ", ""), text)


class _BlockCollector(HTMLParser):
    """Flatten an HTML document into ordered (tag, text) blocks."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.blocks: list[tuple[str, str]] = []
        self._stack: list[str] = []
        self._buffer: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
            return
        if tag in _BLOCK_TAGS:
            self._flush()
            self._stack.append(tag)

    def handle_endtag(self, tag):
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
            return
        if tag in _BLOCK_TAGS and self._stack:
            self._flush()
            self._stack.pop()

    def handle_data(self, data):
        if self._skip_depth == 0 and self._stack:
            self._buffer.append(data)

    def _flush(self):
        if self._buffer and self._stack:
            text = " ".join("".join(self._buffer).split())
            if text:
                self.blocks.append((self._stack[-1], text))
        self._buffer = []

    def close(self):
        self._flush()
        super().close()


def html_blocks(payload: bytes | str) -> list[tuple[str, str]]:
    """Ordered paragraph-level (tag, text) blocks of an HTML payload."""
    if isinstance(payload, bytes):
        payload = payload.decode("utf-8", errors="replace")
    collector = _BlockCollector()
    collector.feed(payload)
    collector.close()
    return collector.blocks


def _marker_index(blocks: list[tuple[str, str]]) -> int | None:
    for i, (tag, text) in enumerate(blocks):
        if tag in _HEADING_TAGS:
            lowered = text.strip().lower()
            if any(lowered.startswith(marker) for marker in MAIN_TEXT_MARKERS):
                return i
    return None


def extract_cover(doc) -> CaseCoverText:
    """Cleaned plain text of the document's first page."""
    if doc.pdf_payload:
        try:
            raw = pdftext.first_page_text(doc.pdf_payload)
        except pdftext.PdfError as exc:
            raise ParseError(f"{doc.case_id}: unreadable PDF: {exc}") from exc
        return CaseCoverText(doc.case_id, clean_text(raw))
    if doc.html_payload:
        logger.warning("%s: no PDF payload, extracting cover from HTML", doc.case_id)
        blocks = html_blocks(doc.html_payload)
        cut = _marker_index(blocks)
        head = blocks if cut is None else blocks[:cut]
        return CaseCoverText(doc.case_id, clean_text(" ".join(t for _, t in head)))
    raise ParseError(f"{doc.case_id}: no payload to extract a cover from")


def extract_main_text(doc) -> str:
    """Cleaned full-body text with the cover region removed."""
    if doc.html_payload:
        blocks = html_blocks(doc.html_payload)
        cut = _marker_index(blocks)
        if cut is None:
            logger.warning("%s: no main-text marker in HTML, keeping all blocks", doc.case_id)
            cut = 0
        return clean_text(" ".join(text for _, text in blocks[cut:]))
    if doc.pdf_payload:
        logger.warning("%s: no HTML payload, extracting main text from PDF", doc.case_id)
        try:
            pages = pdftext.page_texts(doc.pdf_payload)
        except pdftext.PdfError as exc:
            raise ParseError(f"{doc.case_id}: unreadable PDF: {exc}") from exc
        body = "\n".join(pages[1:])
        return clean_text(repair_pdf_spacing(body))
    raise ParseError(f"{doc.case_id}: no payload to extract main text from")


_BOUNDARY_RE = re.compile(r"[.!?]+(?=\s|$)")
_ABBREV_SHAPE_RE = re.compile(r"^(?:[^\W\d_]\.)+$")


def _token_before(text: str, end: int) -> str:
    start = end
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:end]


def _token_after(text: str, start: int) -> str:
    while start < len(text) and text[start].isspace():
        start += 1
    end = start
    while end < len(text) and not text[end].isspace():
        end += 1
    return text[start:end]


def segment_sentences(
    text: str,
    case_id: str = "",
    guard_abbreviations: tuple[str, ...] = GUARD_ABBREVIATIONS,
) -> list[MainTextSentence]:
    """Split cleaned text into sentences without breaking legal citations.

    A period does not end the sentence when the token carrying it is a guarded
    abbreviation ("v.", "no.", ...), when the token is abbreviation-shaped
    ("j.", "f.c.j."), or when the next token is the case-name connector "v.".
    """
    guard = {g.lower() for g in guard_abbreviations}
    sentences: list[MainTextSentence] = []
    start = 0

    def push(chunk: str) -> None:
        chunk = chunk.strip()
        if chunk:
            sentences.append(MainTextSentence(case_id, len(sentences), chunk))

    for match in _BOUNDARY_RE.finditer(text):
        end = match.end()
        punct = match.group(0)
        if "." in punct and "!" not in punct and "?" not in punct:
            prev_tok = _token_before(text, end).lower()
            next_tok = _token_after(text, end).lower()
            if prev_tok in guard or _ABBREV_SHAPE_RE.fullmatch(prev_tok):
                continue
            if next_tok in ("v.", "v"):
                continue
        push(text[start:end])
        start = end
    push(text[start:])
    return sentences


def preprocess_document(doc) -> tuple[CaseCoverText, list[MainTextSentence]]:
    cover = extract_cover(doc)
    sentences = segment_sentences(extract_main_text(doc), doc.case_id)
    return cover, sentences


def emit_tables(
    covers: list[CaseCoverText],
    sentences: list[MainTextSentence],
    out_dir: str | Path,
) -> tuple[Path, Path]:
    """Write covers.csv and sentences.csv, RFC-4180 quoted, UTF-8."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cover_df = pd.DataFrame(
        [(c.case_id, c.text) for c in covers], columns=["case_id", "text"]
    ).sort_values("case_id", kind="stable")
    sent_df = pd.DataFrame(
        [(s.case_id, s.sentence_index, s.text) for s in sentences],
        columns=["case_id", "sentence_index", "text"],
    ).sort_values(["case_id", "sentence_index"], kind="stable")
    cover_path = out / "covers.csv"
    sent_path = out / "sentences.csv"
    cover_df.to_csv(cover_path, index=False, encoding="utf-8")
    sent_df.to_csv(sent_path, index=False, encoding="utf-8")
    return cover_path, sent_path


def read_tables(table_dir: str | Path) -> tuple[list[CaseCoverText], list[MainTextSentence]]:
    """Reload emit_tables output into the in-memory row types."""
    table_dir = Path(table_dir)
    cover_df = pd.read_csv(table_dir / "covers.csv", dtype=str, keep_default_na=False)
    sent_df = pd.read_csv(
        table_dir / "sentences.csv",
        dtype={"case_id": str, "text": str},
        keep_default_na=False,
    )
    covers = [CaseCoverText(r.case_id, r.text) for r in cover_df.itertuples()]
    sentences = [
        MainTextSentence(r.case_id, int(r.sentence_index), r.text)
        for r in sent_df.itertuples()
    ]
    return covers, sentences
