"""Minimal text extraction from simple PDF files.

Supports the subset of PDF used by the bundled sample documents: classic
(non-object-stream) files, FlateDecode / ASCII85Decode content streams, and
plain Tj/TJ text operators with WinAnsi-encoded strings. Page boundaries are
preserved so callers can address the cover page separately from the body.
"""

from __future__ import annotations

import base64
import re
import zlib
from dataclasses import dataclass


class PdfError(Exception):
    """Raised when a PDF cannot be parsed by this extractor."""


_WHITESPACE = b"\x00\t\n\x0c\r "
_DELIMS = b"()<>[]{}/%"

_OBJ_RE = re.compile(rb"(\d+)\s+(\d+)\s+obj\b")


@dataclass
class _Ref:
    num: int


@dataclass
class _StreamObj:
    meta: dict
    raw: bytes


class _Lexer:
    """Cursor over raw PDF bytes with a recursive object parser."""

    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def skip_ws(self) -> None:
        data = self.data
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c in (b"%",):
                nl = data.find(b"\n", self.pos)
                self.pos = len(data) if nl < 0 else nl + 1
            elif c and c in _WHITESPACE:
                self.pos += 1
            else:
                break

    def peek(self, n: int = 1) -> bytes:
        return self.data[self.pos : self.pos + n]

    def parse_object(self):
        self.skip_ws()
        c = self.peek()
        if not c:
            raise PdfError("unexpected end of data")
        if self.peek(2) == b"<<":
            return self._parse_dict()
        if c == b"<":
            return self._parse_hex_string()
        if c == b"(":
            return self._parse_literal_string()
        if c == b"/":
            return self._parse_name()
        if c == b"[":
            return self._parse_array()
        return self._parse_number_or_keyword()

    def _parse_dict(self) -> dict:
        self.pos += 2
        out: dict = {}
        while True:
            self.skip_ws()
            if self.peek(2) == b">>":
                self.pos += 2
                return out
            key = self.parse_object()
            if not isinstance(key, str):
                raise PdfError("dictionary key is not a name")
            out[key] = self.parse_object()

    def _parse_array(self) -> list:
        self.pos += 1
        out = []
        while True:
            self.skip_ws()
            if self.peek() == b"]":
                self.pos += 1
                return out
            out.append(self.parse_object())

    def _parse_name(self) -> str:
        self.pos += 1
        start = self.pos
        data = self.data
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c in _WHITESPACE or c in _DELIMS:
                break
            self.pos += 1
        return data[start : self.pos].decode("latin-1")

    def _parse_hex_string(self) -> bytes:
        end = self.data.find(b">", self.pos)
        if end < 0:
            raise PdfError("unterminated hex string")
        body = re.sub(rb"\s", b"", self.data[self.pos + 1 : end])
        self.pos = end + 1
        if len(body) % 2:
            body += b"0"
        return bytes.fromhex(body.decode("ascii"))

    def _parse_literal_string(self) -> bytes:
        data = self.data
        self.pos += 1
        out = bytearray()
        depth = 1
        while self.pos < len(data):
            c = data[self.pos]
            self.pos += 1
            if c == 0x5C:  # backslash
                if self.pos >= len(data):
                    break
                e = data[self.pos]
                self.pos += 1
                mapping = {0x6E: 10, 0x72: 13, 0x74: 9, 0x62: 8, 0x66: 12}
                if e in mapping:
                    out.append(mapping[e])
                elif e in (0x28, 0x29, 0x5C):
                    out.append(e)
                elif 0x30 <= e <= 0x37:
                    digits = chr(e)
                    while len(digits) < 3 and self.pos < len(data) and 0x30 <= data[self.pos] <= 0x37:
                        digits += chr(data[self.pos])
                        self.pos += 1
                    out.append(int(digits, 8) & 0xFF)
                elif e in (10, 13):
                    pass  # line continuation
                else:
                    out.append(e)
            elif c == 0x28:
                depth += 1
                out.append(c)
            elif c == 0x29:
                depth -= 1
                if depth == 0:
                    return bytes(out)
                out.append(c)
            else:
                out.append(c)
        raise PdfError("unterminated literal string")

    def _parse_number_or_keyword(self):
        data = self.data
        start = self.pos
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c in _WHITESPACE or c in _DELIMS:
                break
            self.pos += 1
        tok = data[start : self.pos]
        if not tok:
            raise PdfError("empty token")
        if tok in (b"true", b"false"):
            return tok == b"true"
        if tok == b"null":
            return None
        try:
            if b"." in tok:
                return float(tok)
            value = int(tok)
        except ValueError:
            return tok.decode("latin-1")
        # "N G R" is an indirect reference; backtrack if it is not.
        save = self.pos
        try:
            self.skip_ws()
            m = re.match(rb"(\d+)\s+R\b", self.data[self.pos :])
        except PdfError:
            m = None
        if m and re.fullmatch(rb"\d+", tok):
            self.pos += m.end()
            return _Ref(value)
        self.pos = save
        return value


def _read_objects(data: bytes) -> dict[int, object]:
    objects: dict[int, object] = {}
    for m in _OBJ_RE.finditer(data):
        num = int(m.group(1))
        lexer = _Lexer(data, m.end())
        try:
            obj = lexer.parse_object()
        except PdfError:
            continue
        lexer.skip_ws()
        if isinstance(obj, dict) and data[lexer.pos : lexer.pos + 6] == b"stream":
            start = lexer.pos + 6
            if data[start : start + 2] == b"\r\n":
                start += 2
            elif data[start : start + 1] in (b"\n", b"\r"):
                start += 1
            objects[num] = _StreamObj(obj, data[start:])
        else:
            objects[num] = obj
    # Second pass: cut each stream to its declared /Length.
    for num, obj in objects.items():
        if isinstance(obj, _StreamObj):
            length = obj.meta.get("Length")
            if isinstance(length, _Ref):
                length = objects.get(length.num)
            if isinstance(length, int):
                obj.raw = obj.raw[:length]
            else:
                end = obj.raw.find(b"endstream")
                if end < 0:
                    raise PdfError(f"stream object {num} has no endstream")
                obj.raw = obj.raw[:end]
    return objects


def _resolve(objects: dict, value):
    while isinstance(value, _Ref):
        value = objects.get(value.num)
    return value


def _decode_stream(objects: dict, stream: _StreamObj) -> bytes:
    filters = _resolve(objects, stream.meta.get("Filter"))
    if filters is None:
        filters = []
    if not isinstance(filters, list):
        filters = [filters]
    data = stream.raw
    for filt in filters:
        if filt == "ASCII85Decode":
            body = data.strip()
            if body.startswith(b"<~"):
                body = body[2:]
            if body.endswith(b"~>"):
                body = body[:-2]
            data = base64.a85decode(body)
        elif filt == "FlateDecode":
            try:
                data = zlib.decompress(data)
            except zlib.error as exc:
                raise PdfError(f"bad Flate stream: {exc}") from exc
        else:
            raise PdfError(f"unsupported stream filter: {filt}")
    return data


def _page_objects(objects: dict) -> list[dict]:
    catalog = None
    for obj in objects.values():
        if isinstance(obj, dict) and obj.get("Type") == "Catalog":
            catalog = obj
            break
    if catalog is None:
        raise PdfError("no document catalog")
    pages: list[dict] = []

    def walk(node) -> None:
        node = _resolve(objects, node)
        if not isinstance(node, dict):
            raise PdfError("malformed page tree")
        if node.get("Type") == "Page":
            pages.append(node)
            return
        for kid in _resolve(objects, node.get("Kids")) or []:
            walk(kid)

    walk(catalog.get("Pages"))
    if not pages:
        raise PdfError("document has no pages")
    return pages


def _decode_text_bytes(raw: bytes) -> str:
    try:
        return raw.decode("cp1252")
    except UnicodeDecodeError:
        return raw.decode("latin-1")


def _content_text(content: bytes) -> str:
    """Replay text-showing operators of one content stream."""
    lexer = _Lexer(content)
    parts: list[str] = []
    operands: list = []

    def newline() -> None:
        if parts and parts[-1] != "\n":
            parts.append("\n")

    while True:
        lexer.skip_ws()
        if lexer.pos >= len(lexer.data):
            break
        c = lexer.peek()
        if c in (b"(", b"<", b"[", b"/") or c.isdigit() or c in (b"+", b"-", b"."):
            operands.append(lexer.parse_object())
            continue
        if c == b"'":
            lexer.pos += 1
            op = "'"
        elif c == b'"':
            lexer.pos += 1
            op = '"'
        else:
            start = lexer.pos
            while lexer.pos < len(lexer.data):
                ch = lexer.data[lexer.pos : lexer.pos + 1]
                if ch in _WHITESPACE or ch in _DELIMS:
                    break
                lexer.pos += 1
            op = lexer.data[start : lexer.pos].decode("latin-1", "replace")
            if not op:
                lexer.pos += 1
                continue
        if op == "Tj" and operands and isinstance(operands[-1], bytes):
            parts.append(_decode_text_bytes(operands[-1]))
        elif op == "TJ" and operands and isinstance(operands[-1], list):
            for item in operands[-1]:
                if isinstance(item, bytes):
                    parts.append(_decode_text_bytes(item))
        elif op in ("'", '"'):
            newline()
            if operands and isinstance(operands[-1], bytes):
                parts.append(_decode_text_bytes(operands[-1]))
        elif op in ("Td", "TD", "T*", "Tm", "BT"):
            newline()
        operands = []
    return "".join(parts)


def page_texts(data: bytes) -> list[str]:
    """Extract raw text per page, in page order."""
    if not data.startswith(b"%PDF"):
        raise PdfError("not a PDF payload")
    objects = _read_objects(data)
    texts = []
    for page in _page_objects(objects):
        contents = _resolve(objects, page.get("Contents"))
        streams = contents if isinstance(contents, list) else [contents]
        chunks = []
        for ref in streams:
            stream = _resolve(objects, ref)
            if isinstance(stream, _StreamObj):
                chunks.append(_content_text(_decode_stream(objects, stream)))
        texts.append("\n".join(chunks))
    return texts


def first_page_text(data: bytes) -> str:
    """Text of page 1 only."""
    return page_texts(data)[0]
