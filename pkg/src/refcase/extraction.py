"""Apply trained models to a preprocessed corpus and emit the structured
case database: one row per case, one column per label slot."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .dataset import Span
from .labels import SLOTS, slot_for
from .models.train import TrainedModel

logger = logging.getLogger(__name__)

DETERMINATION_LIMIT = 3
CSV_NAME = "cases.csv"
JSONL_NAME = "cases.jsonl"


@dataclass
class StructuredCaseRecord:
    case_id: str
    decision_date: str = ""
    fields: dict[str, list[str]] = field(default_factory=dict)
    flags: list[dict] = field(default_factory=list)
    cover: dict | None = None
    sentences: list[dict] = field(default_factory=list)

    def __post_init__(self):
        for slot in SLOTS:
            self.fields.setdefault(slot, [])

    def to_json(self) -> dict:
        return {
            "case_id": self.case_id,
            "decision_date": self.decision_date,
            "fields": {slot: list(self.fields[slot]) for slot in SLOTS},
            "flags": self.flags,
            "cover": self.cover,
            "sentences": self.sentences,
        }

    @classmethod
    def from_json(cls, data: dict) -> "StructuredCaseRecord":
        return cls(
            case_id=data["case_id"],
            decision_date=data.get("decision_date", ""),
            fields={slot: list(v) for slot, v in data.get("fields", {}).items()},
            flags=list(data.get("flags", [])),
            cover=data.get("cover"),
            sentences=list(data.get("sentences", [])),
        )


def _require_group(model: TrainedModel, group: str) -> None:
    if model.config.label_group != group:
        raise ValueError(
            f"expected a {group!r} model, got {model.config.label_group!r}"
        )


def _span_dicts(spans: list[Span]) -> list[dict]:
    return [
        {"start": s.start, "end": s.end, "label": s.label}
        for s in sorted(Span(*s) for s in spans)
    ]


def extract_case(
    case_id: str,
    cover_text: str | None,
    sentences: list[tuple[int, str]],
    cover_model: TrainedModel,
    traditional_model: TrainedModel,
    new_label_model: TrainedModel,
    decision_date: str = "",
) -> StructuredCaseRecord:
    """Run all three models over one case and aggregate surface strings.

    The traditional and new label groups are disjoint, so their span lists
    merge without label conflicts.
    """
    _require_group(cover_model, "cover")
    _require_group(traditional_model, "traditional")
    _require_group(new_label_model, "new")
    record = StructuredCaseRecord(case_id=case_id, decision_date=decision_date)

    def collect(text: str, spans: list[Span], part: str) -> None:
        for span in spans:
            slot = slot_for(span.label, part)
            surface = text[span.start : span.end]
            if surface not in record.fields[slot]:
                record.fields[slot].append(surface)

    if cover_text:
        cover_spans = cover_model.predict(cover_text)
        collect(cover_text, cover_spans, "cover")
        record.cover = {"text": cover_text, "spans": _span_dicts(cover_spans)}
    for index, text in sorted(sentences):
        spans = sorted(
            list(traditional_model.predict(text)) + list(new_label_model.predict(text))
        )
        collect(text, spans, "main")
        record.sentences.append(
            {"index": index, "text": text, "spans": _span_dicts(spans)}
        )
    determinations = len(record.fields[slot_for("DETERMINATION", "main")])
    if determinations > DETERMINATION_LIMIT:
        record.flags.append(
            {
                "slot": slot_for("DETERMINATION", "main"),
                "count": determinations,
                "limit": DETERMINATION_LIMIT,
            }
        )
    return record


def _escape_cell(items: list[str]) -> str:
    # Backslash must be escaped first or an item ending in "\" eats the
    # separator that follows it.
    return "|".join(
        item.replace("\\", "\\\\").replace("|", "\\|") for item in items
    )


def unescape_cell(cell: str) -> list[str]:
    if not cell:
        return []
    items, current, i = [], [], 0
    while i < len(cell):
        ch = cell[i]
        if ch == "\\" and i + 1 < len(cell) and cell[i + 1] in ("\\", "|"):
            current.append(cell[i + 1])
            i += 2
        elif ch == "|":
            items.append("".join(current))
            current = []
            i += 1
        else:
            current.append(ch)
            i += 1
    items.append("".join(current))
    return items


def write_database(records: list[StructuredCaseRecord], out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ordered = sorted(records, key=lambda r: r.case_id)
    with (out / CSV_NAME).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["case_id", "decision_date", *SLOTS])
        for record in ordered:
            writer.writerow(
                [record.case_id, record.decision_date]
                + [_escape_cell(record.fields[slot]) for slot in SLOTS]
            )
    with (out / JSONL_NAME).open("w", encoding="utf-8", newline="") as handle:
        for record in ordered:
            handle.write(json.dumps(record.to_json(), sort_keys=True, ensure_ascii=False))
            handle.write("\n")
    return out


def load_database(db_dir) -> list[StructuredCaseRecord]:
    path = Path(db_dir) / JSONL_NAME
    records = []
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(StructuredCaseRecord.from_json(json.loads(line)))
    return records


def build_database(
    covers: dict[str, str],
    sentences: dict[str, list[tuple[int, str]]],
    dates: dict[str, str],
    cover_model: TrainedModel,
    traditional_model: TrainedModel,
    new_label_model: TrainedModel,
    out_dir,
    resume: bool = True,
) -> list[StructuredCaseRecord]:
    """Extract every case and write cases.csv plus the lossless cases.jsonl.

    Deterministic: cases process in sorted order and the outputs are
    byte-identical across runs on unchanged inputs. With resume=True,
    case_ids already present in an existing database are not re-extracted.
    """
    out = Path(out_dir)
    existing: dict[str, StructuredCaseRecord] = {}
    if resume and (out / JSONL_NAME).exists():
        existing = {r.case_id: r for r in load_database(out)}
        logger.info("resuming: %d cases already extracted", len(existing))
    case_ids = sorted(set(covers) | set(sentences))
    records = []
    for case_id in case_ids:
        if case_id in existing:
            records.append(existing[case_id])
            continue
        records.append(
            extract_case(
                case_id,
                covers.get(case_id),
                sentences.get(case_id, []),
                cover_model,
                traditional_model,
                new_label_model,
                decision_date=dates.get(case_id, ""),
            )
        )
    write_database(records, out)
    logger.info("wrote %d case records to %s", len(records), out)
    return records
