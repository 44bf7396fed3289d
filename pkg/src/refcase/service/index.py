"""In-memory case index with conjunctive faceted filtering."""

from __future__ import annotations

from dataclasses import dataclass

from ..extraction import StructuredCaseRecord, load_database
from ..labels import SLOTS
from .schemas import FACET_VALUE_LIMIT, MATCH_MODES, SearchFilter


class QueryError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


@dataclass
class QueryResult:
    total: int
    records: list[StructuredCaseRecord]


def _clause_matches(record: StructuredCaseRecord, slot: str, mode: str, value: str) -> bool:
    needle = value.lower()
    items = record.fields.get(slot, [])
    if mode == "exact":
        return any(item.lower() == needle for item in items)
    return any(needle in item.lower() for item in items)


class CaseIndex:
    """Immutable snapshot of the structured case database."""

    def __init__(self, records: list[StructuredCaseRecord]):
        # Newest decisions first; ties break on ascending case_id.
        by_id = sorted(records, key=lambda r: r.case_id)
        self.records = sorted(by_id, key=lambda r: r.decision_date, reverse=True)
        self.by_id = {r.case_id: r for r in self.records}

    @classmethod
    def load(cls, db_dir) -> "CaseIndex":
        return cls(load_database(db_dir))

    def __len__(self) -> int:
        return len(self.records)

    def validate_filter(self, search: SearchFilter) -> None:
        for clause in search.clauses:
            if clause.slot not in SLOTS:
                raise QueryError("invalid_label", f"unknown label slot {clause.slot!r}")
            if clause.mode not in MATCH_MODES:
                raise QueryError(
                    "invalid_mode",
                    f"unknown match mode {clause.mode!r}; expected one of {MATCH_MODES}",
                )
        if search.page < 1:
            raise QueryError("invalid_page", "page must be >= 1")
        if not 1 <= search.page_size <= 100:
            raise QueryError("invalid_page", "page_size must be between 1 and 100")
        for name, value in (("from", search.date_from), ("to", search.date_to)):
            if value is not None and not _iso_date(value):
                raise QueryError(
                    "invalid_date", f"{name} must be a YYYY-MM-DD date, got {value!r}"
                )

    def query(self, search: SearchFilter) -> QueryResult:
        self.validate_filter(search)
        matched = [r for r in self.records if self._matches(r, search)]
        start = (search.page - 1) * search.page_size
        return QueryResult(
            total=len(matched), records=matched[start : start + search.page_size]
        )

    def _matches(self, record: StructuredCaseRecord, search: SearchFilter) -> bool:
        if search.date_from and (
            not record.decision_date or record.decision_date < search.date_from
        ):
            return False
        if search.date_to and (
            not record.decision_date or record.decision_date > search.date_to
        ):
            return False
        return all(
            _clause_matches(record, c.slot, c.mode, c.value) for c in search.clauses
        )

    def get(self, case_id: str) -> StructuredCaseRecord | None:
        return self.by_id.get(case_id)

    def stats(self) -> list[dict]:
        rows = []
        for slot in SLOTS:
            with_extraction = 0
            total = 0
            values: set[str] = set()
            for record in self.records:
                items = record.fields.get(slot, [])
                if items:
                    with_extraction += 1
                    total += len(items)
                    values.update(items)
            rows.append(
                {
                    "slot": slot,
                    "cases_with_extraction": with_extraction,
                    "total_extractions": total,
                    "values": (
                        sorted(values)
                        if 0 < len(values) <= FACET_VALUE_LIMIT
                        else None
                    ),
                }
            )
        return rows


def _iso_date(value: str) -> bool:
    import datetime

    try:
        datetime.date.fromisoformat(value)
    except ValueError:
        return False
    return True
