"""Request/response shapes for the search service."""

from __future__ import annotations

from pydantic import BaseModel, Field

MATCH_MODES = ("contains", "exact")
MAX_PAGE_SIZE = 100
DEFAULT_PAGE_SIZE = 20

# Slots whose distinct values are few enough to enumerate for facet dropdowns.
FACET_VALUE_LIMIT = 20


class FilterClause(BaseModel):
    slot: str
    mode: str = "contains"
    value: str


class SearchFilter(BaseModel):
    clauses: list[FilterClause] = Field(default_factory=list)
    date_from: str | None = None
    date_to: str | None = None
    page: int = 1
    page_size: int = DEFAULT_PAGE_SIZE


class LabelInfo(BaseModel):
    slot: str
    part: str
    label: str
    group: str
    infrequent: bool


class LabelsResponse(BaseModel):
    slots: list[LabelInfo]


class CaseSummary(BaseModel):
    case_id: str
    decision_date: str
    fields: dict[str, list[str]]
    flags: list[dict] = Field(default_factory=list)


class CasesResponse(BaseModel):
    total: int
    page: int
    page_size: int
    results: list[CaseSummary]


class CoverView(BaseModel):
    text: str
    spans: list[dict]


class SentenceView(BaseModel):
    index: int
    text: str
    spans: list[dict]


class CaseDetail(BaseModel):
    case_id: str
    decision_date: str
    fields: dict[str, list[str]]
    flags: list[dict]
    cover: CoverView | None = None
    sentences: list[SentenceView] = Field(default_factory=list)


class SlotStats(BaseModel):
    slot: str
    cases_with_extraction: int
    total_extractions: int
    values: list[str] | None = None


class StatsResponse(BaseModel):
    cases: int
    slots: list[SlotStats]


class ErrorBody(BaseModel):
    code: str
    message: str
