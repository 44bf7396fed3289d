"""HTTP search API over the structured case database.

Read-only: every endpoint serves from an immutable in-memory snapshot
loaded at startup. Errors come back as {"code": ..., "message": ...}.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..labels import INFREQUENT_LABELS, SLOTS, group_of, slot_part_label
from .index import CaseIndex, QueryError
from .schemas import (
    CasesResponse,
    CaseDetail,
    CaseSummary,
    DEFAULT_PAGE_SIZE,
    FilterClause,
    LabelInfo,
    LabelsResponse,
    SearchFilter,
    SlotStats,
    StatsResponse,
)

LABEL_PARAM = "label."
MODE_PARAM = "mode."
RESERVED_PARAMS = {"from", "to", "page", "page_size", "mode"}


def parse_filter(params) -> SearchFilter:
    """Build a SearchFilter from raw query parameters.

    Clauses use dynamic names (label.<SLOT>=value), with a global mode
    and optional per-slot overrides (mode.<SLOT>=exact).
    """
    global_mode = params.get("mode", "contains")
    mode_overrides = {}
    clauses = []
    for key, value in params.multi_items():
        if key.startswith(MODE_PARAM):
            mode_overrides[key[len(MODE_PARAM):]] = value
        elif key.startswith(LABEL_PARAM):
            clauses.append((key[len(LABEL_PARAM):], value))
        elif key not in RESERVED_PARAMS:
            raise QueryError("invalid_parameter", f"unknown query parameter {key!r}")

    def integer(name: str, default: int) -> int:
        raw = params.get(name)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise QueryError("invalid_page", f"{name} must be an integer, got {raw!r}")

    return SearchFilter(
        clauses=[
            FilterClause(slot=slot, mode=mode_overrides.get(slot, global_mode), value=value)
            for slot, value in clauses
        ],
        date_from=params.get("from"),
        date_to=params.get("to"),
        page=integer("page", 1),
        page_size=integer("page_size", DEFAULT_PAGE_SIZE),
    )


def create_app(
    db_dir=None,
    index: CaseIndex | None = None,
    frontend_dir=None,
) -> FastAPI:
    if index is None:
        if db_dir is None:
            raise ValueError("create_app needs a database directory or an index")
        index = CaseIndex.load(db_dir)
    app = FastAPI(title="refcase search service")
    app.state.index = index
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET"], allow_headers=["*"]
    )

    @app.exception_handler(QueryError)
    async def query_error(_: Request, exc: QueryError):
        return JSONResponse(status_code=400, content={"code": exc.code, "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def validation_error(_: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"code": "invalid_request", "message": str(exc)}
        )

    @app.get("/labels", response_model=LabelsResponse)
    def labels() -> LabelsResponse:
        rows = []
        for slot in SLOTS:
            part, label = slot_part_label(slot)
            rows.append(
                LabelInfo(
                    slot=slot,
                    part=part,
                    label=label,
                    group=group_of(label, part),
                    infrequent=part == "main" and label in INFREQUENT_LABELS,
                )
            )
        return LabelsResponse(slots=rows)

    @app.get("/cases", response_model=CasesResponse)
    def cases(request: Request) -> CasesResponse:
        search = parse_filter(request.query_params)
        result = index.query(search)
        return CasesResponse(
            total=result.total,
            page=search.page,
            page_size=search.page_size,
            results=[
                CaseSummary(
                    case_id=r.case_id,
                    decision_date=r.decision_date,
                    fields=r.fields,
                    flags=r.flags,
                )
                for r in result.records
            ],
        )

    @app.get("/cases/{case_id}", response_model=CaseDetail)
    def case_detail(case_id: str):
        record = index.get(case_id)
        if record is None:
            return JSONResponse(
                status_code=404,
                content={"code": "not_found", "message": f"no case {case_id!r}"},
            )
        return CaseDetail(**record.to_json())

    @app.get("/stats", response_model=StatsResponse)
    def stats() -> StatsResponse:
        return StatsResponse(
            cases=len(index), slots=[SlotStats(**row) for row in index.stats()]
        )

    if frontend_dir:
        root = Path(frontend_dir)
        if root.is_dir():
            app.mount("/ui", StaticFiles(directory=root, html=True), name="ui")

    return app
