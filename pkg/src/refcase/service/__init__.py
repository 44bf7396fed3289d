"""HTTP search service over the structured case database."""

from .app import create_app, parse_filter
from .index import CaseIndex, QueryError
from .schemas import FilterClause, SearchFilter

__all__ = [
    "CaseIndex",
    "FilterClause",
    "QueryError",
    "SearchFilter",
    "create_app",
    "parse_filter",
]
