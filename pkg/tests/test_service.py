from __future__ import annotations

import random

import pytest
from fastapi.testclient import TestClient

from refcase.extraction import write_database
from refcase.labels import SLOTS
from refcase.service import CaseIndex, FilterClause, QueryError, SearchFilter, create_app

from .helpers import toy_records


@pytest.fixture(scope="module")
def index():
    return CaseIndex(toy_records())


@pytest.fixture(scope="module")
def client(index):
    return TestClient(create_app(index=index))


def search(clauses=(), **kwargs) -> SearchFilter:
    return SearchFilter(clauses=[FilterClause(**c) for c in clauses], **kwargs)


def test_empty_filter_returns_everything(index):
    result = index.query(search())
    assert result.total == 3
    # newest decision first
    assert [r.case_id for r in result.records] == ["case-c", "case-a", "case-b"]


def test_contains_is_case_insensitive(index):
    result = index.query(search([{"slot": "GPE", "mode": "contains", "value": "toronto"}]))
    assert result.total == 1
    assert result.records[0].case_id == "case-a"


def test_exact_requires_full_value(index):
    contains = index.query(search([{"slot": "ORG", "mode": "contains", "value": "federal"}]))
    exact_partial = index.query(search([{"slot": "ORG", "mode": "exact", "value": "federal"}]))
    exact_full = index.query(search([{"slot": "ORG", "mode": "exact", "value": "federal court"}]))
    assert contains.total == 1
    assert exact_partial.total == 0
    assert exact_full.total == 1


def test_clauses_are_conjunctive(index):
    both = index.query(
        search(
            [
                {"slot": "GPE", "mode": "contains", "value": "toronto"},
                {"slot": "DOC_EVIDENCE", "mode": "contains", "value": "passport"},
            ]
        )
    )
    disjoint = index.query(
        search(
            [
                {"slot": "GPE", "mode": "contains", "value": "toronto"},
                {"slot": "LAW", "mode": "contains", "value": "section"},
            ]
        )
    )
    assert both.total == 1
    assert disjoint.total == 0


def test_date_range_filters(index):
    result = index.query(search(date_from="2000-01-01", date_to="2005-12-31"))
    assert {r.case_id for r in result.records} == {"case-a"}
    lower_only = index.query(search(date_from="2000-01-01"))
    assert {r.case_id for r in lower_only.records} == {"case-a", "case-c"}


def test_pagination(index):
    page1 = index.query(search(page=1, page_size=2))
    page2 = index.query(search(page=2, page_size=2))
    assert page1.total == page2.total == 3
    assert len(page1.records) == 2 and len(page2.records) == 1
    ids = [r.case_id for r in page1.records + page2.records]
    assert ids == ["case-c", "case-a", "case-b"]


def test_filter_validation_errors(index):
    with pytest.raises(QueryError) as err:
        index.query(search([{"slot": "NOT_A_SLOT", "mode": "contains", "value": "x"}]))
    assert err.value.code == "invalid_label"
    with pytest.raises(QueryError) as err:
        index.query(search([{"slot": "GPE", "mode": "fuzzy", "value": "x"}]))
    assert err.value.code == "invalid_mode"
    with pytest.raises(QueryError) as err:
        index.query(search(page=0))
    assert err.value.code == "invalid_page"
    with pytest.raises(QueryError) as err:
        index.query(search(date_from="03/05/2004"))
    assert err.value.code == "invalid_date"


def test_adding_clauses_never_grows_results(index):
    rng = random.Random(99)
    values = ["toronto", "iran", "passport", "section", "order", "court", "colombo", "zzz"]
    slots = ["GPE", "DOC_EVIDENCE", "LAW", "ORG", "PROCEDURE", "COVER_GPE"]
    for _ in range(100):
        base_clauses = [
            {"slot": rng.choice(slots), "mode": "contains", "value": rng.choice(values)}
            for _ in range(rng.randint(0, 2))
        ]
        extra = {"slot": rng.choice(slots), "mode": "contains", "value": rng.choice(values)}
        base_total = index.query(search(base_clauses, page_size=100)).total
        narrowed_total = index.query(search(base_clauses + [extra], page_size=100)).total
        assert narrowed_total <= base_total


def test_index_loads_from_database_dir(tmp_path):
    write_database(toy_records(), tmp_path / "db")
    loaded = CaseIndex.load(tmp_path / "db")
    assert len(loaded) == 3
    assert loaded.query(search()).total == 3


def test_stats_facets(index):
    rows = {row["slot"]: row for row in index.stats()}
    assert set(rows) == set(SLOTS)
    gpe = rows["GPE"]
    assert gpe["cases_with_extraction"] == 2
    assert gpe["total_extractions"] == 3
    assert sorted(gpe["values"]) == ["Colombo", "Iran", "Toronto"]


def test_http_labels_endpoint(client):
    payload = client.get("/labels").json()
    assert len(payload["slots"]) == 19
    by_slot = {row["slot"]: row for row in payload["slots"]}
    assert by_slot["COVER_DATE"]["part"] == "cover"
    assert by_slot["COVER_DATE"]["group"] == "cover"
    assert by_slot["CLAIMANT_INFO"]["group"] == "new"
    assert by_slot["LAW_REPORT"]["infrequent"] is True
    assert by_slot["COVER_PERSON"]["infrequent"] is False


def test_http_cases_empty_filter(client):
    payload = client.get("/cases").json()
    assert payload["total"] == 3
    assert payload["page"] == 1
    assert [r["case_id"] for r in payload["results"]] == ["case-c", "case-a", "case-b"]


def test_http_cases_with_filters(client):
    payload = client.get("/cases", params={"label.GPE": "toronto"}).json()
    assert payload["total"] == 1
    payload = client.get(
        "/cases", params={"label.ORG": "federal court", "mode": "exact"}
    ).json()
    assert payload["total"] == 1
    payload = client.get(
        "/cases",
        params={"label.GPE": "toronto", "label.LAW": "section"},
    ).json()
    assert payload["total"] == 0


def test_http_cases_per_slot_mode_override(client):
    payload = client.get(
        "/cases",
        params={"label.ORG": "federal", "mode.ORG": "exact"},
    ).json()
    assert payload["total"] == 0


def test_http_cases_date_window(client):
    payload = client.get("/cases", params={"from": "2000-01-01", "to": "2005-12-31"}).json()
    assert [r["case_id"] for r in payload["results"]] == ["case-a"]


def test_http_error_codes(client):
    bad_label = client.get("/cases", params={"label.WRONG": "x"})
    assert bad_label.status_code == 400
    assert bad_label.json()["code"] == "invalid_label"

    bad_param = client.get("/cases", params={"bogus": "x"})
    assert bad_param.status_code == 400
    assert bad_param.json()["code"] == "invalid_parameter"

    bad_page = client.get("/cases", params={"page": "zero"})
    assert bad_page.status_code == 400
    assert bad_page.json()["code"] == "invalid_page"

    oversized = client.get("/cases", params={"page_size": "5000"})
    assert oversized.status_code == 400
    assert oversized.json()["code"] == "invalid_page"


def test_http_case_detail_and_404(client):
    found = client.get("/cases/case-a")
    assert found.status_code == 200
    body = found.json()
    assert body["case_id"] == "case-a"
    assert body["sentences"][0]["spans"][0]["label"] == "GPE"

    missing = client.get("/cases/nope")
    assert missing.status_code == 404
    assert missing.json()["code"] == "not_found"


def test_http_stats(client):
    payload = client.get("/stats").json()
    assert payload["cases"] == 3
    slots = {row["slot"]: row for row in payload["slots"]}
    assert slots["GPE"]["total_extractions"] == 3


def test_http_totals_stable_across_pagination(client):
    full = client.get("/cases", params={"page_size": "100"}).json()
    paged = client.get("/cases", params={"page_size": "1", "page": "3"}).json()
    assert full["total"] == paged["total"] == 3
    assert len(paged["results"]) == 1


def test_create_app_requires_source():
    with pytest.raises(ValueError):
        create_app()
