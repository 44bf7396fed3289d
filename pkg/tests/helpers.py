"""Shared fixtures-in-code: injectable phrases and a hand-built toy database."""

from __future__ import annotations

from refcase.extraction import StructuredCaseRecord
from refcase.synthetic import COVER_INJECTIONS, TRADITIONAL_INJECTIONS, InjectedPhrase

Inject = InjectedPhrase
COVER_PATTERNS = list(COVER_INJECTIONS)
TRADITIONAL_PATTERNS = list(TRADITIONAL_INJECTIONS)


def toy_records() -> list[StructuredCaseRecord]:
    """Three cases; exactly one has a GPE value containing "toronto"."""
    a = StructuredCaseRecord(case_id="case-a", decision_date="2004-03-05")
    a.fields["GPE"] = ["Toronto", "Iran"]
    a.fields["CLAIMANT_INFO"] = ["citizen of iran"]
    a.fields["DOC_EVIDENCE"] = ["passport", "medical record"]
    a.fields["COVER_GPE"] = ["toronto, ontario"]
    a.sentences = [
        {
            "index": 0,
            "text": "the claimant arrived in toronto with a passport",
            "spans": [{"start": 24, "end": 31, "label": "GPE"}],
        }
    ]

    b = StructuredCaseRecord(case_id="case-b", decision_date="1999-01-12")
    b.fields["GPE"] = ["Colombo"]
    b.fields["DETERMINATION"] = ["the appeal is dismissed"]
    b.fields["LAW"] = ["section 96"]

    c = StructuredCaseRecord(case_id="case-c", decision_date="2010-07-01")
    c.fields["ORG"] = ["Federal Court"]
    c.fields["PROCEDURE"] = ["removal order"]
    return [a, b, c]
