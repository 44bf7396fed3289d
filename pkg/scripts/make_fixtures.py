#!/usr/bin/env python3
"""Regenerate all bundled data fixtures.

Writes:
  src/refcase/data/fixture/        catalog.json + 24 sample documents
  src/refcase/data/toy_embeddings.tsv
  src/refcase/data/seeds.json
  src/refcase/data/stoplist.txt
  src/refcase/data/patterns.jsonl
  src/refcase/data/experiments.json
  src/refcase/data/training_defaults.json
  tests/data/golden/{covers.csv,sentences.csv}

Deterministic: rerunning produces identical bytes.
"""

from __future__ import annotations

import io
import json
import math
import sys
from datetime import date
from pathlib import Path

import numpy as np
from reportlab.lib.pagesizes import letter
from reportlab.pdfgen import canvas

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from refcase import parsing, terminology  # noqa: E402
from refcase.fixture_server import FixtureCatalog, FixtureStub, write_catalog  # noqa: E402
from refcase.retrieval import CaseDocument, slugify  # noqa: E402

DATA = ROOT / "src" / "refcase" / "data"
GOLDEN = ROOT / "tests" / "data" / "golden"

PAGE_WIDTH, PAGE_HEIGHT = letter
MARGIN = 72
LEADING = 14
WRAP = 92


# ---------------------------------------------------------------- documents

def _wrap(text: str, width: int = WRAP) -> list[str]:
    lines, current = [], ""
    for word in text.split():
        candidate = f"{current} {word}".strip()
        if len(candidate) > width and current:
            lines.append(current)
            current = word
        else:
            current = candidate
    if current:
        lines.append(current)
    return lines


def make_pdf(cover_lines: list[str], body_paragraphs: list[str]) -> bytes:
    buffer = io.BytesIO()
    pdf = canvas.Canvas(buffer, pagesize=letter, invariant=1)
    pdf.setFont("Helvetica", 11)
    y = PAGE_HEIGHT - MARGIN
    for line in cover_lines:
        pdf.drawString(MARGIN, y, line)
        y -= LEADING
    pdf.showPage()
    pdf.setFont("Helvetica", 11)
    y = PAGE_HEIGHT - MARGIN
    for paragraph in body_paragraphs:
        for line in _wrap(paragraph):
            if y < MARGIN:
                pdf.showPage()
                pdf.setFont("Helvetica", 11)
                y = PAGE_HEIGHT - MARGIN
            pdf.drawString(MARGIN, y, line)
            y -= LEADING
        y -= LEADING // 2
    pdf.showPage()
    pdf.save()
    return buffer.getvalue()


def make_html(citation: str, cover_lines: list[str], body_paragraphs: list[str]) -> bytes:
    cover = "\n".join(f"<p>{line}</p>" for line in cover_lines)
    body = "\n".join(f"<p>{p}</p>" for p in body_paragraphs)
    page = (
        "<html>\n<head>\n<meta charset=\"utf-8\">\n"
        f"<title>{citation}</title>\n</head>\n<body>\n"
        f"{cover}\n<h2>REASONS FOR DECISION</h2>\n{body}\n</body>\n</html>\n"
    )
    return page.encode("utf-8")


def cover_lines(file_no, city, heard, decided, panel, counsel) -> list[str]:
    return [
        "Immigration and Refugee Board of Canada",
        "Refugee Protection Division",
        f"RPD File No. {file_no}",
        f"Heard at: {city}",
        f"Date of hearing: {heard}",
        f"Date of decision: {decided}",
        f"Panel: {panel}",
        f"Counsel for the claimant: {counsel}",
    ]


RICH_DOCS = [
    {
        "citation": "2004 CanLII 10001 (CA IRB)",
        "date": date(2004, 3, 5),
        "keywords": ["refugee protection", "credibility"],
        "cover": cover_lines(
            "TA3-10001", "Toronto, Ontario", "March 2, 2004", "March 5, 2004",
            "J. Smith", "M. Jones",
        ),
        "body": [
            "These are the reasons for the decision in the claim of a citizen of Iran "
            "who seeks refugee protection.",
            "The claimant fled after he was arrested in Tehran. He arrived in Toronto "
            "in June 2003.",
            "He provided a passport and a medical record as documentary evidence.",
            "The panel noted several inconsistencies in the testimony about the "
            "removal order.",
            "Counsel cited Xxx v. Minister of Citizenship and Immigration, 1994 in "
            "support of the claim.",
            "Pursuant to section 96 of the Immigration and Refugee Protection Act, "
            "the panel determines that the claimant is a Convention refugee. The "
            "claim is accepted.",
        ],
    },
    {
        "citation": "2004 CanLII 10002 (CA IRB)",
        "date": date(2004, 3, 12),
        "keywords": ["state protection", "political opinion"],
        "cover": cover_lines(
            "MA3-10002", "Montréal, Quebec", "March 9, 2004", "March 12, 2004",
            "P. Tremblay", "A. Gagnon",
        ),
        "body": [
            "The claimant is a citizen of Nigeria and fears persecution by reason of "
            "her political opinion.",
            "She filed an amnesty international report and a birth certificate.",
            "The panel found her testimony credible and consistent with the "
            "documentary evidence.",
            "However, she did not rebut the presumption of state protection. The "
            "panel relied on the reasons in file no. IMM-1234-94 in reaching this "
            "conclusion.",
            "The appeal is dismissed.",
        ],
    },
    {
        "citation": "2004 CanLII 10003 (CA IRB)",
        "date": date(2004, 3, 19),
        "keywords": ["exclusion", "identity documents"],
        "cover": cover_lines(
            "VA3-10003", "Vancouver, British Columbia", "March 16, 2004",
            "March 19, 2004", "R. Lee", "S. Patel",
        ),
        "body": [
            "The claimant, a citizen of Sri Lanka, claims a fear of persecution at "
            "the hands of the army.",
            "He relied on s. 97 of the Act.",
            "The documents include a travel document and an identity card issued in "
            "Colombo.",
            "The minister intervened on the question of exclusion under article 1F "
            "of the Convention.",
            "For the foregoing reasons, the removal order is set aside and the "
            "appeal is allowed.",
        ],
    },
]

FILLER_CITIES = [
    "Toronto, Ontario", "Calgary, Alberta", "Ottawa, Ontario",
    "Winnipeg, Manitoba", "Halifax, Nova Scotia",
]
FILLER_COUNTRIES = ["Albania", "Colombia", "Hungary", "India", "Mexico", "Peru"]
FILLER_PANELS = ["D. Brown", "K. Wong", "L. Garcia", "T. Nguyen"]
FILLER_KEYWORDS = [
    ["credibility"], ["refugee protection", "exclusion"], ["identity"],
    ["state protection"], ["political opinion", "credibility"],
]


def filler_doc(number: int, decided: date) -> dict:
    city = FILLER_CITIES[number % len(FILLER_CITIES)]
    country = FILLER_COUNTRIES[number % len(FILLER_COUNTRIES)]
    panel = FILLER_PANELS[number % len(FILLER_PANELS)]
    heard = date(decided.year, decided.month, max(1, decided.day - 3))
    citation = f"2004 CanLII {10000 + number} (CA IRB)"
    return {
        "citation": citation,
        "date": decided,
        "keywords": FILLER_KEYWORDS[number % len(FILLER_KEYWORDS)],
        "cover": cover_lines(
            f"XA3-{10000 + number}", city,
            heard.strftime("%B %-d, %Y"), decided.strftime("%B %-d, %Y"),
            panel, "B. Chan",
        ),
        "body": [
            f"The claimant is a citizen of {country} who arrived in Canada and "
            "claimed refugee protection on arrival.",
            "The panel considered the oral testimony and the documentary evidence "
            "filed by counsel.",
            "The determinative issue in this claim is credibility.",
            "Having weighed the evidence, the panel renders its decision below.",
        ],
    }


def build_stub(doc: dict) -> FixtureStub:
    pdf = make_pdf(doc["cover"], doc["body"])
    html = make_html(doc["citation"], doc["cover"], doc["body"])
    return FixtureStub(
        citation=doc["citation"],
        decision_date=doc["date"],
        keywords=doc["keywords"],
        pdf=pdf,
        html=html,
    )


def build_fixture_corpus() -> None:
    march_days = [2, 4, 8, 9, 10, 11, 15, 16, 17, 18, 22, 23, 24, 25, 26, 29, 30]
    docs = list(RICH_DOCS)
    for i, day in enumerate(march_days):
        docs.append(filler_doc(4 + i, date(2004, 3, day)))
    assert len(docs) == 20, len(docs)
    april_docs = [filler_doc(21 + i, date(2004, 4, day)) for i, day in enumerate([2, 8, 15, 26])]
    stubs = [build_stub(d) for d in docs + april_docs]
    # One citation appears in both months: the harvester must de-duplicate it.
    duplicate = next(s for s in stubs if s.citation == "2004 CanLII 10020 (CA IRB)")
    stubs.append(
        FixtureStub(
            citation=duplicate.citation,
            decision_date=date(2004, 4, 5),
            keywords=duplicate.keywords,
            pdf=duplicate.pdf,
            html=duplicate.html,
        )
    )
    assert len(stubs) == 25
    assert len({s.citation for s in stubs}) == 24
    march = [s for s in stubs if s.decision_date.month == 3]
    april = [s for s in stubs if s.decision_date.month == 4]
    assert len(march) == 20 and len(april) == 5
    catalog = FixtureCatalog(collection_id="cisr", page_size=10, stubs=stubs)
    write_catalog(catalog, DATA / "fixture")
    print(f"fixture corpus: {len(stubs)} stubs, {len({s.citation for s in stubs})} unique")


# ------------------------------------------------------------- golden files

def build_goldens() -> None:
    covers, sentences = [], []
    for doc in RICH_DOCS:
        case = CaseDocument(
            case_id=slugify(doc["citation"]),
            decision_date=doc["date"],
            pdf_payload=make_pdf(doc["cover"], doc["body"]),
            html_payload=make_html(doc["citation"], doc["cover"], doc["body"]),
            source_keywords=doc["keywords"],
        )
        cover, doc_sentences = parsing.preprocess_document(case)
        covers.append(cover)
        sentences.extend(doc_sentences)
    GOLDEN.mkdir(parents=True, exist_ok=True)
    parsing.emit_tables(covers, sentences, GOLDEN)
    print(f"goldens: {len(covers)} covers, {len(sentences)} sentences")
    for s in sentences:
        print(f"  {s.case_id} [{s.sentence_index}] {s.text[:72]}")


# ------------------------------------------------------- terminology tables

SEED_LABELS = {
    "passport": "DOC_EVIDENCE",
    "citizen of iran": "CLAIMANT_INFO",
    "arrested": "CLAIMANT_EVENT",
    "removal order": "PROCEDURE",
    "inconsistencies": "CREDIBILITY",
    "appeal is dismissed": "DETERMINATION",
    "fear of persecution": "EXPLANATION",
}

# (phrase, cosine to its family seed). Families sit in orthogonal planes, so
# every cross-family cosine is 0 and every seed-vs-entry cosine is the listed
# number; all are at least 0.01 away from the tested thresholds .5/.7/.9.
FAMILIES: dict[str, list[tuple[str, float]]] = {
    "passport": [
        ("national identity document", 0.95),
        ("medical record", 0.82),
        ("travel document", 0.80),
        ("identity card", 0.75),
        ("birth certificate", 0.72),
        ("suitcase", 0.45),
        ("toronto", 0.30),
    ],
    "citizen of iran": [
        ("citizen of nigeria", 0.92),
        ("national of sri lanka", 0.85),
        ("citizen of pakistan", 0.74),
        ("resident of tehran", 0.55),
    ],
    "arrested": [
        ("detained", 0.93),
        ("imprisoned", 0.86),
        ("beaten", 0.73),
        ("fled the country", 0.66),
        ("travelled", 0.40),
    ],
    "removal order": [
        ("deportation order", 0.91),
        ("exclusion order", 0.83),
        ("conditional departure order", 0.71),
        ("hearing date", 0.52),
    ],
    "inconsistencies": [
        ("contradictions", 0.94),
        ("implausible", 0.82),
        ("not credible", 0.76),
        ("vague testimony", 0.61),
    ],
    "appeal is dismissed": [
        ("appeal is allowed", 0.88),
        ("claim is accepted", 0.78),
        ("claim is rejected", 0.73),
        ("matter is adjourned", 0.58),
    ],
    "fear of persecution": [
        ("well-founded fear", 0.89),
        ("risk to life", 0.77),
        ("risk of torture", 0.71),
        ("political opinion", 0.63),
    ],
}

TABLE_FILLERS = [
    "board member", "hearing room", "legal aid", "interpreter", "ottawa",
    "vancouver", "montreal", "winnipeg", "counsel", "convention", "minister",
]

DIM = 16
THRESHOLDS = (0.5, 0.7, 0.9)


def build_embeddings() -> terminology.EmbeddingTable:
    table = terminology.EmbeddingTable(DIM)
    for plane, (seed, neighbors) in enumerate(FAMILIES.items()):
        a, b = 2 * plane, 2 * plane + 1
        seed_vec = np.zeros(DIM)
        seed_vec[a] = 1.0
        table.add(seed, seed_vec)
        for phrase, cosine in neighbors:
            vec = np.zeros(DIM)
            vec[a] = cosine
            vec[b] = math.sqrt(1.0 - cosine * cosine)
            table.add(phrase, vec)
    a, b = DIM - 2, DIM - 1
    for i, phrase in enumerate(TABLE_FILLERS):
        angle = math.radians(7 + 13 * i)
        vec = np.zeros(DIM)
        vec[a] = math.cos(angle)
        vec[b] = math.sin(angle)
        table.add(phrase, vec)
    assert len(table) == 50, len(table)
    for seed in FAMILIES:
        for phrase in table.phrases():
            if phrase == seed:
                continue
            cos = table.cosine(seed, phrase)
            for t in THRESHOLDS:
                assert abs(cos - t) > 1e-3, (seed, phrase, cos, t)
    table.save(DATA / "toy_embeddings.tsv")
    print(f"toy embeddings: {len(table)} entries, dim {DIM}")
    return table


def build_seed_inputs() -> None:
    seeds = {
        "keywords": [
            "passport",
            "citizen of iran",
            "arrested",
            "Removal Order",
            "removal order",
            "inconsistencies",
            "Claimant",
            "refugee",
        ],
        "lawyer_flags": [
            "appeal is dismissed",
            "fear of persecution",
            "inconsistencies",
        ],
        "label_map": SEED_LABELS,
    }
    (DATA / "seeds.json").write_text(
        json.dumps(seeds, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    (DATA / "stoplist.txt").write_text(
        "\n".join(["claimant", "refugee", "person", "country", "case"]) + "\n",
        encoding="utf-8",
    )
    print("seeds.json + stoplist.txt written")


def build_patterns(table: terminology.EmbeddingTable) -> None:
    raw = json.loads((DATA / "seeds.json").read_text(encoding="utf-8"))
    stoplist = [
        line.strip()
        for line in (DATA / "stoplist.txt").read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    seeds = terminology.assemble_seeds(
        raw["keywords"], raw["lawyer_flags"], stoplist, raw["label_map"]
    )
    patterns = terminology.expand(seeds, table, threshold=0.70)
    terminology.write_patterns(patterns, DATA / "patterns.jsonl")
    print(f"patterns.jsonl: {len(patterns)} patterns")


# ----------------------------------------------------------- training files

def build_training_configs() -> None:
    cells = {
        "baseline": {
            "encoder": "cnn", "static_vectors": "none",
            "contextual_pretraining": False, "transformer_checkpoint": None,
        },
        "cnn-rsv": {
            "encoder": "cnn", "static_vectors": "random_init",
            "contextual_pretraining": False, "transformer_checkpoint": None,
        },
        "cnn-fts": {
            "encoder": "cnn", "static_vectors": "fine_tuned",
            "contextual_pretraining": False, "transformer_checkpoint": None,
        },
        "cnn-rsv-pt": {
            "encoder": "cnn", "static_vectors": "random_init",
            "contextual_pretraining": True, "transformer_checkpoint": None,
        },
        "cnn-fts-pt": {
            "encoder": "cnn", "static_vectors": "fine_tuned",
            "contextual_pretraining": True, "transformer_checkpoint": None,
        },
        "transformer-general": {
            "encoder": "transformer", "static_vectors": "none",
            "contextual_pretraining": False,
            "transformer_checkpoint": "general-domain",
        },
        "transformer-legal": {
            "encoder": "transformer", "static_vectors": "none",
            "contextual_pretraining": False,
            "transformer_checkpoint": "legal-domain",
        },
    }
    manifest = {
        "version": 1,
        "cells": cells,
        "parts": {
            # Cover text has too little context for corpus pretraining or
            # corpus-fine-tuned vectors; it trains on the four cells below.
            "cover": {
                "label_groups": ["cover"],
                "cells": [
                    "baseline", "cnn-rsv", "transformer-general", "transformer-legal",
                ],
            },
            "main": {
                "label_groups": ["traditional", "new"],
                "cells": list(cells),
            },
        },
    }
    (DATA / "experiments.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    defaults = {
        "max_epochs": 30, "patience": 5, "batch_size": 32,
        "dropout": 0.1, "version": 1,
    }
    (DATA / "training_defaults.json").write_text(
        json.dumps(defaults, indent=2) + "\n", encoding="utf-8"
    )
    print("experiments.json + training_defaults.json written")


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    build_fixture_corpus()
    build_goldens()
    table = build_embeddings()
    build_seed_inputs()
    build_patterns(table)
    build_training_configs()


if __name__ == "__main__":
    main()
