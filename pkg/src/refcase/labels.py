"""Label schema for the 19-category extraction task.

Case documents are annotated in two parts: the semi-structured cover page
(4 labels) and the sentence-segmented main text (15 labels). Cover and
main-text occurrences of DATE/GPE/ORG/PERSON are separate slots in the
structured output, giving 19 slots total.
"""

from __future__ import annotations

from dataclasses import dataclass

COVER_LABELS: tuple[str, ...] = ("DATE", "GPE", "ORG", "PERSON")

MAIN_LABELS: tuple[str, ...] = (
    "CLAIMANT_EVENT",
    "CLAIMANT_INFO",
    "GPE",
    "NORP",
    "ORG",
    "PROCEDURE",
    "CREDIBILITY",
    "DETERMINATION",
    "DOC_EVIDENCE",
    "EXPLANATION",
    "DATE",
    "PERSON",
    "LAW",
    "LAW_CASE",
    "LAW_REPORT",
)

# Labels covered by general-purpose NER models; trained with lr 0.001.
TRADITIONAL_LABELS: tuple[str, ...] = ("DATE", "ORG", "GPE", "PERSON", "NORP", "LAW")

# Labels trained from scratch; benefit from the lower lr 0.0005. The two
# citation labels are trained from scratch as well, so they ride with this
# group.
NEW_LABELS: tuple[str, ...] = (
    "CLAIMANT_INFO",
    "CLAIMANT_EVENT",
    "PROCEDURE",
    "DOC_EVIDENCE",
    "EXPLANATION",
    "DETERMINATION",
    "CREDIBILITY",
    "LAW_CASE",
    "LAW_REPORT",
)

# Labels eligible for terminology-base seeding and pattern pre-annotation.
TERMINOLOGY_LABELS: tuple[str, ...] = (
    "CLAIMANT_INFO",
    "CLAIMANT_EVENT",
    "PROCEDURE",
    "DOC_EVIDENCE",
    "EXPLANATION",
    "DETERMINATION",
    "CREDIBILITY",
)

# Annotation counts in the reference gold set, per (part, label). Used by
# reporting to flag thin labels.
ANNOTATION_COUNTS: dict[tuple[str, str], int] = {
    ("cover", "DATE"): 1219,
    ("cover", "GPE"): 871,
    ("cover", "ORG"): 278,
    ("cover", "PERSON"): 119,
    ("main", "CLAIMANT_EVENT"): 1575,
    ("main", "CLAIMANT_INFO"): 235,
    ("main", "GPE"): 732,
    ("main", "NORP"): 129,
    ("main", "ORG"): 549,
    ("main", "PROCEDURE"): 594,
    ("main", "CREDIBILITY"): 684,
    ("main", "DETERMINATION"): 76,
    ("main", "DOC_EVIDENCE"): 768,
    ("main", "EXPLANATION"): 404,
    ("main", "DATE"): 628,
    ("main", "PERSON"): 154,
    ("main", "LAW"): 476,
    ("main", "LAW_CASE"): 109,
    ("main", "LAW_REPORT"): 18,
}

# Main-text labels with too few annotations for their scores to be trusted.
INFREQUENT_LABELS: tuple[str, ...] = (
    "NORP",
    "DETERMINATION",
    "PERSON",
    "LAW_REPORT",
    "LAW_CASE",
)

PARTS: tuple[str, ...] = ("cover", "main")

LABEL_GROUPS: dict[str, tuple[str, ...]] = {
    "cover": COVER_LABELS,
    "traditional": TRADITIONAL_LABELS,
    "new": NEW_LABELS,
}


@dataclass(frozen=True)
class LabelSchema:
    """The fixed label inventory, split by document part."""

    cover_labels: tuple[str, ...] = COVER_LABELS
    main_labels: tuple[str, ...] = MAIN_LABELS

    def labels_for_part(self, part: str) -> tuple[str, ...]:
        if part == "cover":
            return self.cover_labels
        if part == "main":
            return self.main_labels
        raise ValueError(f"unknown part: {part!r}")

    def is_valid(self, label: str, part: str) -> bool:
        return label in self.labels_for_part(part)


SCHEMA = LabelSchema()

# Structured-database slots: cover entities keep their own columns so a
# hearing date never mixes with a timeline date.
COVER_SLOTS: tuple[str, ...] = tuple(f"COVER_{label}" for label in COVER_LABELS)
SLOTS: tuple[str, ...] = COVER_SLOTS + MAIN_LABELS


def slot_for(label: str, part: str) -> str:
    """Map a (label, part) pair to its structured-database slot id."""
    if not SCHEMA.is_valid(label, part):
        raise ValueError(f"label {label!r} is not valid for part {part!r}")
    if part == "cover":
        return f"COVER_{label}"
    return label


def slot_part_label(slot: str) -> tuple[str, str]:
    """Inverse of :func:`slot_for`."""
    if slot not in SLOTS:
        raise ValueError(f"unknown slot: {slot!r}")
    if slot.startswith("COVER_"):
        return "cover", slot[len("COVER_"):]
    return "main", slot


def group_of(label: str, part: str) -> str:
    """Training group for a label in a given part."""
    if not SCHEMA.is_valid(label, part):
        raise ValueError(f"label {label!r} is not valid for part {part!r}")
    if part == "cover":
        return "cover"
    return "traditional" if label in TRADITIONAL_LABELS else "new"


_LABEL_ORDER: dict[str, int] = {}
for _name in COVER_LABELS + MAIN_LABELS:
    _LABEL_ORDER.setdefault(_name, len(_LABEL_ORDER))


def label_order(label: str) -> int:
    """Canonical ordering index, used for deterministic tie-breaking."""
    return _LABEL_ORDER.get(label, len(_LABEL_ORDER))
