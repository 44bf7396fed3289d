"""Annotated examples, schema validation, and deterministic splits."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from .labels import SCHEMA, LabelSchema


class Span(NamedTuple):
    start: int
    end: int
    label: str


@dataclass
class LabeledSentence:
    case_id: str
    text: str
    spans: list[Span] = field(default_factory=list)
    part: str = "main"

    def to_json(self) -> dict:
        return {
            "text": self.text,
            "spans": [{"start": s.start, "end": s.end, "label": s.label} for s in self.spans],
            "meta": {"case_id": self.case_id, "part": self.part},
        }

    @classmethod
    def from_json(cls, payload: dict) -> "LabeledSentence":
        meta = payload.get("meta", {})
        return cls(
            case_id=meta.get("case_id", ""),
            text=payload["text"],
            spans=[Span(int(s["start"]), int(s["end"]), s["label"]) for s in payload.get("spans", [])],
            part=meta.get("part", "main"),
        )


def validate(example: LabeledSentence, schema: LabelSchema = SCHEMA) -> list[str]:
    """All invariant violations of one example; an empty list means ok."""
    violations = []
    if example.part not in ("cover", "main"):
        violations.append(f"unknown part {example.part!r}")
        return violations
    n = len(example.text)
    for span in example.spans:
        if span.end <= span.start:
            violations.append(f"span {span.start}..{span.end}: end before start")
        if span.start < 0 or span.end > n:
            violations.append(f"span {span.start}..{span.end}: outside text of length {n}")
        if span.label not in schema.labels_for_part(example.part):
            if span.label in schema.cover_labels + schema.main_labels:
                violations.append(f"label {span.label} not valid for part {example.part}")
            else:
                violations.append(f"unknown label {span.label}")
    ordered = sorted(example.spans, key=lambda s: (s.start, s.end))
    for left, right in zip(ordered, ordered[1:]):
        if right.start < left.end:
            violations.append(f"spans {tuple(left)} and {tuple(right)} overlap")
    return violations


def _tenth(n: int) -> int:
    # round-half-up on a tenth, computed exactly in integers
    return (n + 5) // 10


def split(
    examples: list[LabeledSentence],
    seed: int,
    by_case: bool = False,
) -> tuple[list[LabeledSentence], list[LabeledSentence], list[LabeledSentence]]:
    """Deterministic 80/10/10 split: dev and test get round(N/10) each.

    by_case keeps all examples of one case in the same partition for
    leakage-sensitive uses; sizes then apply to cases, not examples.
    """
    if len(examples) < 3:
        raise ValueError(f"need at least 3 examples to split, got {len(examples)}")
    rng = random.Random(seed)
    if by_case:
        case_ids = sorted({ex.case_id for ex in examples})
        rng.shuffle(case_ids)
        n = len(case_ids)
        n_dev, n_test = _tenth(n), _tenth(n)
        dev_ids = set(case_ids[n - n_dev - n_test : n - n_test])
        test_ids = set(case_ids[n - n_test :])
        train = [ex for ex in examples if ex.case_id not in dev_ids | test_ids]
        dev = [ex for ex in examples if ex.case_id in dev_ids]
        test = [ex for ex in examples if ex.case_id in test_ids]
        return train, dev, test
    indices = list(range(len(examples)))
    rng.shuffle(indices)
    n = len(examples)
    n_dev, n_test = _tenth(n), _tenth(n)
    train_idx = indices[: n - n_dev - n_test]
    dev_idx = indices[n - n_dev - n_test : n - n_test]
    test_idx = indices[n - n_test :]
    return (
        [examples[i] for i in train_idx],
        [examples[i] for i in dev_idx],
        [examples[i] for i in test_idx],
    )


def write_jsonl(examples: list[LabeledSentence], path: str | Path) -> Path:
    """Serialize to the annotation exchange format, one object per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps(ex.to_json(), ensure_ascii=False) + "\n")
    return path


def read_jsonl(path: str | Path) -> list[LabeledSentence]:
    examples = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                examples.append(LabeledSentence.from_json(json.loads(line)))
    return examples
