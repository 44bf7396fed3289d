"""Deterministic synthetic training corpus.

Builds sentences by interleaving filler words with terminology-pattern
phrases, then reads the gold spans back off the pattern matcher. The
matcher is the generator's own oracle, so pattern-based models have a
clean learnable signal and the oracle scores ~1.0 by construction.
"""

from __future__ import annotations

import json
import random
from importlib import resources
from typing import NamedTuple

from .dataset import LabeledSentence
from .terminology import TerminologyPattern, match_patterns

SENTENCES_PER_CASE = 10

# Filler vocabulary shares no token with the bundled patterns, so patterns
# occur in generated text exactly where they were injected.
FILLER_WORDS = (
    "the", "panel", "heard", "testimony", "during", "morning", "session",
    "board", "member", "reviewed", "file", "before", "making", "findings",
    "counsel", "presented", "submissions", "regarding", "matter", "hearing",
    "tribunal", "considered", "evidence", "presiding", "officer", "noted",
)


class InjectedPhrase(NamedTuple):
    """Pattern stand-in for label groups outside terminology seeding."""

    label: str
    phrase: tuple[str, ...]

    @property
    def surface(self) -> str:
        return " ".join(self.phrase)


COVER_INJECTIONS = (
    InjectedPhrase("DATE", ("january", "12", "1999")),
    InjectedPhrase("DATE", ("march", "2004")),
    InjectedPhrase("GPE", ("toronto",)),
    InjectedPhrase("GPE", ("ottawa", "ontario")),
    InjectedPhrase("ORG", ("refugee", "board")),
    InjectedPhrase("PERSON", ("j.", "smith")),
)

TRADITIONAL_INJECTIONS = (
    InjectedPhrase("DATE", ("june", "2003")),
    InjectedPhrase("ORG", ("federal", "court")),
    InjectedPhrase("GPE", ("toronto",)),
    InjectedPhrase("GPE", ("iran",)),
    InjectedPhrase("PERSON", ("m.", "jones")),
    InjectedPhrase("NORP", ("iranian",)),
    InjectedPhrase("LAW", ("section", "96")),
)


def default_patterns(part: str = "main", label_group: str = "new") -> list:
    """The injection set whose labels fit the requested part and group."""
    if part == "cover":
        return list(COVER_INJECTIONS)
    if label_group == "traditional":
        return list(TRADITIONAL_INJECTIONS)
    if label_group == "new":
        return bundled_patterns()
    raise ValueError(f"unknown label group {label_group!r}")


def bundled_patterns() -> list[TerminologyPattern]:
    text = (
        resources.files("refcase")
        .joinpath("data", "patterns.jsonl")
        .read_text(encoding="utf-8")
    )
    patterns = []
    for line in text.splitlines():
        if line.strip():
            row = json.loads(line)
            patterns.append(TerminologyPattern(row["label"], tuple(row["pattern"])))
    return patterns


def generate(
    n_sentences: int = 500,
    seed: int = 13,
    patterns: list[TerminologyPattern] | None = None,
    part: str = "main",
    label_group: str = "new",
) -> list[LabeledSentence]:
    if n_sentences < 1:
        raise ValueError("need at least one sentence")
    if patterns is None:
        patterns = default_patterns(part, label_group)
    if not patterns:
        raise ValueError("no patterns to inject")
    pattern_tokens = {t for p in patterns for t in p.phrase}
    fillers = [w for w in FILLER_WORDS if w not in pattern_tokens]
    rng = random.Random(seed)
    examples = []
    for i in range(n_sentences):
        words: list[str] = []

        def filler_run(lo: int, hi: int) -> None:
            words.extend(rng.choice(fillers) for _ in range(rng.randint(lo, hi)))

        filler_run(1, 4)
        for _ in range(rng.choice((1, 1, 2, 2, 3))):
            words.extend(rng.choice(patterns).phrase)
            filler_run(1, 3)
        text = " ".join(words)
        spans = match_patterns(text, patterns)
        examples.append(
            LabeledSentence(
                case_id=f"synthetic-{i // SENTENCES_PER_CASE:03d}",
                text=text,
                spans=spans,
                part=part,
            )
        )
    return examples
