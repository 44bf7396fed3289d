"""Terminology base: seed assembly, similarity expansion, pattern matching.

Seed phrases come from source-database keywords plus phrases flagged by
practitioners; the base is then grown with embedding neighbours above a
cosine threshold and matched against sentences to pre-annotate them.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Span
from .labels import TERMINOLOGY_LABELS, label_order
from .parsing import MainTextSentence, clean_text

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.70

# The source keywords are dominated by a handful of words too general to
# carry a label; these two must always be stopped out.
REQUIRED_STOPWORDS = ("claimant", "refugee")


@dataclass(frozen=True)
class TerminologyPattern:
    label: str
    phrase: tuple[str, ...]

    def __post_init__(self):
        if not self.phrase or any(not tok for tok in self.phrase):
            raise ValueError("pattern phrase must be non-empty tokens")
        if any(tok != tok.lower() for tok in self.phrase):
            raise ValueError(f"pattern tokens must be lowercase: {self.phrase}")
        if self.label not in TERMINOLOGY_LABELS:
            raise ValueError(f"label {self.label} does not use terminology seeding")

    @property
    def surface(self) -> str:
        return " ".join(self.phrase)


class EmbeddingTable:
    """Phrase to vector mapping with a fixed dimension."""

    def __init__(self, dim: int):
        if dim <= 0:
            raise ValueError("dimension must be positive")
        self.dim = dim
        self._vectors: dict[str, np.ndarray] = {}

    def __contains__(self, phrase: str) -> bool:
        return phrase in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def phrases(self) -> list[str]:
        return list(self._vectors)

    def add(self, phrase: str, vector) -> None:
        vec = np.asarray(vector, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise ValueError(f"{phrase!r}: expected dimension {self.dim}, got {vec.shape}")
        if not np.any(vec):
            raise ValueError(f"{phrase!r}: zero vectors are not allowed")
        self._vectors[phrase] = vec

    def vector(self, phrase: str) -> np.ndarray:
        return self._vectors[phrase]

    def cosine(self, a: str, b: str) -> float:
        va, vb = self._vectors[a], self._vectors[b]
        return float(np.dot(va, vb) / (np.linalg.norm(va) * np.linalg.norm(vb)))

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fh:
            fh.write(f"d={self.dim}\n")
            for phrase, vec in self._vectors.items():
                floats = " ".join(repr(x) for x in vec.tolist())
                fh.write(f"{phrase}\t{floats}\n")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingTable":
        with Path(path).open(encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith("d="):
                raise ValueError(f"{path}: missing 'd=<dim>' header")
            table = cls(int(header[2:]))
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                phrase, _, floats = line.partition("\t")
                table.add(phrase, [float(x) for x in floats.split()])
        return table


def assemble_seeds(
    source_keywords: list[str],
    lawyer_flags: list[str],
    stoplist: list[str],
    label_map: dict[str, str],
    review_file: str | Path | None = None,
) -> list[tuple[str, str]]:
    """Deduplicated, stoplist-filtered (label, phrase) seed list.

    Phrases without a label in the curated mapping are routed to the review
    file (or logged when no file is given), never silently dropped.
    """
    stop = {clean_text(s) for s in stoplist}
    missing = [w for w in REQUIRED_STOPWORDS if w not in stop]
    if missing:
        raise ValueError(f"stoplist must include {missing}")
    label_lookup = {clean_text(k): v for k, v in label_map.items()}
    seeds: list[tuple[str, str]] = []
    seen: set[str] = set()
    unmapped: list[str] = []
    for raw in list(source_keywords) + list(lawyer_flags):
        phrase = clean_text(raw)
        if not phrase or phrase in stop or phrase in seen:
            continue
        seen.add(phrase)
        label = label_lookup.get(phrase)
        if label is None:
            unmapped.append(phrase)
            continue
        seeds.append((label, phrase))
    if unmapped:
        logger.warning("%d seed phrases have no label mapping", len(unmapped))
        if review_file is not None:
            review_path = Path(review_file)
            review_path.parent.mkdir(parents=True, exist_ok=True)
            with review_path.open("w", encoding="utf-8") as fh:
                for phrase in unmapped:
                    fh.write(phrase + "\n")
    return seeds


def expand(
    seeds: list[tuple[str, str]],
    emb: EmbeddingTable,
    threshold: float = DEFAULT_THRESHOLD,
) -> list[TerminologyPattern]:
    """Grow the seed set with embedding neighbours at cosine >= threshold.

    Every seed is retained whether or not the table knows it; neighbours
    inherit the seed's label. Output order is deterministic: seeds in input
    order, then neighbours by descending similarity.
    """
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    patterns: list[TerminologyPattern] = []
    seen: set[tuple[str, tuple[str, ...]]] = set()

    def push(label: str, phrase: str) -> None:
        pattern = TerminologyPattern(label, tuple(phrase.split()))
        key = (pattern.label, pattern.phrase)
        if key not in seen:
            seen.add(key)
            patterns.append(pattern)

    for label, phrase in seeds:
        push(label, phrase)
    for label, phrase in seeds:
        if phrase not in emb:
            logger.warning("seed %r not in embedding table, kept unexpanded", phrase)
            continue
        scored = []
        for other in emb.phrases():
            sim = emb.cosine(phrase, other)
            if sim >= threshold:
                scored.append((-sim, other))
        for _, other in sorted(scored):
            push(label, other)
    return patterns


def match_patterns(
    sentence: MainTextSentence | str,
    patterns: list[TerminologyPattern],
) -> list[Span]:
    """Token-aligned pattern occurrences as non-overlapping labeled spans.

    Overlaps resolve longest-match-wins, ties to the leftmost match, then to
    the lower label id.
    """
    text = sentence if isinstance(sentence, str) else sentence.text
    candidates: list[tuple[int, int, str]] = []
    for pattern in patterns:
        needle = pattern.surface
        start = text.find(needle)
        while start != -1:
            end = start + len(needle)
            before_ok = start == 0 or not text[start - 1].isalnum()
            after_ok = end == len(text) or not text[end].isalnum()
            if before_ok and after_ok:
                candidates.append((start, end, pattern.label))
            start = text.find(needle, start + 1)
    candidates.sort(key=lambda c: (-(c[1] - c[0]), c[0], label_order(c[2])))
    chosen: list[tuple[int, int, str]] = []
    for start, end, label in candidates:
        if all(end <= s or start >= e for s, e, _ in chosen):
            chosen.append((start, end, label))
    chosen.sort()
    return [Span(s, e, lab) for s, e, lab in chosen]


def write_patterns(patterns: list[TerminologyPattern], path: str | Path) -> Path:
    """Pattern file: one {"label", "pattern"} JSON object per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for pattern in patterns:
            fh.write(
                json.dumps({"label": pattern.label, "pattern": list(pattern.phrase)})
                + "\n"
            )
    return path


def read_patterns(path: str | Path) -> list[TerminologyPattern]:
    patterns = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                payload = json.loads(line)
                patterns.append(
                    TerminologyPattern(payload["label"], tuple(payload["pattern"]))
                )
    return patterns
