"""Whitespace tokenization and BILUO tag sequence conversion.

Models tag tokens; the exchange format stores character spans. These
helpers translate between the two without losing offsets.
"""

from __future__ import annotations

import re

from ..dataset import Span

_TOKEN_RE = re.compile(r"\S+")

OUTSIDE = "O"


def tokenize_with_offsets(text: str) -> list[tuple[str, int, int]]:
    return [(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def tag_vocabulary(labels) -> list[str]:
    tags = [OUTSIDE]
    for label in labels:
        tags.extend(f"{prefix}-{label}" for prefix in "BILU")
    return tags


def spans_to_tags(text: str, spans, tokens=None) -> list[str]:
    """BILUO tags per token. Spans must cover whole tokens; a span that
    cuts through a token is clipped to the tokens it fully covers."""
    if tokens is None:
        tokens = tokenize_with_offsets(text)
    tags = [OUTSIDE] * len(tokens)
    for span in sorted(Span(*s) for s in spans):
        covered = [
            i
            for i, (_, start, end) in enumerate(tokens)
            if span.start <= start and end <= span.end
        ]
        if not covered or any(tags[i] != OUTSIDE for i in covered):
            continue
        if len(covered) == 1:
            tags[covered[0]] = f"U-{span.label}"
        else:
            tags[covered[0]] = f"B-{span.label}"
            for i in covered[1:-1]:
                tags[i] = f"I-{span.label}"
            tags[covered[-1]] = f"L-{span.label}"
    return tags


def tags_to_spans(tokens: list[tuple[str, int, int]], tags: list[str]) -> list[Span]:
    """Decode a tag sequence to non-overlapping character spans.

    Tolerates malformed sequences: a dangling I/L opens or closes a run as
    needed, so any tag sequence decodes to valid spans.
    """
    if len(tokens) != len(tags):
        raise ValueError(f"{len(tokens)} tokens but {len(tags)} tags")
    spans: list[Span] = []
    open_label: str | None = None
    open_start = 0
    last_end = 0

    def close(end: int) -> None:
        nonlocal open_label
        if open_label is not None:
            spans.append(Span(open_start, end, open_label))
            open_label = None

    for (_, start, end), tag in zip(tokens, tags):
        if tag == OUTSIDE:
            close(last_end)
        else:
            prefix, label = tag.split("-", 1)
            if prefix == "U":
                close(last_end)
                spans.append(Span(start, end, label))
            elif prefix == "B":
                close(last_end)
                open_label, open_start = label, start
            elif open_label == label:  # I or L continue the open run
                if prefix == "L":
                    spans.append(Span(open_start, end, label))
                    open_label = None
            else:  # dangling I/L: treat as a fresh start
                close(last_end)
                if prefix == "L":
                    spans.append(Span(start, end, label))
                else:
                    open_label, open_start = label, start
        last_end = end
    close(last_end)
    return spans
