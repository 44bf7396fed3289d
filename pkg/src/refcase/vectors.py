"""Corpus fine-tuning of static word vectors.

Retrofits a base vector table to corpus co-occurrence statistics with a
GloVe-style weighted least-squares objective plus a quadratic prior that
anchors each word to its base vector. Words that never co-occur with
anything keep their base vector bit-for-bit: they receive zero gradient
from both terms, so the optimizer never moves them.
"""

from __future__ import annotations

import logging
from collections import Counter

import numpy as np

from .terminology import EmbeddingTable

logger = logging.getLogger(__name__)

DEFAULT_DIM = 50


def _tokenize(sentence) -> list[str]:
    if isinstance(sentence, str):
        return sentence.split()
    return list(sentence)


def build_cooccurrence(
    sentences: list[list[str]],
    index: dict[str, int],
    window: int = 10,
) -> dict[tuple[int, int], float]:
    """Symmetric co-occurrence counts weighted by 1/distance."""
    counts: dict[tuple[int, int], float] = {}
    for sentence in sentences:
        ids = [index.get(t, -1) for t in _tokenize(sentence)]
        for i, a in enumerate(ids):
            if a < 0:
                continue
            for j in range(i + 1, min(i + 1 + window, len(ids))):
                b = ids[j]
                if b < 0:
                    continue
                weight = 1.0 / (j - i)
                counts[(a, b)] = counts.get((a, b), 0.0) + weight
                counts[(b, a)] = counts.get((b, a), 0.0) + weight
    return counts


def fine_tune_static_vectors(
    corpus_sentences,
    base_vectors: EmbeddingTable,
    dim: int = DEFAULT_DIM,
    window: int = 10,
    min_count: int = 1,
    xmax: float = 100.0,
    alpha: float = 0.75,
    prior_weight: float = 0.1,
    learning_rate: float = 0.05,
    epochs: int = 60,
    seed: int = 0,
) -> EmbeddingTable:
    """Fit corpus-adapted vectors anchored to base_vectors.

    The vocabulary is every corpus token seen at least min_count times plus
    every base-table entry. Entries absent from the corpus come back
    unchanged. Returns a table of dimension dim.
    """
    if base_vectors.dim != dim:
        raise ValueError(
            f"base vectors have dimension {base_vectors.dim}, expected {dim}"
        )
    sentences = [_tokenize(s) for s in corpus_sentences]
    sentences = [s for s in sentences if s]
    if not sentences:
        raise ValueError("corpus is empty")

    counts = Counter(t for s in sentences for t in s)
    vocab = [w for w, c in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
             if c >= min_count]
    seen = set(vocab)
    vocab.extend(w for w in base_vectors.phrases() if w not in seen)
    if not vocab:
        raise ValueError(f"no tokens meet min_count={min_count}")
    index = {w: i for i, w in enumerate(vocab)}

    rng = np.random.default_rng(seed)
    size = len(vocab)
    main = np.zeros((size, dim))
    context = np.zeros((size, dim))
    bias_main = np.zeros(size)
    bias_ctx = np.zeros(size)
    prior_rows = []
    for word, i in index.items():
        if word in base_vectors:
            main[i] = base_vectors.vector(word)
            prior_rows.append(i)
        else:
            main[i] = (rng.random(dim) - 0.5) / (dim + 1)
            context[i] = (rng.random(dim) - 0.5) / (dim + 1)
    prior_idx = np.array(prior_rows, dtype=int)
    priors = main[prior_idx].copy() if len(prior_rows) else np.zeros((0, dim))

    cooc = build_cooccurrence(sentences, index, window=window)
    pairs = sorted(cooc)
    row = np.array([p[0] for p in pairs], dtype=int)
    col = np.array([p[1] for p in pairs], dtype=int)
    value = np.array([cooc[p] for p in pairs])
    if len(pairs):
        log_value = np.log(value)
        weight = np.minimum(1.0, (value / xmax) ** alpha)

    # AdaGrad accumulators start at 1 so the first step is just the raw rate.
    acc = [np.ones_like(a) for a in (main, context, bias_main, bias_ctx)]
    for _ in range(epochs):
        grads = [np.zeros_like(a) for a in (main, context, bias_main, bias_ctx)]
        if len(pairs):
            inner = (
                np.einsum("ij,ij->i", main[row], context[col])
                + bias_main[row]
                + bias_ctx[col]
                - log_value
            )
            g = 2.0 * weight * inner
            np.add.at(grads[0], row, g[:, None] * context[col])
            np.add.at(grads[1], col, g[:, None] * main[row])
            np.add.at(grads[2], row, g)
            np.add.at(grads[3], col, g)
        if len(prior_rows):
            drift = 2.0 * prior_weight * (main[prior_idx] + context[prior_idx] - priors)
            np.add.at(grads[0], prior_idx, drift)
            np.add.at(grads[1], prior_idx, drift)
        for param, grad, squares in zip((main, context, bias_main, bias_ctx), grads, acc):
            param -= learning_rate * grad / np.sqrt(squares)
            squares += grad * grad

    table = EmbeddingTable(dim)
    for word, i in index.items():
        table.add(word, main[i] + context[i])
    logger.info("fine-tuned %d static vectors (dimension %d)", len(vocab), dim)
    return table


def phrase_table(words: EmbeddingTable, phrases) -> EmbeddingTable:
    """Average word vectors into phrase vectors; unknown-only phrases are skipped."""
    out = EmbeddingTable(words.dim)
    for phrase in phrases:
        tokens = phrase.split() if isinstance(phrase, str) else list(phrase)
        vectors = [words.vector(t) for t in tokens if t in words]
        if not vectors:
            logger.warning("no vectors for any token of %r; skipped", " ".join(tokens))
            continue
        out.add(" ".join(tokens), np.mean(vectors, axis=0))
    return out
