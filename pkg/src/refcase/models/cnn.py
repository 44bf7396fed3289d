"""Convolutional token tagger with optional static vectors and
masked-token pretraining on unlabeled corpus text."""

from __future__ import annotations

import logging
import random
from collections import Counter

import numpy as np
import torch
from torch import nn

from ..dataset import LabeledSentence, Span
from ..terminology import EmbeddingTable
from .config import ModelConfig, TrainingDefaults
from .tagging import spans_to_tags, tag_vocabulary, tags_to_spans, tokenize_with_offsets

logger = logging.getLogger(__name__)

PAD, UNK, MASK = "<pad>", "<unk>", "<mask>"
LEARNED_DIM = 64
STATIC_DIM = 50
HIDDEN = 128
KERNEL = 3
MIN_FREQ = 1


class Vocab:
    def __init__(self, words: list[str]):
        self.words = [PAD, UNK, MASK] + [w for w in words if w not in (PAD, UNK, MASK)]
        self.index = {w: i for i, w in enumerate(self.words)}

    @classmethod
    def build(cls, sentences: list[list[str]], min_freq: int = MIN_FREQ) -> "Vocab":
        counts = Counter(t for s in sentences for t in s)
        kept = [w for w, c in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
                if c >= min_freq]
        return cls(kept)

    def __len__(self) -> int:
        return len(self.words)

    def encode(self, tokens: list[str]) -> list[int]:
        unk = self.index[UNK]
        return [self.index.get(t, unk) for t in tokens]


def _static_matrix(
    vocab: Vocab,
    mode: str,
    table: EmbeddingTable | None,
    seed: int,
) -> torch.Tensor | None:
    if mode == "none":
        return None
    rng = np.random.default_rng(seed + 1)
    matrix = (rng.random((len(vocab), STATIC_DIM)) - 0.5) / (STATIC_DIM + 1)
    matrix[0] = 0.0
    if mode == "fine_tuned":
        if table is None:
            raise ValueError("fine_tuned static vectors require a vector table")
        if table.dim != STATIC_DIM:
            raise ValueError(
                f"static vector table has dimension {table.dim}, expected {STATIC_DIM}"
            )
        for word, i in vocab.index.items():
            if word in table:
                matrix[i] = table.vector(word)
    return torch.tensor(matrix, dtype=torch.float32)


class CnnEncoder(nn.Module):
    """Embeddings plus a two-layer convolution stack; returns per-token states."""

    def __init__(self, vocab_size: int, static: torch.Tensor | None, dropout: float):
        super().__init__()
        self.embed = nn.Embedding(vocab_size, LEARNED_DIM, padding_idx=0)
        self.static = None
        width = LEARNED_DIM
        if static is not None:
            self.static = nn.Embedding.from_pretrained(static, freeze=True, padding_idx=0)
            width += static.shape[1]
        self.conv1 = nn.Conv1d(width, HIDDEN, KERNEL, padding=KERNEL // 2)
        self.conv2 = nn.Conv1d(HIDDEN, HIDDEN, KERNEL, padding=KERNEL // 2)
        self.dropout = nn.Dropout(dropout)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        parts = [self.embed(ids)]
        if self.static is not None:
            parts.append(self.static(ids))
        x = torch.cat(parts, dim=-1) if len(parts) > 1 else parts[0]
        x = self.dropout(x).transpose(1, 2)
        x = torch.relu(self.conv1(x))
        x = self.dropout(x.transpose(1, 2)).transpose(1, 2)
        x = torch.relu(self.conv2(x))
        return x.transpose(1, 2)


class CnnTagger(nn.Module):
    def __init__(self, vocab_size: int, n_tags: int, static: torch.Tensor | None, dropout: float):
        super().__init__()
        self.encoder = CnnEncoder(vocab_size, static, dropout)
        self.classifier = nn.Linear(HIDDEN, n_tags)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        return self.classifier(self.encoder(ids))


def _pad_batch(rows: list[list[int]], fill: int) -> torch.Tensor:
    width = max(len(r) for r in rows)
    return torch.tensor([r + [fill] * (width - len(r)) for r in rows], dtype=torch.long)


def pretrain_contextual(
    corpus_sentences,
    config: ModelConfig,
    defaults: TrainingDefaults,
    epochs: int = 5,
) -> dict:
    """Masked-token pretraining over raw corpus text.

    Returns an artifact {vocab, encoder_state, static_mode} that train()
    can consume to initialize a tagger's encoder.
    """
    if config.encoder != "cnn" or not config.contextual_pretraining:
        raise ValueError("contextual pretraining applies to cnn cells that request it")
    token_rows = [s.split() if isinstance(s, str) else list(s) for s in corpus_sentences]
    token_rows = [r for r in token_rows if r]
    if len(token_rows) < defaults.batch_size:
        raise ValueError(
            f"corpus of {len(token_rows)} sentences is smaller than one batch "
            f"({defaults.batch_size})"
        )
    torch.manual_seed(config.seed)
    vocab = Vocab.build(token_rows)
    encoder = CnnEncoder(len(vocab), static=None, dropout=defaults.dropout)
    decoder = nn.Linear(HIDDEN, len(vocab))
    optimizer = torch.optim.Adam(
        list(encoder.parameters()) + list(decoder.parameters()), lr=config.learning_rate
    )
    loss_fn = nn.CrossEntropyLoss(ignore_index=-100)
    rng = random.Random(config.seed)
    mask_id = vocab.index[MASK]
    encoded = [vocab.encode(r) for r in token_rows]
    encoder.train()
    for epoch in range(epochs):
        order = list(range(len(encoded)))
        rng.shuffle(order)
        for start in range(0, len(order), defaults.batch_size):
            chunk = [encoded[i] for i in order[start : start + defaults.batch_size]]
            ids = _pad_batch(chunk, fill=0)
            targets = torch.full_like(ids, -100)
            masked = ids.clone()
            for r, row in enumerate(chunk):
                for c in range(len(row)):
                    if rng.random() < 0.15:
                        targets[r, c] = ids[r, c]
                        masked[r, c] = mask_id
            if (targets != -100).sum() == 0:
                continue
            logits = decoder(encoder(masked))
            loss = loss_fn(logits.reshape(-1, len(vocab)), targets.reshape(-1))
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
    logger.info("pretrained contextual encoder on %d sentences", len(token_rows))
    return {
        "vocab": vocab.words,
        "encoder_state": {k: v.clone() for k, v in encoder.state_dict().items()},
    }


class CnnBackend:
    """Trained CNN tagger: holds the module, vocabulary, and tag set."""

    def __init__(self, config: ModelConfig, vocab: Vocab, tags: list[str], model: CnnTagger):
        self.config = config
        self.vocab = vocab
        self.tags = tags
        self.model = model

    @classmethod
    def train(
        cls,
        config: ModelConfig,
        train_set: list[LabeledSentence],
        dev_set: list[LabeledSentence],
        defaults: TrainingDefaults,
        static_table: EmbeddingTable | None = None,
        pretrained: dict | None = None,
    ) -> tuple["CnnBackend", dict]:
        from ..evaluation import score

        torch.manual_seed(config.seed)
        token_rows = [
            [t for t, _, _ in tokenize_with_offsets(ex.text)] for ex in train_set
        ]
        if pretrained is not None:
            if not config.contextual_pretraining:
                raise ValueError("config does not request contextual pretraining")
            vocab = Vocab(pretrained["vocab"][3:])
        else:
            if config.contextual_pretraining:
                raise ValueError("config requests contextual pretraining but no artifact given")
            vocab = Vocab.build(token_rows)
        tags = tag_vocabulary(config.labels)
        tag_index = {t: i for i, t in enumerate(tags)}
        static = _static_matrix(vocab, config.static_vectors, static_table, config.seed)
        model = CnnTagger(len(vocab), len(tags), static, defaults.dropout)
        if pretrained is not None:
            state = dict(pretrained["encoder_state"])
            # Pretraining runs without a static channel; embeddings and convs
            # transfer, conv1 only when input widths agree.
            own = model.encoder.state_dict()
            merged = {
                k: v for k, v in state.items() if k in own and own[k].shape == v.shape
            }
            own.update(merged)
            model.encoder.load_state_dict(own)

        def encode(example: LabeledSentence) -> tuple[list[int], list[int]]:
            tokens = tokenize_with_offsets(example.text)
            ids = vocab.encode([t for t, _, _ in tokens])
            tag_ids = [
                tag_index[t]
                for t in spans_to_tags(example.text, example.spans, tokens)
            ]
            return ids, tag_ids

        encoded = [encode(ex) for ex in train_set if ex.text.strip()]
        if not encoded:
            raise ValueError("training set is empty")
        optimizer = torch.optim.Adam(
            [p for p in model.parameters() if p.requires_grad], lr=config.learning_rate
        )
        loss_fn = nn.CrossEntropyLoss(ignore_index=-100)
        rng = random.Random(config.seed)
        backend = cls(config, vocab, tags, model)
        best_f1, best_state, best_epoch, stale = -1.0, None, 0, 0
        epochs_run = 0
        for epoch in range(defaults.max_epochs):
            epochs_run = epoch + 1
            model.train()
            order = list(range(len(encoded)))
            rng.shuffle(order)
            for start in range(0, len(order), defaults.batch_size):
                chunk = [encoded[i] for i in order[start : start + defaults.batch_size]]
                ids = _pad_batch([c[0] for c in chunk], fill=0)
                targets = _pad_batch([c[1] for c in chunk], fill=-100)
                logits = model(ids)
                loss = loss_fn(logits.reshape(-1, len(tags)), targets.reshape(-1))
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
            predictions = [backend.predict(ex.text) for ex in dev_set]
            dev_f1 = score(dev_set, predictions).micro().f1_fraction
            if dev_f1 > best_f1:
                best_f1, best_epoch, stale = dev_f1, epoch + 1, 0
                best_state = {k: v.clone() for k, v in model.state_dict().items()}
            else:
                stale += 1
                if stale >= defaults.patience:
                    break
        if best_state is not None:
            model.load_state_dict(best_state)
        metadata = {
            "epochs_run": epochs_run,
            "best_epoch": best_epoch,
            "best_dev_f1": best_f1,
        }
        logger.info(
            "trained %s/%s cnn: dev micro-F1 %.4f at epoch %d",
            config.part, config.label_group, best_f1, best_epoch,
        )
        return backend, metadata

    def predict(self, text: str) -> list[Span]:
        tokens = tokenize_with_offsets(text)
        if not tokens:
            return []
        self.model.eval()
        with torch.no_grad():
            ids = _pad_batch([self.vocab.encode([t for t, _, _ in tokens])], fill=0)
            tag_ids = self.model(ids).argmax(dim=-1)[0].tolist()
        return tags_to_spans(tokens, [self.tags[i] for i in tag_ids])

    def save(self, directory) -> None:
        import json
        from pathlib import Path

        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        (out / "vocab.json").write_text(
            json.dumps(self.vocab.words, ensure_ascii=False), encoding="utf-8"
        )
        (out / "tags.json").write_text(json.dumps(self.tags), encoding="utf-8")
        torch.save(self.model.state_dict(), out / "weights.pt")

    @classmethod
    def load(cls, config: ModelConfig, directory) -> "CnnBackend":
        import json
        from pathlib import Path

        src = Path(directory)
        words = json.loads((src / "vocab.json").read_text(encoding="utf-8"))
        tags = json.loads((src / "tags.json").read_text(encoding="utf-8"))
        vocab = Vocab(words[3:])
        state = torch.load(src / "weights.pt", map_location="cpu", weights_only=True)
        has_static = any(k.startswith("encoder.static") for k in state)
        static = None
        if has_static:
            static = state["encoder.static.weight"]
        model = CnnTagger(len(vocab), len(tags), static, dropout=0.0)
        model.load_state_dict(state)
        return cls(config, vocab, tags, model)
