"""Transformer token tagger backed by Hugging Face checkpoints.

The checkpoint is pure configuration: a hub id, an alias such as
"general-domain"/"legal-domain", or a local directory. build_tiny_checkpoint
creates a miniature local checkpoint so tests never touch the network.
"""

from __future__ import annotations

import json
import logging
import random
from pathlib import Path

import torch
from torch import nn

from ..dataset import LabeledSentence, Span
from .config import ModelConfig, TrainingDefaults, resolve_checkpoint
from .tagging import spans_to_tags, tag_vocabulary, tags_to_spans, tokenize_with_offsets

logger = logging.getLogger(__name__)


def _quiet_transformers() -> None:
    # Checkpoint loads legitimately drop/add the classification head; the
    # resulting load reports and shard progress bars are noise here.
    from transformers.utils import logging as hf_logging

    hf_logging.set_verbosity_error()
    hf_logging.disable_progress_bar()


def build_tiny_checkpoint(
    corpus_sentences,
    out_dir,
    hidden_size: int = 32,
    layers: int = 1,
    heads: int = 2,
    max_positions: int = 192,
    seed: int = 0,
) -> Path:
    """Write a miniature word-level BERT checkpoint trained from scratch
    (random weights) whose vocabulary covers the given corpus."""
    from tokenizers import Tokenizer
    from tokenizers.models import WordLevel
    from tokenizers.pre_tokenizers import WhitespaceSplit
    from tokenizers.processors import TemplateProcessing
    from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

    _quiet_transformers()
    words: dict[str, int] = {}
    for sentence in corpus_sentences:
        tokens = sentence.split() if isinstance(sentence, str) else list(sentence)
        for token in tokens:
            words.setdefault(token, len(words))
    vocab = {"[PAD]": 0, "[UNK]": 1, "[CLS]": 2, "[SEP]": 3, "[MASK]": 4}
    for word in words:
        vocab[word] = len(vocab)
    core = Tokenizer(WordLevel(vocab, unk_token="[UNK]"))
    core.pre_tokenizer = WhitespaceSplit()
    core.post_processor = TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", 2), ("[SEP]", 3)],
    )
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=core,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
        model_max_length=max_positions,
    )
    torch.manual_seed(seed)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=hidden_size,
        num_hidden_layers=layers,
        num_attention_heads=heads,
        intermediate_size=hidden_size * 2,
        max_position_embeddings=max_positions,
    )
    model = BertModel(config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return out


class TransformerBackend:
    def __init__(self, config: ModelConfig, tokenizer, model, tags: list[str]):
        self.config = config
        self.tokenizer = tokenizer
        self.model = model
        self.tags = tags

    @classmethod
    def _load_pretrained(cls, config: ModelConfig, tags: list[str]):
        from transformers import AutoModelForTokenClassification, AutoTokenizer

        _quiet_transformers()
        checkpoint = resolve_checkpoint(config.transformer_checkpoint)
        tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        torch.manual_seed(config.seed)
        model = AutoModelForTokenClassification.from_pretrained(
            checkpoint,
            num_labels=len(tags),
            id2label=dict(enumerate(tags)),
            label2id={t: i for i, t in enumerate(tags)},
            ignore_mismatched_sizes=True,
        )
        return tokenizer, model

    def _encode(self, token_rows: list[list[str]]):
        return self.tokenizer(
            token_rows,
            is_split_into_words=True,
            truncation=True,
            padding=True,
            return_tensors="pt",
        )

    @classmethod
    def train(
        cls,
        config: ModelConfig,
        train_set: list[LabeledSentence],
        dev_set: list[LabeledSentence],
        defaults: TrainingDefaults,
    ) -> tuple["TransformerBackend", dict]:
        from ..evaluation import score

        tags = tag_vocabulary(config.labels)
        tag_index = {t: i for i, t in enumerate(tags)}
        tokenizer, model = cls._load_pretrained(config, tags)
        backend = cls(config, tokenizer, model, tags)
        torch.manual_seed(config.seed)

        examples = []
        for ex in train_set:
            tokens = tokenize_with_offsets(ex.text)
            if not tokens:
                continue
            tag_ids = [
                tag_index[t] for t in spans_to_tags(ex.text, ex.spans, tokens)
            ]
            examples.append(([t for t, _, _ in tokens], tag_ids))
        if not examples:
            raise ValueError("training set is empty")

        optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
        loss_fn = nn.CrossEntropyLoss(ignore_index=-100)
        rng = random.Random(config.seed)
        best_f1, best_state, best_epoch, stale = -1.0, None, 0, 0
        epochs_run = 0
        for epoch in range(defaults.max_epochs):
            epochs_run = epoch + 1
            model.train()
            order = list(range(len(examples)))
            rng.shuffle(order)
            for start in range(0, len(order), defaults.batch_size):
                chunk = [examples[i] for i in order[start : start + defaults.batch_size]]
                encoded = backend._encode([c[0] for c in chunk])
                labels = torch.full(encoded["input_ids"].shape, -100, dtype=torch.long)
                for r, (_, tag_ids) in enumerate(chunk):
                    seen: set[int] = set()
                    for pos, word_id in enumerate(encoded.word_ids(r)):
                        if word_id is None or word_id in seen:
                            continue
                        seen.add(word_id)
                        labels[r, pos] = tag_ids[word_id]
                logits = model(**encoded).logits
                loss = loss_fn(logits.reshape(-1, len(tags)), labels.reshape(-1))
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
            "trained %s/%s transformer: dev micro-F1 %.4f at epoch %d",
            config.part, config.label_group, best_f1, best_epoch,
        )
        return backend, metadata

    def predict(self, text: str) -> list[Span]:
        tokens = tokenize_with_offsets(text)
        if not tokens:
            return []
        self.model.eval()
        with torch.no_grad():
            encoded = self._encode([[t for t, _, _ in tokens]])
            logits = self.model(**encoded).logits[0]
        ids = logits.argmax(dim=-1).tolist()
        tags = ["O"] * len(tokens)
        seen: set[int] = set()
        for pos, word_id in enumerate(encoded.word_ids(0)):
            if word_id is None or word_id in seen:
                continue
            seen.add(word_id)
            tags[word_id] = self.tags[ids[pos]]
        return tags_to_spans(tokens, tags)

    def save(self, directory) -> None:
        out = Path(directory)
        hf_dir = out / "checkpoint"
        hf_dir.mkdir(parents=True, exist_ok=True)
        self.model.save_pretrained(hf_dir)
        self.tokenizer.save_pretrained(hf_dir)
        (out / "tags.json").write_text(json.dumps(self.tags), encoding="utf-8")

    @classmethod
    def load(cls, config: ModelConfig, directory) -> "TransformerBackend":
        from transformers import AutoModelForTokenClassification, AutoTokenizer

        _quiet_transformers()
        src = Path(directory)
        tags = json.loads((src / "tags.json").read_text(encoding="utf-8"))
        tokenizer = AutoTokenizer.from_pretrained(src / "checkpoint")
        model = AutoModelForTokenClassification.from_pretrained(src / "checkpoint")
        return cls(config, tokenizer, model, tags)
