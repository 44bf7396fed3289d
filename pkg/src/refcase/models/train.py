"""Training facade: one entry point over the CNN and transformer backends,
plus model artifact save/load."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from ..dataset import LabeledSentence, Span, validate
from ..terminology import EmbeddingTable
from .cnn import CnnBackend
from .config import ModelConfig, TrainingDefaults, load_training_defaults
from .transformer import TransformerBackend

logger = logging.getLogger(__name__)


@dataclass
class TrainedModel:
    config: ModelConfig
    backend: object
    labels: tuple[str, ...]
    metadata: dict

    def predict(self, text: str) -> list[Span]:
        if not text:
            return []
        return self.backend.predict(text)


def _check_datasets(config: ModelConfig, *datasets: list[LabeledSentence]) -> None:
    allowed = set(config.labels)
    for dataset in datasets:
        for example in dataset:
            problems = validate(example)
            if problems:
                raise ValueError(
                    f"invalid example for case {example.case_id!r}: {problems[0]}"
                )
            if example.part != config.part:
                raise ValueError(
                    f"example part {example.part!r} does not match config part {config.part!r}"
                )
            for span in example.spans:
                if span.label not in allowed:
                    raise ValueError(
                        f"label {span.label!r} is not in the {config.label_group!r} group"
                    )


def train(
    config: ModelConfig,
    train_set: list[LabeledSentence],
    dev_set: list[LabeledSentence],
    defaults: TrainingDefaults | None = None,
    static_table: EmbeddingTable | None = None,
    pretrained: dict | None = None,
) -> TrainedModel:
    """Train one matrix cell to convergence with early stopping on dev micro-F1."""
    if defaults is None:
        defaults = load_training_defaults()
    _check_datasets(config, train_set, dev_set)
    if config.encoder == "transformer":
        backend, metadata = TransformerBackend.train(config, train_set, dev_set, defaults)
    else:
        backend, metadata = CnnBackend.train(
            config, train_set, dev_set, defaults,
            static_table=static_table, pretrained=pretrained,
        )
    return TrainedModel(
        config=config, backend=backend, labels=config.labels, metadata=metadata
    )


def predict(model: TrainedModel, text: str) -> list[Span]:
    return model.predict(text)


def save_model(model: TrainedModel, directory) -> Path:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(
        json.dumps(model.config.to_dict(), indent=2), encoding="utf-8"
    )
    (out / "labels.json").write_text(json.dumps(list(model.labels)), encoding="utf-8")
    (out / "metadata.json").write_text(
        json.dumps(model.metadata, indent=2, sort_keys=True), encoding="utf-8"
    )
    model.backend.save(out)
    return out


def load_model(directory) -> TrainedModel:
    src = Path(directory)
    config = ModelConfig.from_dict(
        json.loads((src / "config.json").read_text(encoding="utf-8"))
    )
    labels = tuple(json.loads((src / "labels.json").read_text(encoding="utf-8")))
    metadata = json.loads((src / "metadata.json").read_text(encoding="utf-8"))
    if config.encoder == "transformer":
        backend = TransformerBackend.load(config, src)
    else:
        backend = CnnBackend.load(config, src)
    return TrainedModel(config=config, backend=backend, labels=labels, metadata=metadata)
