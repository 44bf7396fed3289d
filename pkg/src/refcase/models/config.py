"""Model configuration: the architecture matrix and its invariants."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

from ..labels import COVER_LABELS, NEW_LABELS, TRADITIONAL_LABELS

ENCODERS = ("cnn", "transformer")
STATIC_VECTOR_MODES = ("none", "random_init", "fine_tuned")
LABEL_GROUPS = ("cover", "traditional", "new")

# Checkpoint identifiers are aliases so swapping domains is configuration,
# not code. Anything not aliased is used verbatim (hub id or local path).
CHECKPOINT_ALIASES = {
    "general-domain": "roberta-base",
    "legal-domain": "nlpaueb/legal-bert-base-uncased",
}

GROUP_LABELS = {
    "cover": COVER_LABELS,
    "traditional": TRADITIONAL_LABELS,
    "new": NEW_LABELS,
}

# Learning rates per label group: labels learned from scratch train slower.
LEARNING_RATES = {"cover": 0.001, "traditional": 0.001, "new": 0.0005}


def resolve_checkpoint(identifier: str) -> str:
    return CHECKPOINT_ALIASES.get(identifier, identifier)


@dataclass(frozen=True)
class ModelConfig:
    part: str
    label_group: str
    encoder: str
    static_vectors: str = "none"
    contextual_pretraining: bool = False
    transformer_checkpoint: str | None = None
    learning_rate: float | None = None
    optimizer: str = "adam"
    seed: int = 0

    def __post_init__(self):
        if self.part not in ("cover", "main"):
            raise ValueError(f"unknown part {self.part!r}")
        if self.label_group not in LABEL_GROUPS:
            raise ValueError(f"unknown label group {self.label_group!r}")
        if (self.part == "cover") != (self.label_group == "cover"):
            raise ValueError(
                f"part {self.part!r} is incompatible with label group {self.label_group!r}"
            )
        if self.encoder not in ENCODERS:
            raise ValueError(f"unknown encoder {self.encoder!r}")
        if self.static_vectors not in STATIC_VECTOR_MODES:
            raise ValueError(f"unknown static vector mode {self.static_vectors!r}")
        if self.encoder == "transformer":
            if self.static_vectors != "none":
                raise ValueError(
                    "transformer encoders take no static vectors; the checkpoint supplies context"
                )
            if self.contextual_pretraining:
                raise ValueError(
                    "transformer encoders take no contextual pretraining; the checkpoint supplies context"
                )
            if not self.transformer_checkpoint:
                raise ValueError("transformer encoder requires a checkpoint identifier")
        elif self.transformer_checkpoint is not None:
            raise ValueError("cnn encoder takes no transformer checkpoint")
        if self.part == "cover" and self.contextual_pretraining:
            raise ValueError("cover models never use contextual pretraining")
        if self.optimizer != "adam":
            raise ValueError(f"unsupported optimizer {self.optimizer!r}")
        if self.learning_rate is None:
            object.__setattr__(self, "learning_rate", LEARNING_RATES[self.label_group])
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")

    @property
    def labels(self) -> tuple[str, ...]:
        return GROUP_LABELS[self.label_group]

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass(frozen=True)
class TrainingDefaults:
    max_epochs: int = 30
    patience: int = 5
    batch_size: int = 32
    dropout: float = 0.1
    version: int = 1


@dataclass(frozen=True)
class Manifest:
    cells: dict[str, dict] = field(default_factory=dict)
    parts: dict[str, dict] = field(default_factory=dict)

    def cell_names(self) -> list[str]:
        return list(self.cells)

    def config(
        self,
        cell: str,
        part: str = "main",
        label_group: str | None = None,
        seed: int = 0,
        learning_rate: float | None = None,
    ) -> ModelConfig:
        if cell not in self.cells:
            raise ValueError(f"unknown matrix cell {cell!r}")
        if cell not in self.parts.get(part, {}).get("cells", ()):
            raise ValueError(f"cell {cell!r} is not defined for part {part!r}")
        settings = self.cells[cell]
        if label_group is None:
            if part == "cover":
                label_group = "cover"
            else:
                raise ValueError("main-text configs need a label group")
        return ModelConfig(
            part=part,
            label_group=label_group,
            encoder=settings["encoder"],
            static_vectors=settings.get("static_vectors", "none"),
            contextual_pretraining=settings.get("contextual_pretraining", False),
            transformer_checkpoint=settings.get("transformer_checkpoint"),
            learning_rate=learning_rate,
            seed=seed,
        )

    def all_configs(self, seed: int = 0) -> list[ModelConfig]:
        configs = []
        for part, axes in self.parts.items():
            for group in axes["label_groups"]:
                for cell in axes["cells"]:
                    configs.append(
                        self.config(cell, part=part, label_group=group, seed=seed)
                    )
        return configs


def _bundled(name: str):
    return resources.files("refcase").joinpath("data", name)


def load_manifest(path: str | Path | None = None) -> Manifest:
    source = Path(path).read_text(encoding="utf-8") if path else _bundled(
        "experiments.json"
    ).read_text(encoding="utf-8")
    raw = json.loads(source)
    return Manifest(cells=raw["cells"], parts=raw["parts"])


def load_training_defaults(path: str | Path | None = None) -> TrainingDefaults:
    source = Path(path).read_text(encoding="utf-8") if path else _bundled(
        "training_defaults.json"
    ).read_text(encoding="utf-8")
    raw = json.loads(source)
    return TrainingDefaults(**raw)
