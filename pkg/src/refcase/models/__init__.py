"""Token-classification models over the architecture matrix."""

from .cnn import CnnBackend, pretrain_contextual
from .config import (
    CHECKPOINT_ALIASES,
    Manifest,
    ModelConfig,
    TrainingDefaults,
    load_manifest,
    load_training_defaults,
    resolve_checkpoint,
)
from .tagging import spans_to_tags, tag_vocabulary, tags_to_spans, tokenize_with_offsets
from .train import TrainedModel, load_model, predict, save_model, train
from .transformer import TransformerBackend, build_tiny_checkpoint

__all__ = [
    "CHECKPOINT_ALIASES",
    "CnnBackend",
    "Manifest",
    "ModelConfig",
    "TrainedModel",
    "TrainingDefaults",
    "TransformerBackend",
    "build_tiny_checkpoint",
    "load_manifest",
    "load_model",
    "load_training_defaults",
    "predict",
    "pretrain_contextual",
    "resolve_checkpoint",
    "save_model",
    "spans_to_tags",
    "tag_vocabulary",
    "tags_to_spans",
    "tokenize_with_offsets",
    "train",
]
