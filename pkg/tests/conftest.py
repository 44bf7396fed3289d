from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from refcase import synthetic
from refcase.dataset import split
from refcase.models import load_manifest, train

from .helpers import COVER_PATTERNS, TRADITIONAL_PATTERNS

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def manifest():
    return load_manifest()


@pytest.fixture(scope="session")
def synthetic_examples():
    return synthetic.generate(500, seed=13)


@pytest.fixture(scope="session")
def synthetic_split(synthetic_examples):
    return split(synthetic_examples, seed=17)


@pytest.fixture(scope="session")
def trained_models(manifest):
    """One quick baseline model per label group, shared across tests."""
    models = {}
    for part, group, patterns in [
        ("cover", "cover", COVER_PATTERNS),
        ("main", "traditional", TRADITIONAL_PATTERNS),
        ("main", "new", None),
    ]:
        examples = synthetic.generate(500, seed=21, patterns=patterns, part=part)
        train_set, dev_set, _ = split(examples, seed=9)
        if part == "cover":
            config = manifest.config("baseline", part="cover", seed=0)
        else:
            config = manifest.config("baseline", part="main", label_group=group, seed=0)
        models[group] = train(config, train_set, dev_set)
    return models


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory, synthetic_examples):
    from refcase.models import build_tiny_checkpoint

    corpus = [e.text for e in synthetic_examples[:200]]
    return build_tiny_checkpoint(corpus, tmp_path_factory.mktemp("ckpt") / "tiny")
