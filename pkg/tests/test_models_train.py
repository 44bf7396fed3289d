from __future__ import annotations

import pytest

from refcase import synthetic
from refcase.dataset import LabeledSentence, Span, split
from refcase.models import (
    ModelConfig,
    TrainingDefaults,
    load_model,
    pretrain_contextual,
    save_model,
    train,
)

FAST = TrainingDefaults(max_epochs=8, patience=3, batch_size=32, dropout=0.1, version=1)


@pytest.fixture(scope="module")
def small_data():
    examples = synthetic.generate(300, seed=23)
    return split(examples, seed=5)


def test_cnn_baseline_trains_and_predicts(small_data, manifest):
    train_set, dev_set, _ = small_data
    config = manifest.config("baseline", part="main", label_group="new", seed=0)
    model = train(config, train_set, dev_set)
    assert model.metadata["epochs_run"] >= 1
    assert model.metadata["best_dev_f1"] >= 0.0
    spans = model.predict(train_set[0].text)
    for span in spans:
        assert 0 <= span.start < span.end <= len(train_set[0].text)
        assert span.label in config.labels
    assert model.predict("") == []


def test_cnn_training_is_seed_deterministic(small_data, manifest):
    train_set, dev_set, _ = small_data
    config = manifest.config("baseline", part="main", label_group="new", seed=4)
    a = train(config, train_set, dev_set, defaults=FAST)
    b = train(config, train_set, dev_set, defaults=FAST)
    assert a.metadata == b.metadata
    probe = dev_set[0].text
    assert a.predict(probe) == b.predict(probe)


def test_cnn_save_load_round_trip(small_data, manifest, tmp_path):
    train_set, dev_set, _ = small_data
    config = manifest.config("baseline", part="main", label_group="new", seed=0)
    model = train(config, train_set, dev_set, defaults=FAST)
    out = save_model(model, tmp_path / "model")
    loaded = load_model(out)
    assert loaded.config == model.config
    assert loaded.labels == model.labels
    for example in dev_set[:10]:
        assert loaded.predict(example.text) == model.predict(example.text)


def test_cnn_static_vector_cells_train(small_data, manifest):
    train_set, dev_set, _ = small_data
    rsv = manifest.config("cnn-rsv", part="main", label_group="new", seed=0)
    model = train(rsv, train_set, dev_set, defaults=FAST)
    assert model.predict(dev_set[0].text) is not None


def test_cnn_fine_tuned_cell_uses_supplied_table(small_data, manifest):
    from refcase.terminology import EmbeddingTable
    from refcase.vectors import fine_tune_static_vectors

    train_set, dev_set, _ = small_data
    table = fine_tune_static_vectors(
        [e.text for e in train_set], EmbeddingTable(50), dim=50, epochs=2, seed=0
    )
    fts = manifest.config("cnn-fts", part="main", label_group="new", seed=0)
    model = train(fts, train_set, dev_set, defaults=FAST, static_table=table)
    assert model.predict(dev_set[0].text) is not None


def test_pretraining_artifact_round_trip(small_data, manifest, tmp_path):
    train_set, dev_set, _ = small_data
    config = manifest.config("cnn-rsv-pt", part="main", label_group="new", seed=0)
    corpus = [e.text for e in train_set]
    artifact = pretrain_contextual(corpus, config, FAST, epochs=1)
    assert artifact["vocab"]
    assert artifact["encoder_state"]
    model = train(config, train_set, dev_set, defaults=FAST, pretrained=artifact)
    out = save_model(model, tmp_path / "pt-model")
    loaded = load_model(out)
    assert loaded.predict(dev_set[0].text) == model.predict(dev_set[0].text)


def test_pretraining_mismatch_is_rejected(small_data, manifest):
    train_set, dev_set, _ = small_data
    pt_config = manifest.config("cnn-rsv-pt", part="main", label_group="new", seed=0)
    plain_config = manifest.config("baseline", part="main", label_group="new", seed=0)
    artifact = pretrain_contextual([e.text for e in train_set], pt_config, FAST, epochs=1)
    with pytest.raises(ValueError):
        train(plain_config, train_set, dev_set, defaults=FAST, pretrained=artifact)
    with pytest.raises(ValueError):
        train(pt_config, train_set, dev_set, defaults=FAST)


def test_pretrain_rejects_non_pretraining_config(small_data, manifest):
    train_set, _, _ = small_data
    config = manifest.config("baseline", part="main", label_group="new", seed=0)
    with pytest.raises(ValueError):
        pretrain_contextual([e.text for e in train_set], config, FAST)


def test_pretrain_rejects_empty_corpus(manifest):
    config = manifest.config("cnn-rsv-pt", part="main", label_group="new", seed=0)
    with pytest.raises(ValueError):
        pretrain_contextual([], config, FAST)


def test_train_rejects_part_mismatch(small_data, manifest):
    train_set, dev_set, _ = small_data
    config = manifest.config("baseline", part="cover", seed=0)
    with pytest.raises(ValueError):
        train(config, train_set, dev_set, defaults=FAST)


def test_train_rejects_labels_outside_group(manifest):
    config = manifest.config("baseline", part="main", label_group="traditional", seed=0)
    bad = [
        LabeledSentence(
            case_id="c",
            text="a passport here",
            spans=[Span(2, 10, "DOC_EVIDENCE")],
            part="main",
        )
    ] * 4
    with pytest.raises(ValueError):
        train(config, bad, bad, defaults=FAST)


def test_train_rejects_invalid_spans(manifest):
    config = manifest.config("baseline", part="main", label_group="new", seed=0)
    bad = [
        LabeledSentence(
            case_id="c",
            text="tiny",
            spans=[Span(0, 99, "DOC_EVIDENCE")],
            part="main",
        )
    ] * 4
    with pytest.raises(ValueError):
        train(config, bad, bad, defaults=FAST)


def test_transformer_trains_and_round_trips(small_data, tiny_checkpoint, tmp_path):
    train_set, dev_set, _ = small_data
    config = ModelConfig(
        part="main",
        label_group="new",
        encoder="transformer",
        transformer_checkpoint=str(tiny_checkpoint),
        seed=0,
    )
    model = train(config, train_set[:80], dev_set[:20], defaults=FAST)
    assert model.metadata["epochs_run"] >= 1
    preds = [model.predict(e.text) for e in dev_set[:5]]
    for spans, example in zip(preds, dev_set[:5]):
        for span in spans:
            assert 0 <= span.start < span.end <= len(example.text)
    out = save_model(model, tmp_path / "tf-model")
    loaded = load_model(out)
    assert [loaded.predict(e.text) for e in dev_set[:5]] == preds
