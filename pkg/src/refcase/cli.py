"""Command-line interface: thin client over the library and HTTP service."""

from __future__ import annotations

import json
import logging
import shutil
from datetime import date
from pathlib import Path

import click

from . import dataset as dataset_lib
from . import parsing, synthetic, terminology
from .extraction import build_database
from .models import config as model_config
from .models.train import load_model, save_model
from .models.train import train as train_model
from .models.cnn import pretrain_contextual
from .retrieval import (
    DEFAULT_ENDPOINT,
    RetrievalClient,
    load_corpus,
    save_corpus,
    write_failure_manifest,
)
from .vectors import fine_tune_static_vectors

logger = logging.getLogger(__name__)


def _iso(value: str, name: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise click.ClickException(f"{name} must be a YYYY-MM-DD date, got {value!r}")


@click.group()
@click.option("--verbose", is_flag=True, help="Log debug detail.")
def main(verbose: bool) -> None:
    """Retrieve, parse, label, train on, and search refugee case law."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--from", "start", required=True, help="Window start, YYYY-MM-DD.")
@click.option("--to", "end", required=True, help="Window end, YYYY-MM-DD.")
@click.option("--collection", default="cisr", show_default=True, help="Collection code.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Corpus directory.")
@click.option("--fixture", default=None, help="Alternate search endpoint (fixture server).")
@click.option("--keyword", default="REFUGEE", show_default=True, help="Exact-match keyword.")
@click.option("--delay", default=1.0, show_default=True, help="Seconds between requests.")
def harvest(start, end, collection, out_dir, fixture, keyword, delay) -> None:
    """Download every decision in a date range, with metadata."""
    client = RetrievalClient(
        base_endpoint=fixture or DEFAULT_ENDPOINT, request_delay=delay
    )
    result = client.harvest(_iso(start, "--from"), _iso(end, "--to"), collection, keyword)
    out = Path(out_dir)
    save_corpus(result.documents, out)
    if result.failures:
        write_failure_manifest(result.failures, out / "failures.jsonl")
    click.echo(
        f"harvested {len(result.documents)} cases in {result.pages_fetched} page fetches"
        f" ({len(result.failures)} failures)"
    )


@main.command()
@click.option("--in", "in_dir", required=True, type=click.Path(exists=True),
              help="Corpus directory from harvest.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Table directory.")
def preprocess(in_dir, out_dir) -> None:
    """Parse covers and main text into covers.csv and sentences.csv."""
    documents = load_corpus(in_dir)
    covers, sentences = [], []
    skipped = 0
    for doc in documents:
        try:
            cover, doc_sentences = parsing.preprocess_document(doc)
        except parsing.ParseError as exc:
            logger.warning("skipping %s: %s", doc.case_id, exc)
            skipped += 1
            continue
        covers.append(cover)
        sentences.extend(doc_sentences)
    parsing.emit_tables(covers, sentences, out_dir)
    metadata = Path(in_dir) / "metadata.jsonl"
    if metadata.exists():
        shutil.copy(metadata, Path(out_dir) / "metadata.jsonl")
    click.echo(
        f"parsed {len(covers)} covers and {len(sentences)} sentences"
        f" ({skipped} documents skipped)"
    )


@main.group(name="terminology")
def terminology_group() -> None:
    """Terminology base commands."""


@terminology_group.command(name="build")
@click.option("--seeds", "seeds_file", required=True, type=click.Path(exists=True),
              help="JSON file with keywords, lawyer_flags, and label_map.")
@click.option("--emb", "emb_file", required=True, type=click.Path(exists=True),
              help="Embedding table file.")
@click.option("--threshold", default=0.70, show_default=True, help="Cosine cutoff.")
@click.option("--stoplist", "stoplist_file", default=None, type=click.Path(exists=True),
              help="One stopword per line; defaults to the bundled list.")
@click.option("--out", "out_file", required=True, type=click.Path(), help="Pattern file.")
@click.option("--review", "review_file", default=None, type=click.Path(),
              help="Where unmapped phrases go (default: <out>.review.jsonl).")
def terminology_build(seeds_file, emb_file, threshold, stoplist_file, out_file, review_file):
    """Assemble seeds, expand by cosine similarity, write patterns."""
    from importlib import resources

    raw = json.loads(Path(seeds_file).read_text(encoding="utf-8"))
    if stoplist_file:
        stop_text = Path(stoplist_file).read_text(encoding="utf-8")
    else:
        stop_text = (
            resources.files("refcase").joinpath("data", "stoplist.txt")
            .read_text(encoding="utf-8")
        )
    stoplist = [line.strip() for line in stop_text.splitlines() if line.strip()]
    review = Path(review_file) if review_file else Path(out_file).with_suffix(".review.jsonl")
    try:
        seeds = terminology.assemble_seeds(
            raw.get("keywords", []),
            raw.get("lawyer_flags", []),
            stoplist,
            raw.get("label_map", {}),
            review_file=review,
        )
        table = terminology.EmbeddingTable.load(emb_file)
        patterns = terminology.expand(seeds, table, threshold=threshold)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    terminology.write_patterns(patterns, out_file)
    click.echo(f"wrote {len(patterns)} patterns to {out_file}")


@main.group(name="dataset")
def dataset_group() -> None:
    """Annotated dataset commands."""


@dataset_group.command(name="split")
@click.option("--in", "in_file", required=True, type=click.Path(exists=True),
              help="Annotated examples, one JSON object per line.")
@click.option("--seed", default=17, show_default=True, help="Shuffle seed.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Split directory.")
@click.option("--by-case", is_flag=True, help="Split at case level instead of example level.")
def dataset_split(in_file, seed, out_dir, by_case) -> None:
    """Shuffle and split examples into train/dev/test."""
    examples = dataset_lib.read_jsonl(in_file)
    try:
        train, dev, test = dataset_lib.split(examples, seed=seed, by_case=by_case)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", train), ("dev", dev), ("test", test)):
        dataset_lib.write_jsonl(part, out / f"{name}.jsonl")
    click.echo(f"split {len(examples)} examples into {len(train)}/{len(dev)}/{len(test)}")


@main.command()
@click.option("--config", "cell", required=True, help="Matrix cell name (see the manifest).")
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True),
              help="Directory with train.jsonl and dev.jsonl.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Model directory.")
@click.option("--part", default="main", show_default=True,
              type=click.Choice(["cover", "main"]))
@click.option("--group", default=None, type=click.Choice(["traditional", "new"]),
              help="Label group; required for main-text models.")
@click.option("--seed", default=0, show_default=True)
@click.option("--static-vectors", "vectors_file", default=None, type=click.Path(exists=True),
              help="Vector table for fine_tuned cells; derived from the training text if omitted.")
@click.option("--manifest", "manifest_file", default=None, type=click.Path(exists=True),
              help="Experiment manifest; defaults to the bundled one.")
@click.option("--checkpoint", default=None,
              help="Override the transformer checkpoint (alias, hub id, or local path).")
def train(cell, data_dir, out_dir, part, group, seed, vectors_file, manifest_file, checkpoint):
    """Train one architecture-matrix cell and save its artifact."""
    manifest = model_config.load_manifest(manifest_file)
    try:
        cfg = manifest.config(cell, part=part, label_group=group, seed=seed)
        if checkpoint and cfg.encoder == "transformer":
            cfg = model_config.ModelConfig.from_dict(
                {**cfg.to_dict(), "transformer_checkpoint": checkpoint}
            )
    except ValueError as exc:
        raise click.ClickException(str(exc))
    data = Path(data_dir)
    train_set = dataset_lib.read_jsonl(data / "train.jsonl")
    dev_set = dataset_lib.read_jsonl(data / "dev.jsonl")
    defaults = model_config.load_training_defaults()

    static_table = None
    if cfg.static_vectors == "fine_tuned":
        if vectors_file:
            static_table = terminology.EmbeddingTable.load(vectors_file)
        else:
            logger.info("no --static-vectors given; fine-tuning on the training text")
            static_table = fine_tune_static_vectors(
                [ex.text for ex in train_set],
                terminology.EmbeddingTable(50),
                dim=50,
                seed=seed,
            )
    pretrained = None
    if cfg.contextual_pretraining:
        pretrained = pretrain_contextual(
            [ex.text for ex in train_set], cfg, defaults
        )
    try:
        model = train_model(
            cfg, train_set, dev_set, defaults,
            static_table=static_table, pretrained=pretrained,
        )
    except ValueError as exc:
        raise click.ClickException(str(exc))
    save_model(model, out_dir)
    click.echo(
        f"trained {cell} ({cfg.part}/{cfg.label_group}): "
        f"best dev micro-F1 {model.metadata['best_dev_f1']:.4f} "
        f"at epoch {model.metadata['best_epoch']}"
    )


@main.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True),
              help="Preprocess output (covers.csv, sentences.csv, metadata.jsonl).")
@click.option("--models", "models_dir", required=True, type=click.Path(exists=True),
              help="Directory with cover/, traditional/, and new/ model artifacts.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Database directory.")
@click.option("--resume/--no-resume", default=True, show_default=True,
              help="Skip cases already present in the output database.")
def extract(corpus_dir, models_dir, out_dir, resume) -> None:
    """Run the trained models over a corpus and write the case database."""
    corpus = Path(corpus_dir)
    covers_list, sentences_list = parsing.read_tables(corpus)
    covers = {c.case_id: c.text for c in covers_list}
    sentences: dict[str, list[tuple[int, str]]] = {}
    for s in sentences_list:
        sentences.setdefault(s.case_id, []).append((s.sentence_index, s.text))
    dates = {}
    metadata = corpus / "metadata.jsonl"
    if metadata.exists():
        for line in metadata.read_text(encoding="utf-8").splitlines():
            if line.strip():
                row = json.loads(line)
                dates[row["case_id"]] = row.get("decision_date", "")
    models = Path(models_dir)
    try:
        records = build_database(
            covers,
            sentences,
            dates,
            cover_model=load_model(models / "cover"),
            traditional_model=load_model(models / "traditional"),
            new_label_model=load_model(models / "new"),
            out_dir=out_dir,
            resume=resume,
        )
    except (ValueError, FileNotFoundError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"extracted {len(records)} cases into {out_dir}")


@main.command()
@click.option("--gold", "gold_file", required=True, type=click.Path(exists=True),
              help="Gold annotations in the exchange format.")
@click.option("--model", "model_dirs", multiple=True, required=True,
              type=click.Path(exists=True), help="Model artifact directory (repeatable).")
@click.option("--baseline", default=None,
              help="Architecture name whose F1 the deltas compare against.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Report directory.")
def evaluate(gold_file, model_dirs, baseline, out_dir) -> None:
    """Score models against gold annotations and render the report grid."""
    from .evaluation import compare_to_baseline, render, score

    gold = dataset_lib.read_jsonl(gold_file)
    reports = []
    for model_dir in model_dirs:
        model = load_model(model_dir)
        predictions = [model.predict(ex.text) for ex in gold]
        reports.append(
            score(gold, predictions, architecture=Path(model_dir).name,
                  part=model.config.part)
        )
    if baseline:
        base = next((r for r in reports if r.architecture == baseline), None)
        if base is None:
            raise click.ClickException(f"no --model named {baseline!r}")
        reports = [compare_to_baseline(r, base) for r in reports]
    _, grid = render(reports, out_dir)
    click.echo(grid)


@main.command()
@click.option("--db", "db_dir", required=True, type=click.Path(exists=True),
              help="Database directory from extract.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--frontend", "frontend_dir", default=None, type=click.Path(),
              help="Built UI directory to serve under /ui.")
def serve(db_dir, host, port, frontend_dir) -> None:
    """Serve the search API (and optionally the UI) over HTTP."""
    import uvicorn

    from .service import create_app

    app = create_app(db_dir=db_dir, frontend_dir=frontend_dir)
    uvicorn.run(app, host=host, port=port)


@main.command(name="synthetic")
@click.option("--out", "out_file", required=True, type=click.Path(), help="Output jsonl.")
@click.option("--n", "n_sentences", default=500, show_default=True)
@click.option("--seed", default=13, show_default=True)
@click.option("--part", type=click.Choice(["cover", "main"]), default="main",
              show_default=True)
@click.option("--group", "label_group", type=click.Choice(["traditional", "new"]),
              default="new", show_default=True,
              help="Main-text label group to inject; ignored for covers.")
def synthetic_cmd(out_file, n_sentences, seed, part, label_group) -> None:
    """Generate the deterministic pattern-injected demo corpus."""
    examples = synthetic.generate(
        n_sentences=n_sentences, seed=seed, part=part, label_group=label_group
    )
    dataset_lib.write_jsonl(examples, out_file)
    click.echo(f"wrote {len(examples)} synthetic {part} sentences to {out_file}")


@main.command(name="fixture-server")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8100, show_default=True)
@click.option("--catalog", "catalog_dir", default=None, type=click.Path(exists=True),
              help="Catalog directory; defaults to the bundled demo corpus.")
def fixture_server_cmd(host, port, catalog_dir) -> None:
    """Serve the offline demo corpus so harvest can run without network access."""
    from .fixture_server import FixtureCatalog, FixtureServer

    catalog = (
        FixtureCatalog.from_dir(catalog_dir) if catalog_dir else FixtureCatalog.bundled()
    )
    server = FixtureServer(catalog, host=host, port=port).start()
    click.echo(f"serving {len(catalog.stubs)} result stubs at {server.base_endpoint}")
    click.echo("press Ctrl+C to stop")
    try:
        server._thread.join()
    except KeyboardInterrupt:
        server.stop()


if __name__ == "__main__":
    main()
