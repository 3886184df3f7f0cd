"""Command-line interface: ingest, index, search, datasets, eval, serve."""

from __future__ import annotations

import json
from pathlib import Path

import click

from . import corpus as corpus_mod
from . import dataset as dataset_mod
from . import dense as dense_mod
from . import lexical as lexical_mod
from .embedding import RemoteEmbeddingProvider, provider_from_env
from .evaluation import EvalConfig, format_benchmark_table, reading_metrics, run_retrieval_benchmark
from .extraction import extractor_from_env
from .translation import translator_from_env


@click.group()
def main():
    """Cross-lingual open-retrieval question answering engine."""


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", "store_dir", required=True, type=click.Path())
def ingest(corpus_path, store_dir):
    """Ingest a JSONL corpus file into a store directory."""
    corp, stats, rejected = corpus_mod.ingest_corpus_file(corpus_path)
    corpus_mod.save_store(corp, store_dir)
    click.echo(f"stored {stats.total} documents in {store_dir}")
    for line_no, reason in rejected:
        click.echo(f"rejected line {line_no}: {reason}", err=True)
    if rejected:
        click.echo(f"{len(rejected)} records rejected", err=True)


@main.command()
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
def stats(store_dir):
    """Print corpus statistics for a store directory."""
    corp = corpus_mod.load_store(store_dir)
    click.echo(json.dumps(corp.stats().to_dict(), indent=2, ensure_ascii=False))


def _embedder(embed_endpoint: str | None):
    if embed_endpoint:
        return RemoteEmbeddingProvider(embed_endpoint)
    return provider_from_env()


@main.group()
def index():
    """Dense vector index commands."""


@index.command("build")
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--embed-endpoint", default=None, help="Embedding service URL; default stub/env.")
def index_build(store_dir, out_path, embed_endpoint):
    """Embed every document body and build the flat inner-product index."""
    from .service import embed_corpus

    corp = corpus_mod.load_store(store_dir)
    embedder = _embedder(embed_endpoint)
    idx = dense_mod.build_dense_index(embed_corpus(corp, embedder))
    dense_mod.save_index(idx, out_path)
    click.echo(f"indexed {len(idx)} documents (dim {idx.dim}) -> {out_path}")


@index.command("search")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--query", required=True)
@click.option("-k", "k", default=5, show_default=True)
@click.option("--embed-endpoint", default=None)
def index_search(index_path, query, k, embed_endpoint):
    """Top-k documents by inner product for an encoded query."""
    idx = dense_mod.load_index(index_path)
    embedder = _embedder(embed_endpoint)
    vec = embedder.embed_batch([query], role="query")[0]
    for hit in dense_mod.mips_search(idx, vec, k):
        click.echo(f"{hit.rank}\t{hit.doc_id}\t{hit.score:.6f}")


@main.group()
def bm25():
    """BM25 inverted index commands."""


@bm25.command("build")
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--k1", default=1.2, show_default=True)
@click.option("--b", default=0.75, show_default=True)
def bm25_build(store_dir, out_path, k1, b):
    corp = corpus_mod.load_store(store_dir)
    idx = lexical_mod.build_inverted_index(corp, lexical_mod.Bm25Params(k1=k1, b=b))
    lexical_mod.save_bm25(idx, out_path)
    click.echo(f"indexed {idx.n_docs} documents, {len(idx.postings)} terms -> {out_path}")


@bm25.command("search")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--query", required=True)
@click.option("--translations", default=None,
              help='JSON map lang -> translated query; triggers federated search.')
@click.option("-k", "k", default=5, show_default=True)
def bm25_search_cmd(index_path, query, translations, k):
    """Plain BM25, or federated across translated query variants."""
    idx = lexical_mod.load_bm25(index_path)
    if translations:
        query_by_lang = json.loads(translations)
        hits = lexical_mod.federated_search(idx, query_by_lang, k)
    else:
        hits = lexical_mod.bm25_search(idx, lexical_mod.tokenize(query), k)
    for hit in hits:
        click.echo(f"{hit.rank}\t{hit.doc_id}\t{hit.score:.6f}")


@main.group()
def dataset():
    """QA dataset generation, filtering, statistics."""


@dataset.command("en2all")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--langs", default=",".join(dataset_mod.EN2ALL_TARGET_LANGS), show_default=True)
def dataset_en2all(in_path, out_path, langs):
    """Generate cross-lingual pairs by translating answers (and questions)."""
    pairs, rejected = dataset_mod.load_dataset(in_path)
    for line_no, reason in rejected:
        click.echo(f"rejected line {line_no}: {reason}", err=True)
    translator = translator_from_env()
    generated = dataset_mod.generate_en2all(pairs, translator, langs.split(","))
    dataset_mod.save_dataset(generated, out_path)
    click.echo(f"wrote {len(generated)} pairs ({len(pairs)} originals) -> {out_path}")


@dataset.command("filter")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--mode", type=click.Choice(["fixed", "quantile"]), default="fixed", show_default=True)
@click.option("--threshold", default=0.85, show_default=True, help="Fixed-mode cutoff.")
@click.option("--target", default=1.0 / 3.0, show_default=True, help="Quantile-mode removal fraction.")
def dataset_filter(in_path, out_path, mode, threshold, target):
    """Drop translated pairs whose answers drifted from their originals."""
    pairs, rejected = dataset_mod.load_dataset(in_path)
    for line_no, reason in rejected:
        click.echo(f"rejected line {line_no}: {reason}", err=True)
    config = dataset_mod.FilterConfig(
        mode="fixed_threshold" if mode == "fixed" else "removal_quantile",
        threshold=threshold,
        target_removal=target,
    )
    kept, report = dataset_mod.filter_translations(pairs, provider_from_env(), config)
    dataset_mod.save_dataset(kept, out_path)
    click.echo(json.dumps(report.to_dict(), indent=2))
    click.echo(f"kept {len(kept)} pairs -> {out_path}")


@dataset.command("stats")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
def dataset_stats_cmd(in_path):
    pairs, rejected = dataset_mod.load_dataset(in_path)
    for line_no, reason in rejected:
        click.echo(f"rejected line {line_no}: {reason}", err=True)
    click.echo(json.dumps(dataset_mod.dataset_stats(pairs).to_dict(), indent=2, ensure_ascii=False))


@main.group()
def eval():
    """Retrieval and reading-comprehension evaluation."""


@eval.command("retrieval")
@click.option("--systems", default="dense,bm25,bm25-federated", show_default=True)
@click.option("--queries", "queries_path", required=True, type=click.Path(exists=True))
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("-k", "k_values", default="5,100", show_default=True)
@click.option("--tau", default=0.65, show_default=True)
@click.option("--out", "out_path", default=None, type=click.Path())
@click.option("--dense-index", "dense_path", default=None, type=click.Path(exists=True))
@click.option("--bm25-index", "bm25_path", default=None, type=click.Path(exists=True))
@click.option("--embed-endpoint", default=None)
def eval_retrieval(systems, queries_path, store_dir, k_values, tau, out_path,
                   dense_path, bm25_path, embed_endpoint):
    """Compare retrieval systems with FM@k over a query dataset.

    Queries come from a QA-pair JSONL file; the pair's answer is the fuzzy
    reference. Indexes are loaded when given, otherwise built from the store.
    Federated BM25 translates queries through the configured translator.
    """
    from .service import embed_corpus

    corp = corpus_mod.load_store(store_dir)
    embedder = _embedder(embed_endpoint)
    pairs, rejected = dataset_mod.load_dataset(queries_path)
    for line_no, reason in rejected:
        click.echo(f"rejected line {line_no}: {reason}", err=True)
    ks = tuple(sorted(int(k) for k in k_values.split(",")))
    config = EvalConfig(k_values=ks, fm_threshold=tau)
    max_k = max(ks)

    wanted = [name.strip() for name in systems.split(",") if name.strip()]
    system_fns = {}
    if "dense" in wanted:
        didx = dense_mod.load_index(dense_path) if dense_path else \
            dense_mod.build_dense_index(embed_corpus(corp, embedder))
        system_fns["dense"] = lambda q: [
            h.doc_id for h in dense_mod.mips_search(didx, embedder.embed_batch([q], "query")[0], max_k)
        ]
    if "bm25" in wanted or "bm25-federated" in wanted:
        lidx = lexical_mod.load_bm25(bm25_path) if bm25_path else lexical_mod.build_inverted_index(corp)
        if "bm25" in wanted:
            system_fns["bm25"] = lambda q: [
                h.doc_id for h in lexical_mod.bm25_search(lidx, lexical_mod.tokenize(q), max_k)
            ]
        if "bm25-federated" in wanted:
            translator = translator_from_env()
            langs = sorted(lidx.languages)

            def federated(q: str) -> list[str]:
                variants = {lang: translator.translate([q], "en", lang)[0] for lang in langs}
                return [h.doc_id for h in lexical_mod.federated_search(lidx, variants, max_k)]

            system_fns["bm25-federated"] = federated
    unknown = [name for name in wanted if name not in system_fns]
    if unknown:
        raise click.UsageError(f"unknown systems: {', '.join(unknown)}")

    reports = run_retrieval_benchmark(system_fns, pairs, corp, embedder, config)
    click.echo(format_benchmark_table(reports))
    if out_path:
        payload = [{"system": name, **report.to_dict()} for name, report in reports.items()]
        Path(out_path).write_text(json.dumps(payload, indent=2), encoding="utf-8")
        click.echo(f"report -> {out_path}")


def _load_answers(path: str) -> dict[str, tuple[str, str]]:
    """JSONL with keys id, answer, optional lang; returns id -> (answer, lang)."""
    out: dict[str, tuple[str, str]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            out[str(obj["id"])] = (str(obj["answer"]), str(obj.get("lang", "en")))
    return out


@eval.command("reading")
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True))
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path())
def eval_reading(pred_path, gold_path, out_path):
    """EM/F1 between prediction and gold JSONL files, aligned by id."""
    preds = _load_answers(pred_path)
    golds = _load_answers(gold_path)
    missing = sorted(set(golds) - set(preds))
    if missing:
        raise click.UsageError(f"predictions missing for ids: {', '.join(missing[:5])}")
    ids = sorted(golds)
    report = reading_metrics(
        [preds[i][0] for i in ids],
        [golds[i][0] for i in ids],
        [golds[i][1] for i in ids],
    )
    click.echo(f"EM {report.em:.4f}  F1 {report.f1:.4f}  ({len(ids)} examples)")
    if out_path:
        payload = report.to_dict()
        payload["ids"] = ids
        Path(out_path).write_text(json.dumps(payload, indent=2), encoding="utf-8")
        click.echo(f"report -> {out_path}")


@main.command()
@click.option("--port", default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True))
@click.option("--dense-index", "dense_path", default=None, type=click.Path(exists=True))
@click.option("--bm25-index", "bm25_path", default=None, type=click.Path(exists=True))
@click.option("--static-dir", default=None, type=click.Path(exists=True),
              help="Directory of built UI assets to serve at /.")
@click.option("--embed-endpoint", default=None)
def serve(port, host, store_dir, dense_path, bm25_path, static_dir, embed_endpoint):
    """Start the HTTP service over a store (building indexes if not given)."""
    import uvicorn

    from .service import EngineSnapshot, SearchService, create_app, embed_corpus

    corp = corpus_mod.load_store(store_dir)
    embedder = _embedder(embed_endpoint)
    didx = dense_mod.load_index(dense_path) if dense_path else \
        dense_mod.build_dense_index(embed_corpus(corp, embedder))
    lidx = lexical_mod.load_bm25(bm25_path) if bm25_path else None
    snapshot = EngineSnapshot(
        corpus=corp,
        dense_index=didx,
        embedder=embedder,
        extractor=extractor_from_env(),
        translator=translator_from_env(),
        bm25_index=lidx,
    )
    app = create_app(SearchService(snapshot), static_dir=static_dir)
    click.echo(f"serving {len(corp)} documents on {host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main(prog_name="crossqa")
