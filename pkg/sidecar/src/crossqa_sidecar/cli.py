"""Sidecar command line: serve the contracts, run the training procedures."""

from __future__ import annotations

import json
import logging

import click

from .training import (
    ReaderTrainConfig,
    RetrieverTrainConfig,
    load_qa_pairs,
    save_checkpoint,
    train_reader,
    train_retriever,
)

logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@click.group()
def main():
    """Model service and training for the crossqa engine."""


@main.command()
@click.option("--port", default=8901, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--model-dir", default=None, type=click.Path(),
              help="Directory with retriever.pt / reader.pt / marian-* checkpoints.")
def serve(port, host, model_dir):
    """Serve /embed, /extract, /translate."""
    import uvicorn

    from .server import SidecarState, create_app

    app = create_app(SidecarState(model_dir))
    uvicorn.run(app, host=host, port=port, log_level="warning")


def _load_config(path: str | None, cls):
    if path is None:
        return cls()
    with open(path, "r", encoding="utf-8") as fh:
        return cls(**json.load(fh))


@main.command("train-retriever")
@click.option("--train", "train_path", required=True, type=click.Path(exists=True),
              help="QA-pair JSONL (question/answer keys).")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True),
              help="JSON file with RetrieverTrainConfig fields.")
@click.option("--out", "out_path", required=True, type=click.Path())
def train_retriever_cmd(train_path, config_path, out_path):
    config = _load_config(config_path, RetrieverTrainConfig)
    pairs = load_qa_pairs(train_path)
    model, losses = train_retriever(pairs, config)
    save_checkpoint(model, config, out_path)
    click.echo(f"epoch losses: {[round(x, 4) for x in losses]}")
    click.echo(f"checkpoint -> {out_path}")


@main.command("train-reader")
@click.option("--train", "train_path", required=True, type=click.Path(exists=True),
              help="Span JSONL (question/context/answer_start/answer_end).")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True),
              help="JSON file with ReaderTrainConfig fields.")
@click.option("--out", "out_path", required=True, type=click.Path())
def train_reader_cmd(train_path, config_path, out_path):
    config = _load_config(config_path, ReaderTrainConfig)
    rows = load_qa_pairs(train_path)
    model, losses = train_reader(rows, config)
    save_checkpoint(model, config, out_path)
    click.echo(f"epoch losses: {[round(x, 4) for x in losses[-5:]]} (last 5)")
    click.echo(f"checkpoint -> {out_path}")


if __name__ == "__main__":
    main(prog_name="sidecar")
