"""The two training procedures: contrastive retriever, span-extraction reader.

Retriever: every batch treats its own question/answer pairs as positives and
all other answers in the batch as negatives; the loss is the softmax
cross-entropy of each question against the batch's answer inner products
(temperature-free, raw inner products). Reader: cross-entropy over start and
end context positions, with an optional pretraining stage on an auxiliary
dataset before the in-domain one.

Datasets arrive as JSONL files. Retriever rows use the QA-pair schema
(``question``/``answer`` keys); reader rows are
``{"id", "question", "context", "answer_start", "answer_end"}`` with character
offsets into the context. Rows whose span does not line up with the context
are dropped with a log line.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn

from .models import ReaderModel, RetrieverModel, build_encoder, pad_batch, word_tokenize

logger = logging.getLogger(__name__)


@dataclass
class RetrieverTrainConfig:
    encoder: str = "tiny:64x2"
    batch_size: int = 8
    learning_rate: float = 1e-3
    epochs: int = 2
    max_question_words: int = 32
    max_answer_words: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 2:
            raise ValueError("batch_size must be >= 2: in-batch negatives need at least one negative")


@dataclass
class ReaderTrainConfig:
    encoder: str = "tiny:64x2"
    pretrain_path: str | None = None  # auxiliary QA stage before in-domain data
    epochs: int = 30
    pretrain_epochs: int = 5
    learning_rate: float = 1e-3
    batch_size: int = 8
    span_max_words: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.span_max_words < 1:
            raise ValueError("span_max_words must be >= 1")


def load_qa_pairs(path: str | Path) -> list[dict]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(json.loads(line))
    return rows


def in_batch_loss(model: RetrieverModel, questions: list[str], answers: list[str]) -> torch.Tensor:
    """Mean over i of -log softmax_i of the q_i . a_j inner-product matrix."""
    q_vecs, _ = model.embed_texts(questions, normalize=False)
    a_vecs, _ = model.embed_texts(answers, normalize=False)
    scores = q_vecs @ a_vecs.T
    targets = torch.arange(len(questions), device=scores.device)
    return nn.functional.cross_entropy(scores, targets)


def train_retriever(
    pairs: list[dict],
    config: RetrieverTrainConfig | None = None,
) -> tuple[RetrieverModel, list[float]]:
    """Train the unified bi-encoder; returns (model, per-epoch mean loss)."""
    config = config or RetrieverTrainConfig()
    if not pairs:
        raise ValueError("no training pairs")
    rng = random.Random(config.seed)
    torch.manual_seed(config.seed)
    encoder = build_encoder(config.encoder, seed=config.seed)
    model = RetrieverModel(encoder, max_words=config.max_answer_words)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)

    epoch_losses: list[float] = []
    order = list(range(len(pairs)))
    for epoch in range(config.epochs):
        rng.shuffle(order)
        model.train()
        batch_losses = []
        for lo in range(0, len(order), config.batch_size):
            batch = [pairs[i] for i in order[lo:lo + config.batch_size]]
            if len(batch) < 2:
                continue
            loss = in_batch_loss(
                model,
                [row["question"] for row in batch],
                [row["answer"] for row in batch],
            )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            batch_losses.append(float(loss.detach()))
        mean = sum(batch_losses) / len(batch_losses)
        epoch_losses.append(mean)
        logger.info("retriever epoch %d: loss %.4f", epoch, mean)
    model.eval()
    return model, epoch_losses


def retriever_validation_loss(model: RetrieverModel, pairs: list[dict],
                              batch_size: int = 8) -> float:
    model.eval()
    losses = []
    with torch.no_grad():
        for lo in range(0, len(pairs), batch_size):
            batch = pairs[lo:lo + batch_size]
            if len(batch) < 2:
                continue
            losses.append(float(in_batch_loss(
                model, [r["question"] for r in batch], [r["answer"] for r in batch]
            )))
    return sum(losses) / len(losses)


def align_span_to_words(context: str, answer_start: int, answer_end: int,
                        max_context_words: int) -> tuple[int, int] | None:
    """Char offsets -> (start word index, end word index), or None if the span
    falls outside the tokenized (possibly truncated) context."""
    words = word_tokenize(context)[:max_context_words]
    start_word = end_word = None
    for idx, (_, s, e) in enumerate(words):
        if s <= answer_start < e:
            start_word = idx
        if s < answer_end <= e:
            end_word = idx
    if start_word is None or end_word is None or end_word < start_word:
        return None
    return start_word, end_word


@dataclass
class _ReaderExample:
    ids: list[int]
    start_target: int
    end_target: int


def _prepare_reader_examples(model: ReaderModel, rows: list[dict]) -> list[_ReaderExample]:
    examples = []
    for row in rows:
        aligned = align_span_to_words(
            row["context"], int(row["answer_start"]), int(row["answer_end"]),
            model.max_context_words,
        )
        if aligned is None:
            logger.warning("dropping example %s: span outside tokenized context",
                           row.get("id", "?"))
            continue
        ids, _, offset, _ = model.build_input(row["question"], row["context"])
        examples.append(_ReaderExample(
            ids=ids,
            start_target=offset + aligned[0],
            end_target=offset + aligned[1],
        ))
    return examples


def _reader_epoch(model: ReaderModel, examples: list[_ReaderExample],
                  optimizer, batch_size: int, rng: random.Random) -> float:
    order = list(range(len(examples)))
    rng.shuffle(order)
    model.train()
    losses = []
    for lo in range(0, len(order), batch_size):
        batch = [examples[i] for i in order[lo:lo + batch_size]]
        ids, mask = pad_batch([ex.ids for ex in batch])
        start_logits, end_logits = model(ids, mask)
        start_targets = torch.tensor([ex.start_target for ex in batch])
        end_targets = torch.tensor([ex.end_target for ex in batch])
        loss = (nn.functional.cross_entropy(start_logits, start_targets)
                + nn.functional.cross_entropy(end_logits, end_targets))
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        losses.append(float(loss.detach()))
    return sum(losses) / len(losses)


def train_reader(
    rows: list[dict],
    config: ReaderTrainConfig | None = None,
) -> tuple[ReaderModel, list[float]]:
    """Train span extraction; optional pretraining stage runs first.

    The pretraining flag changes only the training schedule: the returned
    model serves the same wire contract either way.
    """
    config = config or ReaderTrainConfig()
    if not rows:
        raise ValueError("no training examples")
    torch.manual_seed(config.seed)
    rng = random.Random(config.seed)
    encoder = build_encoder(config.encoder, seed=config.seed)
    model = ReaderModel(encoder)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)

    losses: list[float] = []
    if config.pretrain_path:
        pre_rows = load_qa_pairs(config.pretrain_path)
        pre_examples = _prepare_reader_examples(model, pre_rows)
        if not pre_examples:
            raise ValueError("pretraining dataset produced no usable examples")
        for epoch in range(config.pretrain_epochs):
            loss = _reader_epoch(model, pre_examples, optimizer, config.batch_size, rng)
            logger.info("reader pretrain epoch %d: loss %.4f", epoch, loss)

    examples = _prepare_reader_examples(model, rows)
    if not examples:
        raise ValueError("training dataset produced no usable examples")
    for epoch in range(config.epochs):
        loss = _reader_epoch(model, examples, optimizer, config.batch_size, rng)
        losses.append(loss)
        logger.info("reader epoch %d: loss %.4f", epoch, loss)
    model.eval()
    return model, losses


def save_checkpoint(model: nn.Module, config, path: str | Path) -> None:
    torch.save({"state_dict": model.state_dict(), "config": config.__dict__}, path)


def load_retriever(path: str | Path) -> RetrieverModel:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    config = RetrieverTrainConfig(**payload["config"])
    encoder = build_encoder(config.encoder, seed=config.seed)
    model = RetrieverModel(encoder, max_words=config.max_answer_words)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model


def load_reader(path: str | Path) -> ReaderModel:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    config = ReaderTrainConfig(**payload["config"])
    encoder = build_encoder(config.encoder, seed=config.seed)
    model = ReaderModel(encoder)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model
