"""Training procedures: contrastive retriever and span-extraction reader."""

import json
import math
import random
import subprocess
import sys

import pytest
import torch

from crossqa_sidecar.models import RetrieverModel, build_encoder, predict_spans
from crossqa_sidecar.training import (
    ReaderTrainConfig,
    RetrieverTrainConfig,
    in_batch_loss,
    load_reader,
    load_retriever,
    retriever_validation_loss,
    save_checkpoint,
    train_reader,
    train_retriever,
)


def clean_pair(i):
    return {
        "question": f"what does study {i} say about topic{i}",
        "answer": f"study {i} shows topic{i} changes outcome{i} strongly",
    }


def span_row(i):
    context = (
        f"intro words here about item{i}. "
        f"the answer for case {i} is value{i} exactly. trailing remark."
    )
    start = context.index(f"value{i}")
    return {
        "id": f"r{i}",
        "question": f"what is the answer for case {i}",
        "context": context,
        "answer_start": start,
        "answer_end": start + len(f"value{i}"),
    }


class TestRetriever:
    def test_batch_size_floor(self):
        with pytest.raises(ValueError, match="batch_size"):
            RetrieverTrainConfig(batch_size=1)

    def test_overfit_loss_strictly_decreases(self):
        pairs = [clean_pair(i) for i in range(16)]
        _, losses = train_retriever(pairs, RetrieverTrainConfig(batch_size=8, epochs=2, seed=0))
        assert len(losses) == 2
        assert losses[1] < losses[0]

    def test_identical_answers_loss_is_log_batch(self):
        model = RetrieverModel(build_encoder("tiny:64x2", seed=3))
        model.eval()
        with torch.no_grad():
            loss = in_batch_loss(
                model, [f"question {i}" for i in range(4)], ["same answer text"] * 4
            )
        assert float(loss) == pytest.approx(math.log(4), abs=1e-5)

    def test_empty_training_set_rejected(self):
        with pytest.raises(ValueError):
            train_retriever([], RetrieverTrainConfig())

    def test_filtered_data_beats_corrupted_data(self):
        """Controlled corruption: mixing mismatched pairs into training hurts
        validation loss; dropping them (as the alignment filter would) helps."""
        rng = random.Random(42)
        train_clean = [clean_pair(i) for i in range(48)]
        corrupted = [
            {
                "question": f"what does study {i} say about topic{i}",
                "answer": " ".join(f"junk{rng.randint(0, 9999)}" for _ in range(7)),
            }
            for i in range(100, 148)
        ]
        val = [clean_pair(i) for i in range(200, 216)]
        config = RetrieverTrainConfig(batch_size=8, epochs=4, seed=1)
        filtered_model, _ = train_retriever(train_clean, config)
        unfiltered_model, _ = train_retriever(train_clean + corrupted, config)
        assert retriever_validation_loss(filtered_model, val) < \
            retriever_validation_loss(unfiltered_model, val)

    def test_checkpoint_round_trip(self, tmp_path):
        pairs = [clean_pair(i) for i in range(8)]
        config = RetrieverTrainConfig(batch_size=4, epochs=1, seed=5)
        model, _ = train_retriever(pairs, config)
        path = tmp_path / "retriever.pt"
        save_checkpoint(model, config, path)
        loaded = load_retriever(path)
        with torch.no_grad():
            a, _ = model.embed_texts(["checkpoint probe text"])
            b, _ = loaded.embed_texts(["checkpoint probe text"])
        assert torch.equal(a, b)


class TestReader:
    def test_overfit_reaches_em_one_via_engine_cli(self, tmp_path):
        """Train on 8 examples, then score the predictions with the engine's
        reading-evaluation CLI; exact match must reach 1.0."""
        rows = [span_row(i) for i in range(8)]
        model, _ = train_reader(rows, ReaderTrainConfig(epochs=40, seed=0))
        pred_path = tmp_path / "pred.jsonl"
        gold_path = tmp_path / "gold.jsonl"
        report_path = tmp_path / "report.json"
        with open(pred_path, "w") as pred_fh, open(gold_path, "w") as gold_fh:
            for row in rows:
                spans, _ = predict_spans(model, row["question"], row["context"], max_answers=1)
                prediction = spans[0]["text"] if spans else ""
                gold = row["context"][row["answer_start"]:row["answer_end"]]
                pred_fh.write(json.dumps({"id": row["id"], "answer": prediction}) + "\n")
                gold_fh.write(json.dumps({"id": row["id"], "answer": gold, "lang": "en"}) + "\n")
        subprocess.run(
            [sys.executable, "-m", "crossqa.cli", "eval", "reading",
             "--pred", str(pred_path), "--gold", str(gold_path), "--out", str(report_path)],
            check=True, capture_output=True,
        )
        report = json.loads(report_path.read_text())
        assert report["em"] == 1.0
        assert report["f1"] == 1.0

    def test_zero_length_training_set_rejected(self):
        with pytest.raises(ValueError):
            train_reader([], ReaderTrainConfig())

    def test_bad_span_dropped_with_log(self, caplog):
        good = span_row(0)
        bad = dict(span_row(1), answer_start=10_000, answer_end=10_005)
        model, losses = train_reader([good, bad], ReaderTrainConfig(epochs=2, seed=0))
        assert losses
        assert any("dropping example r1" in message for message in caplog.messages)

    def test_pretrain_flag_changes_schedule_not_contract(self, tmp_path):
        pretrain_path = tmp_path / "aux.jsonl"
        with open(pretrain_path, "w") as fh:
            for i in range(50, 54):
                fh.write(json.dumps(span_row(i)) + "\n")
        rows = [span_row(i) for i in range(4)]
        plain, _ = train_reader(rows, ReaderTrainConfig(epochs=3, seed=0))
        staged, _ = train_reader(rows, ReaderTrainConfig(
            epochs=3, seed=0, pretrain_path=str(pretrain_path), pretrain_epochs=2,
        ))
        for model in (plain, staged):
            spans, truncated = predict_spans(model, rows[0]["question"], rows[0]["context"], 2)
            assert isinstance(spans, list) and isinstance(truncated, bool)
            for span in spans:
                assert rows[0]["context"][span["start"]:span["end"]] == span["text"]
                assert 0.0 <= span["confidence"] <= 1.0

    def test_reader_checkpoint_round_trip(self, tmp_path):
        rows = [span_row(i) for i in range(4)]
        config = ReaderTrainConfig(epochs=5, seed=2)
        model, _ = train_reader(rows, config)
        path = tmp_path / "reader.pt"
        save_checkpoint(model, config, path)
        loaded = load_reader(path)
        a, _ = predict_spans(model, rows[0]["question"], rows[0]["context"], 1)
        b, _ = predict_spans(loaded, rows[0]["question"], rows[0]["context"], 1)
        assert a == b
