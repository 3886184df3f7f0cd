"""Encoders behind the sidecar: tiny local transformers or HF checkpoints.

Two encoder families share one interface:

* ``tiny:<dim>x<layers>`` builds a small randomly initialized transformer with
  a hash-bucket vocabulary. No downloads, fully deterministic given a seed;
  this is what tests and offline smoke runs use, and what training overfits.
* ``hf:<name-or-path>`` loads a pretrained multilingual checkpoint through the
  transformers library (requires the artifacts locally). The demo pairing is
  an XLM-R base retriever and an XLM-R large reader.

Text enters as whitespace words with character offsets, hashed into embedding
buckets, so span predictions map back to exact character spans of the source.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

import torch
from torch import nn

_WORD_RE = re.compile(r"\S+")

PAD_ID = 0
CLS_ID = 1
SEP_ID = 2
_RESERVED = 3


def word_tokenize(text: str) -> list[tuple[str, int, int]]:
    """Whitespace words with (start, end) character offsets."""
    return [(m.group(0), m.start(), m.end()) for m in _WORD_RE.finditer(text)]


def hash_token(word: str, vocab_size: int) -> int:
    digest = hashlib.blake2b(word.lower().encode("utf-8"), digest_size=8).digest()
    bucket = int.from_bytes(digest, "little") % (vocab_size - _RESERVED)
    return _RESERVED + bucket


@dataclass(frozen=True)
class EncoderSpec:
    """Parsed encoder selector."""

    family: str  # "tiny" or "hf"
    dim: int = 64
    layers: int = 2
    name: str = ""

    @classmethod
    def parse(cls, spec: str) -> "EncoderSpec":
        if spec.startswith("tiny:"):
            shape = spec.split(":", 1)[1]
            dim_s, layers_s = shape.split("x")
            return cls(family="tiny", dim=int(dim_s), layers=int(layers_s))
        if spec.startswith("hf:"):
            return cls(family="hf", name=spec.split(":", 1)[1])
        raise ValueError(f"unknown encoder spec {spec!r} (use tiny:<dim>x<layers> or hf:<name>)")


class TinyEncoder(nn.Module):
    """Hash-vocabulary transformer encoder; returns per-token hidden states."""

    def __init__(self, dim: int = 64, layers: int = 2, vocab_size: int = 8192,
                 max_len: int = 160, heads: int = 4, seed: int = 0):
        super().__init__()
        torch.manual_seed(seed)
        self.vocab_size = vocab_size
        self.max_len = max_len
        self.dim = dim
        self.word_emb = nn.Embedding(vocab_size, dim, padding_idx=PAD_ID)
        self.pos_emb = nn.Embedding(max_len, dim)
        layer = nn.TransformerEncoderLayer(
            d_model=dim, nhead=heads, dim_feedforward=dim * 2,
            dropout=0.1, batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=layers, enable_nested_tensor=False)

    def forward(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.shape[1], device=ids.device).unsqueeze(0)
        hidden = self.word_emb(ids) + self.pos_emb(positions)
        return self.encoder(hidden, src_key_padding_mask=~mask)


def encode_words(words: list[str], vocab_size: int, max_words: int) -> tuple[list[int], bool]:
    """Hash words to ids with a leading CLS; returns (ids, truncated)."""
    truncated = len(words) > max_words
    ids = [CLS_ID] + [hash_token(w, vocab_size) for w in words[:max_words]]
    return ids, truncated


def pad_batch(sequences: list[list[int]], device=None) -> tuple[torch.Tensor, torch.Tensor]:
    width = max(len(s) for s in sequences)
    ids = torch.full((len(sequences), width), PAD_ID, dtype=torch.long, device=device)
    mask = torch.zeros((len(sequences), width), dtype=torch.bool, device=device)
    for i, seq in enumerate(sequences):
        ids[i, : len(seq)] = torch.tensor(seq, dtype=torch.long, device=device)
        mask[i, : len(seq)] = True
    return ids, mask


class RetrieverModel(nn.Module):
    """Bi-encoder with one shared (unified) encoder for questions and answers.

    The sentence representation is the masked mean of token states. Training
    maximizes the inner product of paired question/answer vectors against
    in-batch alternatives; serving can L2-normalize on request.
    """

    def __init__(self, encoder: TinyEncoder, max_words: int = 64):
        super().__init__()
        self.encoder = encoder
        self.max_words = max_words

    def embed_texts(self, texts: list[str], normalize: bool = True) -> tuple[torch.Tensor, bool]:
        sequences, truncated = [], False
        for text in texts:
            words = [w for w, _, _ in word_tokenize(text)]
            ids, was_truncated = encode_words(words, self.encoder.vocab_size, self.max_words)
            truncated = truncated or was_truncated
            sequences.append(ids)
        ids, mask = pad_batch(sequences)
        hidden = self.encoder(ids, mask)
        weights = mask.unsqueeze(-1).float()
        pooled = (hidden * weights).sum(dim=1) / weights.sum(dim=1).clamp(min=1.0)
        if normalize:
            pooled = nn.functional.normalize(pooled, dim=-1)
        return pooled, truncated


class ReaderModel(nn.Module):
    """Span extractor: start/end logits over context word positions."""

    def __init__(self, encoder: TinyEncoder, max_question_words: int = 24,
                 max_context_words: int = 96):
        super().__init__()
        self.encoder = encoder
        self.max_question_words = max_question_words
        self.max_context_words = max_context_words
        self.span_head = nn.Linear(encoder.dim, 2)

    def build_input(self, question: str, context: str):
        """Sequence [CLS] q words [SEP] c words; returns ids plus the context
        word table (word, start, end) and the sequence offset of context."""
        q_words = [w for w, _, _ in word_tokenize(question)][: self.max_question_words]
        c_table = word_tokenize(context)
        truncated = len(c_table) > self.max_context_words
        c_table = c_table[: self.max_context_words]
        ids = [CLS_ID]
        ids += [hash_token(w, self.encoder.vocab_size) for w in q_words]
        ids.append(SEP_ID)
        context_offset = len(ids)
        ids += [hash_token(w, self.encoder.vocab_size) for w, _, _ in c_table]
        return ids, c_table, context_offset, truncated

    def forward(self, ids: torch.Tensor, mask: torch.Tensor):
        hidden = self.encoder(ids, mask)
        logits = self.span_head(hidden)
        start_logits = logits[..., 0]
        end_logits = logits[..., 1]
        neg = torch.finfo(start_logits.dtype).min
        start_logits = start_logits.masked_fill(~mask, neg)
        end_logits = end_logits.masked_fill(~mask, neg)
        return start_logits, end_logits


def build_encoder(spec: str, seed: int = 0) -> TinyEncoder:
    parsed = EncoderSpec.parse(spec)
    if parsed.family == "tiny":
        return TinyEncoder(dim=parsed.dim, layers=parsed.layers, seed=seed)
    raise NotImplementedError(
        f"HF checkpoint {parsed.name!r} requires local model artifacts; "
        "point MODEL_DIR at a directory containing them or use a tiny spec"
    )


def predict_spans(
    model: ReaderModel,
    question: str,
    context: str,
    max_answers: int = 3,
    span_max_words: int = 30,
) -> tuple[list[dict], bool]:
    """Decode non-overlapping spans with confidence = p_start * p_end.

    Probabilities come from softmax over context positions of each logit
    vector; spans are greedily selected best-first without overlap.
    """
    model.eval()
    with torch.no_grad():
        ids, c_table, offset, truncated = model.build_input(question, context)
        if not c_table:
            return [], truncated
        tensor_ids, mask = pad_batch([ids])
        start_logits, end_logits = model(tensor_ids, mask)
        n_ctx = len(c_table)
        ctx_start = start_logits[0, offset:offset + n_ctx]
        ctx_end = end_logits[0, offset:offset + n_ctx]
        p_start = torch.softmax(ctx_start, dim=-1)
        p_end = torch.softmax(ctx_end, dim=-1)

        scored = []
        for i in range(n_ctx):
            for j in range(i, min(i + span_max_words, n_ctx)):
                scored.append((float(p_start[i] * p_end[j]), i, j))
        scored.sort(key=lambda t: (-t[0], t[1], t[2]))
        chosen: list[tuple[float, int, int]] = []
        for score, i, j in scored:
            if len(chosen) == max_answers:
                break
            if all(j < ci or cj < i for _, ci, cj in chosen):
                chosen.append((score, i, j))
        spans = []
        for score, i, j in chosen:
            start_char = c_table[i][1]
            end_char = c_table[j][2]
            spans.append({
                "start": start_char,
                "end": end_char,
                "text": context[start_char:end_char],
                "confidence": min(1.0, max(0.0, score)),
            })
        spans.sort(key=lambda s: (-s["confidence"], s["start"]))
        return spans, truncated
