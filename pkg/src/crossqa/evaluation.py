"""Retrieval and reading-comprehension evaluation.

Retrieval quality is measured without document-level relevance labels: a
retrieved document counts as a positive if any of its sentences is
embedding-similar (cosine at or above a threshold) to the reference answer,
and FM@k is the fraction of queries with at least one positive in the top k.
Reading comprehension uses exact match and token F1 over normalized answers,
with codepoint tokens for zh/ja so no segmenter is needed.
"""

from __future__ import annotations

import logging
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .corpus import Corpus
from .dataset import QAPair
from .errors import EmptyTextError

logger = logging.getLogger(__name__)

# Sentence terminators that always end a sentence (fullwidth CJK stops), and
# those that end one only before whitespace or end of text (so decimal points
# and mid-token punctuation do not split).
_TERMINATORS_ALWAYS = frozenset("。！？")
_TERMINATORS_BEFORE_SPACE = frozenset(".!?؟")

AGGREGATE_MODES = ("success", "positive_fraction")


@dataclass(frozen=True)
class EvalConfig:
    """FM@k settings: cutoffs, similarity threshold, aggregation flavor.

    ``aggregate="success"`` scores a query as hit/miss within top k;
    ``"positive_fraction"`` averages the fraction of positive documents in the
    top k instead.
    """

    k_values: tuple[int, ...] = (5, 100)
    fm_threshold: float = 0.65
    sentence_lang_hint: str | None = None
    aggregate: str = "success"

    def __post_init__(self):
        if not self.k_values:
            raise ValueError("k_values must be nonempty")
        if any(k < 1 for k in self.k_values):
            raise ValueError(f"k_values must be positive, got {self.k_values}")
        if list(self.k_values) != sorted(self.k_values):
            raise ValueError(f"k_values must be ascending, got {self.k_values}")
        if not 0.0 < self.fm_threshold < 1.0:
            raise ValueError(f"fm_threshold must be in (0, 1), got {self.fm_threshold}")
        if self.aggregate not in AGGREGATE_MODES:
            raise ValueError(f"unknown aggregate mode {self.aggregate!r}")


@dataclass(frozen=True)
class RetrievalEvalReport:
    """FM@k per cutoff plus the first positive rank per query."""

    fm_at: Mapping[int, float]
    per_query: Sequence[tuple[str, int | None]]

    def to_dict(self) -> dict:
        return {
            "fm": {str(k): v for k, v in sorted(self.fm_at.items())},
            "per_query": [
                {"query_id": qid, "first_positive_rank": rank} for qid, rank in self.per_query
            ],
        }


@dataclass(frozen=True)
class ReadingEvalReport:
    em: float
    f1: float
    per_example: Sequence[Mapping[str, float]] = field(default_factory=tuple)

    def __post_init__(self):
        if self.em > self.f1 + 1e-12:
            raise ValueError(f"EM {self.em} cannot exceed F1 {self.f1}")

    def to_dict(self) -> dict:
        return {"em": self.em, "f1": self.f1, "per_example": [dict(d) for d in self.per_example]}


def split_sentences(text: str, lang: str | None = None) -> list[str]:
    """Split text into sentences on terminal punctuation.

    Fullwidth CJK terminators split unconditionally; ASCII and Arabic ones
    only when followed by whitespace or end of text. Segments are trimmed and
    empties dropped; text without terminators is one sentence. ``lang`` is a
    hint reserved for language-specific splitting; the current rule is
    codepoint-driven and ignores it.
    """
    sentences: list[str] = []
    start = 0
    n = len(text)
    for i, ch in enumerate(text):
        if ch in _TERMINATORS_ALWAYS or (
            ch in _TERMINATORS_BEFORE_SPACE and (i + 1 == n or text[i + 1].isspace())
        ):
            segment = text[start:i + 1].strip()
            if segment:
                sentences.append(segment)
            start = i + 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _doc_sentence_vectors(body: str, lang: str, embedder) -> np.ndarray | None:
    """Embed a document's sentences; unembeddable sentences are skipped."""
    sentences = split_sentences(body, lang)
    if not sentences:
        return None
    try:
        return embedder.embed_batch(sentences, role="sentence_sim")
    except EmptyTextError:
        vecs = []
        for sentence in sentences:
            try:
                vecs.append(embedder.embed_batch([sentence], role="sentence_sim")[0])
            except EmptyTextError:
                continue
        return np.stack(vecs) if vecs else None


def _max_cosine(matrix: np.ndarray, ref: np.ndarray) -> float:
    """Maximum cosine between any matrix row and the reference vector.

    Computed as dot over norms, so providers that do not normalize still get
    scored on true cosine; rows with zero norm cannot be positive.
    """
    ref_norm = float(np.linalg.norm(ref))
    if ref_norm == 0.0:
        return -1.0
    row_norms = np.linalg.norm(matrix, axis=1)
    dots = matrix @ ref
    valid = row_norms > 0.0
    if not np.any(valid):
        return -1.0
    sims = dots[valid] / (row_norms[valid] * ref_norm)
    return float(np.clip(np.max(sims), -1.0, 1.0))


def fuzzy_match_at_k(
    retrieved: Mapping[str, Sequence[str]],
    references: Mapping[str, str],
    corpus: Corpus,
    embedder,
    config: EvalConfig | None = None,
) -> RetrievalEvalReport:
    """Fuzzy-match retrieval evaluation.

    A document is positive for a query iff the maximum cosine between any of
    its sentence embeddings and the reference answer embedding reaches the
    threshold. ``retrieved`` maps query id to its ranked doc ids; every id
    must resolve in the corpus. ``references`` maps query id to the reference
    answer text.
    """
    config = config or EvalConfig()
    max_k = max(config.k_values)
    query_ids = list(retrieved)
    missing_refs = [q for q in query_ids if q not in references]
    if missing_refs:
        raise KeyError(f"queries without reference answers: {missing_refs[:5]}")

    ref_vecs = {}
    if query_ids:
        vecs = embedder.embed_batch([references[q] for q in query_ids], role="sentence_sim")
        ref_vecs = {q: vecs[i] for i, q in enumerate(query_ids)}

    sentence_cache: dict[str, np.ndarray | None] = {}
    per_query: list[tuple[str, int | None]] = []
    positives: dict[str, list[bool]] = {}
    for qid in query_ids:
        ranked = list(retrieved[qid])[:max_k]
        flags: list[bool] = []
        first_rank: int | None = None
        for rank, doc_id in enumerate(ranked, start=1):
            if doc_id not in sentence_cache:
                doc = corpus.get(doc_id)
                sentence_cache[doc_id] = _doc_sentence_vectors(doc.body, doc.lang, embedder)
            mat = sentence_cache[doc_id]
            positive = bool(mat is not None and _max_cosine(mat, ref_vecs[qid]) >= config.fm_threshold)
            flags.append(positive)
            if positive and first_rank is None:
                first_rank = rank
        positives[qid] = flags
        per_query.append((qid, first_rank))

    fm_at: dict[int, float] = {}
    n = len(query_ids)
    for k in config.k_values:
        if n == 0:
            fm_at[k] = 0.0
        elif config.aggregate == "success":
            hits = sum(1 for _, rank in per_query if rank is not None and rank <= k)
            fm_at[k] = hits / n
        else:
            fractions = []
            for qid in query_ids:
                top = positives[qid][:k]
                fractions.append(sum(top) / len(top) if top else 0.0)
            fm_at[k] = float(np.mean(fractions))
    return RetrievalEvalReport(fm_at=fm_at, per_query=per_query)


_EN_ARTICLES = frozenset({"a", "an", "the"})
_CODEPOINT_TOKEN_LANGS = frozenset({"zh", "ja"})


def normalize_answer(text: str, lang: str = "en") -> str:
    """Lowercase, NFKC, strip punctuation, collapse whitespace; English also
    drops the articles a/an/the."""
    text = unicodedata.normalize("NFKC", text.lower())
    text = "".join(ch for ch in text if not unicodedata.category(ch).startswith("P"))
    words = text.split()
    if lang == "en":
        words = [w for w in words if w not in _EN_ARTICLES]
    return " ".join(words)


def answer_tokens(text: str, lang: str = "en") -> list[str]:
    norm = normalize_answer(text, lang)
    if lang in _CODEPOINT_TOKEN_LANGS:
        return [ch for ch in norm if not ch.isspace()]
    return norm.split()


def exact_match(pred: str, gold: str, lang: str = "en") -> float:
    return float(normalize_answer(pred, lang) == normalize_answer(gold, lang))


def token_f1(pred: str, gold: str, lang: str = "en") -> float:
    """Harmonic mean of token precision/recall with multiset overlap."""
    pred_tokens = answer_tokens(pred, lang)
    gold_tokens = answer_tokens(gold, lang)
    if not pred_tokens or not gold_tokens:
        return float(pred_tokens == gold_tokens)
    overlap = sum((Counter(pred_tokens) & Counter(gold_tokens)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred_tokens)
    recall = overlap / len(gold_tokens)
    return 2.0 * precision * recall / (precision + recall)


def reading_metrics(
    predictions: Sequence[str],
    golds: Sequence[str],
    langs: Sequence[str] | None = None,
) -> ReadingEvalReport:
    """Average EM and F1 over aligned prediction/gold lists.

    ``langs`` gives the language per example (default English); zh/ja examples
    are scored on codepoint tokens.
    """
    if langs is None:
        langs = ["en"] * len(predictions)
    if not (len(predictions) == len(golds) == len(langs)):
        raise ValueError(
            f"length mismatch: {len(predictions)} predictions, "
            f"{len(golds)} golds, {len(langs)} langs"
        )
    per_example = []
    for pred, gold, lang in zip(predictions, golds, langs):
        per_example.append({
            "em": exact_match(pred, gold, lang),
            "f1": token_f1(pred, gold, lang),
        })
    n = len(per_example)
    em = sum(d["em"] for d in per_example) / n if n else 0.0
    f1 = sum(d["f1"] for d in per_example) / n if n else 0.0
    return ReadingEvalReport(em=em, f1=f1, per_example=per_example)


def run_retrieval_benchmark(
    systems: Mapping[str, Callable[[str], Sequence[str]]],
    queries: Sequence[QAPair],
    corpus: Corpus,
    embedder,
    config: EvalConfig | None = None,
) -> dict[str, RetrievalEvalReport]:
    """Evaluate named retrieval systems on identical queries and corpus.

    Each system maps query text to ranked doc ids. A system failure on a
    query is recorded as an empty retrieval and the run continues, so one
    flaky system cannot abort a comparison.
    """
    config = config or EvalConfig()
    max_k = max(config.k_values)
    references = {pair.id: pair.answer for pair in queries}
    reports: dict[str, RetrievalEvalReport] = {}
    for name, system in systems.items():
        retrieved: dict[str, list[str]] = {}
        for pair in queries:
            try:
                retrieved[pair.id] = list(system(pair.question))[:max_k]
            except Exception as exc:
                logger.warning("system %s failed on query %s: %s", name, pair.id, exc)
                retrieved[pair.id] = []
        reports[name] = fuzzy_match_at_k(retrieved, references, corpus, embedder, config)
    return reports


def format_benchmark_table(reports: Mapping[str, RetrievalEvalReport]) -> str:
    """Aligned text table, one row per system, one FM@k column per cutoff."""
    if not reports:
        return "(no systems)"
    k_values = sorted(next(iter(reports.values())).fm_at)
    header = ["system"] + [f"FM@{k}" for k in k_values]
    rows = [header]
    for name, report in reports.items():
        rows.append([name] + [f"{report.fm_at[k]:.3f}" for k in k_values])
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for idx, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
