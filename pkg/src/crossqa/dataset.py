"""QA-pair datasets: cross-lingual generation by translation, alignment
filtering by embedding similarity, statistics, and JSONL round-tripping.

Generation turns a multilingual QA collection into a cross-lingual one: the
answer of every pair is machine-translated into a set of target languages and
non-English questions are translated into English, so questions end up English
while answers span many languages. Machine translation is imperfect, so a
filtering pass embeds each translated answer and its original and drops pairs
whose cosine similarity is too low, either against a fixed threshold or
against a quantile chosen to remove a target fraction.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .embedding import cosine
from .errors import DatasetError

logger = logging.getLogger(__name__)

ORIGINS = ("original", "question_translated", "answer_translated", "both_translated")

# Default answer-side target languages for cross-lingual generation.
EN2ALL_TARGET_LANGS = ("ar", "fr", "de", "it", "zh", "ru", "es", "vi")

_FIELD_ORDER = (
    "id", "question", "question_lang", "answer", "answer_lang",
    "origin", "source_id", "similarity",
)


@dataclass(frozen=True)
class QAPair:
    """One question/answer instance with language tags and provenance.

    ``origin`` records how the pair came to be; translated origins must point
    at their original via ``source_id``. ``similarity`` is populated by the
    filtering pass for kept translated pairs.
    """

    id: str
    question: str
    question_lang: str
    answer: str
    answer_lang: str
    origin: str = "original"
    source_id: str | None = None
    similarity: float | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("pair id must be nonempty")
        if not self.question.strip():
            raise ValueError(f"pair {self.id!r}: question must be nonempty")
        if not self.answer.strip():
            raise ValueError(f"pair {self.id!r}: answer must be nonempty")
        if self.origin not in ORIGINS:
            raise ValueError(f"pair {self.id!r}: unknown origin {self.origin!r}")
        if self.origin == "original" and self.source_id is not None:
            raise ValueError(f"pair {self.id!r}: original pairs carry no source_id")
        if self.origin != "original" and not self.source_id:
            raise ValueError(f"pair {self.id!r}: translated pairs need a source_id")
        if self.similarity is not None and not -1.0 <= self.similarity <= 1.0:
            raise ValueError(f"pair {self.id!r}: similarity {self.similarity} outside [-1, 1]")


@dataclass(frozen=True)
class FilterConfig:
    """Alignment-filter settings; exactly one mode is active.

    ``fixed_threshold`` keeps pairs with similarity >= ``threshold``.
    ``removal_quantile`` derives the threshold from the similarity
    distribution so that roughly ``target_removal`` of translated pairs drop.
    """

    mode: str = "fixed_threshold"
    threshold: float = 0.85
    target_removal: float = 1.0 / 3.0

    def __post_init__(self):
        if self.mode not in ("fixed_threshold", "removal_quantile"):
            raise ValueError(f"unknown filter mode {self.mode!r}")
        if not -1.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [-1, 1]")
        if not 0.0 < self.target_removal < 1.0:
            raise ValueError(f"target_removal {self.target_removal} outside (0, 1)")


@dataclass(frozen=True)
class FilterReport:
    removed_count: int
    removal_fraction: float
    threshold_used: float
    per_lang: Mapping[str, Mapping[str, int]]

    def to_dict(self) -> dict:
        return {
            "removed_count": self.removed_count,
            "removal_fraction": self.removal_fraction,
            "threshold_used": self.threshold_used,
            "per_lang": {lang: dict(counts) for lang, counts in sorted(self.per_lang.items())},
        }


@dataclass(frozen=True)
class DatasetStats:
    total: int
    per_answer_lang: Mapping[str, int]
    per_origin: Mapping[str, int]

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "per_answer_lang": dict(sorted(self.per_answer_lang.items())),
            "per_origin": dict(sorted(self.per_origin.items())),
        }


def generate_en2all(
    pairs: Sequence[QAPair],
    translator,
    target_langs: Sequence[str] = EN2ALL_TARGET_LANGS,
) -> list[QAPair]:
    """Generate cross-lingual variants of every pair.

    Per input pair: the answer is translated into each target language except
    its own, and a non-English question is translated into English (yielding a
    question-only variant plus English questions on the answer variants).
    Originals are preserved; every generated pair points back via source_id.
    Translator failures skip the affected pair with a log line; nothing is
    fabricated. A failed question translation skips all variants of that pair
    since they could not carry an English question.
    """
    out: list[QAPair] = []
    for pair in pairs:
        out.append(pair)
        q_en = pair.question
        q_translated = False
        if pair.question_lang != "en":
            try:
                q_en = translator.translate([pair.question], pair.question_lang, "en")[0]
                variant = QAPair(
                    id=f"{pair.id}::q-en",
                    question=q_en,
                    question_lang="en",
                    answer=pair.answer,
                    answer_lang=pair.answer_lang,
                    origin="question_translated",
                    source_id=pair.id,
                )
            except Exception as exc:
                logger.warning("question translation failed for %s: %s", pair.id, exc)
                continue
            q_translated = True
            out.append(variant)
        for target in target_langs:
            if target == pair.answer_lang:
                continue
            try:
                answer = translator.translate([pair.answer], pair.answer_lang, target)[0]
                variant = QAPair(
                    id=f"{pair.id}::a-{target}",
                    question=q_en,
                    question_lang="en",
                    answer=answer,
                    answer_lang=target,
                    origin="both_translated" if q_translated else "answer_translated",
                    source_id=pair.id,
                )
            except Exception as exc:
                logger.warning("answer translation %s->%s failed for %s: %s",
                               pair.answer_lang, target, pair.id, exc)
                continue
            out.append(variant)
    return out


def _embed_chunked(embedder, texts: Sequence[str], role: str, chunk: int = 128) -> np.ndarray:
    parts = [
        embedder.embed_batch(texts[i:i + chunk], role)
        for i in range(0, len(texts), chunk)
    ]
    return np.vstack(parts)


def filter_translations(
    pairs: Sequence[QAPair],
    embedder,
    config: FilterConfig | None = None,
) -> tuple[list[QAPair], FilterReport]:
    """Drop translated pairs whose answer drifted from its original.

    Similarity is the cosine of the translated answer's embedding and the
    original answer's embedding (sentence-similarity role, whole answers).
    Original pairs are always kept and never counted in the removal fraction;
    kept translated pairs come back with their similarity populated. Dangling
    source ids abort with :class:`DatasetError` listing the offenders.
    """
    config = config or FilterConfig()
    originals = {p.id: p for p in pairs if p.origin == "original"}
    translated = [p for p in pairs if p.origin != "original"]
    dangling = sorted({p.source_id for p in translated if p.source_id not in originals})
    if dangling:
        raise DatasetError("dangling source ids: " + ", ".join(str(d) for d in dangling))

    sims: dict[str, float] = {}
    if translated:
        texts = [p.answer for p in translated] + [originals[p.source_id].answer for p in translated]
        vecs = _embed_chunked(embedder, texts, role="sentence_sim")
        n = len(translated)
        for i, p in enumerate(translated):
            sims[p.id] = cosine(vecs[i], vecs[n + i])

    if config.mode == "fixed_threshold":
        threshold = config.threshold
    elif translated:
        ordered = sorted(sims.values())
        idx = min(math.floor(config.target_removal * len(ordered)), len(ordered) - 1)
        threshold = ordered[idx]
    else:
        threshold = config.threshold

    kept: list[QAPair] = []
    removed = 0
    per_lang: dict[str, dict[str, int]] = {}
    for pair in pairs:
        if pair.origin == "original":
            kept.append(pair)
            continue
        bucket = per_lang.setdefault(pair.answer_lang, {"kept": 0, "removed": 0})
        sim = sims[pair.id]
        if sim >= threshold:
            kept.append(replace(pair, similarity=sim))
            bucket["kept"] += 1
        else:
            removed += 1
            bucket["removed"] += 1
    report = FilterReport(
        removed_count=removed,
        removal_fraction=removed / len(translated) if translated else 0.0,
        threshold_used=threshold,
        per_lang=per_lang,
    )
    return kept, report


def dataset_stats(pairs: Iterable[QAPair]) -> DatasetStats:
    per_lang: dict[str, int] = {}
    per_origin: dict[str, int] = {}
    total = 0
    for pair in pairs:
        total += 1
        per_lang[pair.answer_lang] = per_lang.get(pair.answer_lang, 0) + 1
        per_origin[pair.origin] = per_origin.get(pair.origin, 0) + 1
    return DatasetStats(total=total, per_answer_lang=per_lang, per_origin=per_origin)


def pair_to_record(pair: QAPair) -> dict:
    record = {}
    for key in _FIELD_ORDER:
        value = getattr(pair, key)
        if value is None and key in ("source_id", "similarity"):
            continue
        record[key] = value
    return record


def dumps_pair(pair: QAPair) -> str:
    return json.dumps(pair_to_record(pair), ensure_ascii=False, separators=(",", ":"))


def save_dataset(pairs: Iterable[QAPair], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(dumps_pair(pair))
            fh.write("\n")


def load_dataset(path: str | Path) -> tuple[list[QAPair], list[tuple[int, str]]]:
    """Load a JSONL dataset; malformed lines are rejected with line numbers."""
    pairs: list[QAPair] = []
    rejected: list[tuple[int, str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                rejected.append((line_no, f"invalid JSON: {exc.msg}"))
                continue
            if not isinstance(obj, dict):
                rejected.append((line_no, "record is not a JSON object"))
                continue
            missing = [k for k in ("id", "question", "question_lang", "answer", "answer_lang")
                       if k not in obj]
            if missing:
                rejected.append((line_no, f"missing required keys: {', '.join(missing)}"))
                continue
            try:
                pair = QAPair(
                    id=str(obj["id"]),
                    question=str(obj["question"]),
                    question_lang=str(obj["question_lang"]),
                    answer=str(obj["answer"]),
                    answer_lang=str(obj["answer_lang"]),
                    origin=str(obj.get("origin", "original")),
                    source_id=None if obj.get("source_id") is None else str(obj["source_id"]),
                    similarity=None if obj.get("similarity") is None else float(obj["similarity"]),
                )
            except (ValueError, TypeError) as exc:
                rejected.append((line_no, str(exc)))
                continue
            pairs.append(pair)
    return pairs, rejected
