"""End-to-end question answering over the dense index.

One query flows: encode -> retrieve under language/date constraints (with a
documented fallback when a date range matches nothing) -> extract answer spans
per document -> re-rank documents by answer confidence -> translate answers
and bodies of non-English documents -> assign highlight colors. Component
failures on a single document degrade that result with a diagnostic instead of
aborting the query.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .corpus import Corpus, DateRange, Document
from .dense import DenseIndex, ScoredHit, mips_search
from .extraction import AnswerSpan, spans_overlap
from .errors import CrossQAError

logger = logging.getLogger(__name__)

DEFAULT_MAX_ANSWERS = 3
DISPLAY_LANG = "en"


@dataclass(frozen=True)
class QueryOptions:
    """User-facing retrieval knobs: result count, language set, date window."""

    k: int = 3
    langs: frozenset[str] | None = None
    date_range: DateRange | None = None
    max_answers: int = DEFAULT_MAX_ANSWERS

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.max_answers < 1:
            raise ValueError(f"max_answers must be >= 1, got {self.max_answers}")
        if self.langs is not None:
            object.__setattr__(self, "langs", frozenset(self.langs))


@dataclass
class PipelineComponents:
    """Everything answer_query needs; stubs make the whole set local."""

    corpus: Corpus
    index: DenseIndex
    embedder: object
    extractor: Callable[[str, str, int], list[AnswerSpan]]
    translator: object | None = None


@dataclass
class RankedResult:
    """One answered document: spans (confidence-descending), translations
    aligned to spans by position, and the color index per span."""

    document: Document
    retrieval_score: float
    answers: list[AnswerSpan]
    highlight_colors: list[int]
    answer_translations: list[str] | None = None
    body_translation: str | None = None
    fallback_used: bool = False
    diagnostics: list[str] = field(default_factory=list)


def rerank(hits: Sequence[tuple[ScoredHit, Sequence[AnswerSpan]]]) -> list[tuple[ScoredHit, Sequence[AnswerSpan]]]:
    """Order documents by their best answer confidence.

    Documents without answers sort below all documents with answers; ties fall
    back to retrieval score descending, then ascending doc id. The output is a
    permutation of the input.
    """
    def key(item: tuple[ScoredHit, Sequence[AnswerSpan]]):
        hit, spans = item
        best = max((s.confidence for s in spans), default=None)
        return (0 if best is not None else 1, -(best or 0.0), -hit.score, hit.doc_id)

    return sorted(hits, key=key)


def assign_highlight_colors(answers: Sequence[AnswerSpan]) -> list[int]:
    """Distinct color indices 0..n-1 in confidence order; 0 is the single-answer
    color (red in the UI palette). Overlapping spans are a contract violation."""
    for i, a in enumerate(answers):
        for b in answers[i + 1:]:
            if spans_overlap(a, b):
                raise ValueError("overlapping answers cannot be colored")
    return list(range(len(answers)))


def _keep_non_overlapping(spans: Sequence[AnswerSpan], max_answers: int) -> list[AnswerSpan]:
    """Defensive enforcement for extractor backends that return overlaps."""
    kept: list[AnswerSpan] = []
    for span in sorted(spans, key=lambda s: (-s.confidence, s.start_char)):
        if len(kept) == max_answers:
            break
        if all(not spans_overlap(span, other) for other in kept):
            kept.append(span)
    return kept


def answer_query(
    query_text: str,
    opts: QueryOptions,
    components: PipelineComponents,
) -> list[RankedResult]:
    """Run the full pipeline for one query; see module docstring for stages.

    Retrieval breadth is 2k so confidence re-ranking has something to work
    with; the top k after re-ranking are returned. When a requested date range
    excludes every document, retrieval retries without it and every result is
    flagged ``fallback_used`` so the UI can say so.
    """
    if not query_text.strip():
        raise ValueError("query text must be nonempty")
    corpus, index = components.corpus, components.index

    candidates = corpus.filter_documents(opts.langs, opts.date_range)
    fallback_used = False
    if not candidates and opts.date_range is not None and opts.date_range.bounded:
        candidates = corpus.filter_documents(opts.langs, None)
        fallback_used = True
    if not candidates:
        return []

    query_vec = components.embedder.embed_batch([query_text], role="query")[0]
    hits = mips_search(index, query_vec, k=2 * opts.k, candidates=candidates)

    extracted: list[tuple[ScoredHit, list[AnswerSpan]]] = []
    failures: dict[str, list[str]] = {}
    for hit in hits:
        doc = corpus.get(hit.doc_id)
        try:
            spans = components.extractor(query_text, doc.body, opts.max_answers)
            spans = _keep_non_overlapping(spans, opts.max_answers)
        except CrossQAError as exc:
            logger.warning("extraction failed for %s: %s", hit.doc_id, exc)
            failures.setdefault(hit.doc_id, []).append(f"extraction failed: {exc}")
            spans = []
        extracted.append((hit, spans))

    results: list[RankedResult] = []
    for hit, spans in rerank(extracted)[: opts.k]:
        doc = corpus.get(hit.doc_id)
        result = RankedResult(
            document=doc,
            retrieval_score=hit.score,
            answers=list(spans),
            highlight_colors=assign_highlight_colors(spans),
            fallback_used=fallback_used,
            diagnostics=list(failures.get(hit.doc_id, [])),
        )
        if doc.lang != DISPLAY_LANG and components.translator is not None:
            try:
                if spans:
                    result.answer_translations = components.translator.translate(
                        [s.text for s in spans], doc.lang, DISPLAY_LANG
                    )
                else:
                    result.answer_translations = []
                result.body_translation = components.translator.translate(
                    [doc.body], doc.lang, DISPLAY_LANG
                )[0]
            except CrossQAError as exc:
                logger.warning("translation failed for %s: %s", hit.doc_id, exc)
                result.answer_translations = None
                result.body_translation = None
                result.diagnostics.append(f"translation failed: {exc}")
        results.append(result)
    return results
