"""Okapi BM25 inverted index and translated-query federation.

The lexical baseline is not cross-lingual on its own: a query only matches
documents sharing surface tokens. ``federated_search`` levels the field by
running one BM25 search per translated query variant, restricted to documents
of that variant's language, then merging per-document scores with max.

Scoring uses the nonnegative idf variant ``ln(1 + (N - df + 0.5)/(df + 0.5))``
with defaults k1=1.2, b=0.75. No stemming and no stopword lists: the tokenizer
is language-neutral apart from splitting Han/kana codepoints for zh and ja.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus
from .dense import ScoredHit
from .errors import IndexFormatError, UnknownLanguageError
from . import textutil

BM25_FILE_FORMAT = "crossqa-bm25"
BM25_FILE_VERSION = 1

# Languages whose Han/kana codepoints are split into single-character terms.
CJK_SPLIT_LANGS = frozenset({"zh", "ja"})


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError(f"k1 must be >= 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


def tokenize(text: str, lang: str | None = None) -> list[str]:
    """Lowercase, NFKC-normalize, split on non-alphanumeric codepoints.

    For zh/ja, each Han or kana codepoint becomes its own term.
    """
    return textutil.tokenize(text, split_cjk=lang in CJK_SPLIT_LANGS)


@dataclass
class InvertedIndex:
    """Term postings plus the per-document statistics BM25 needs.

    ``doc_lang`` is carried so federation can restrict each query variant to
    documents of its language.
    """

    postings: dict[str, list[tuple[str, int]]]
    doc_len: dict[str, int]
    doc_lang: dict[str, str]
    params: Bm25Params = field(default_factory=Bm25Params)

    @property
    def n_docs(self) -> int:
        return len(self.doc_len)

    @property
    def avgdl(self) -> float:
        return sum(self.doc_len.values()) / len(self.doc_len)

    @property
    def languages(self) -> set[str]:
        return set(self.doc_lang.values())


def build_inverted_index(corpus: Corpus, params: Bm25Params | None = None) -> InvertedIndex:
    """Index the abstract bodies of a corpus; titles are display metadata."""
    if len(corpus) == 0:
        raise ValueError("cannot index an empty corpus")
    postings: dict[str, dict[str, int]] = {}
    doc_len: dict[str, int] = {}
    doc_lang: dict[str, str] = {}
    for doc in corpus:
        terms = tokenize(doc.body, doc.lang)
        doc_len[doc.id] = len(terms)
        doc_lang[doc.id] = doc.lang
        for term in terms:
            postings.setdefault(term, {})
            postings[term][doc.id] = postings[term].get(doc.id, 0) + 1
    return InvertedIndex(
        postings={t: sorted(freqs.items()) for t, freqs in postings.items()},
        doc_len=doc_len,
        doc_lang=doc_lang,
        params=params or Bm25Params(),
    )


def idf(index: InvertedIndex, term: str) -> float:
    """Nonnegative idf: ln(1 + (N - df + 0.5) / (df + 0.5)); 0 df handled."""
    df = len(index.postings.get(term, ()))
    n = index.n_docs
    return math.log(1.0 + (n - df + 0.5) / (df + 0.5))


def bm25_search(
    index: InvertedIndex,
    query_terms: Sequence[str],
    k: int,
    candidates: set[str] | None = None,
) -> list[ScoredHit]:
    """Top-k documents by Okapi BM25 over the query term sequence.

    The score is a sum over query term occurrences, so a term repeated in the
    query weights its contribution linearly. Documents scoring zero are
    excluded, so a fully out-of-vocabulary query returns an empty list.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    k1, b = index.params.k1, index.params.b
    avgdl = index.avgdl
    scores: dict[str, float] = {}
    for term in query_terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        term_idf = idf(index, term)
        for doc_id, tf in plist:
            if candidates is not None and doc_id not in candidates:
                continue
            dl = index.doc_len[doc_id]
            gain = term_idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl))
            scores[doc_id] = scores.get(doc_id, 0.0) + gain
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    return [ScoredHit(doc_id=d, score=s, rank=r) for r, (d, s) in enumerate(ranked, start=1)]


def merge_max_scores(hit_lists: Iterable[Sequence[ScoredHit]]) -> dict[str, float]:
    """Merge per-variant hit lists: a document keeps its maximum score."""
    merged: dict[str, float] = {}
    for hits in hit_lists:
        for hit in hits:
            prev = merged.get(hit.doc_id)
            if prev is None or hit.score > prev:
                merged[hit.doc_id] = hit.score
    return merged


def federated_search(
    index: InvertedIndex,
    query_by_lang: Mapping[str, str],
    k: int,
) -> list[ScoredHit]:
    """Cross-lingual BM25: one search per translated query variant.

    Each variant runs against the documents of its own language (a Spanish
    query should score Spanish abstracts), scores merge by max, and the global
    top-k is returned with ties broken by ascending doc id. A language with no
    documents in the index raises :class:`UnknownLanguageError`.
    """
    if not query_by_lang:
        raise ValueError("federated_search needs at least one language variant")
    known = index.languages
    per_variant = []
    for lang in sorted(query_by_lang):
        if lang not in known:
            raise UnknownLanguageError(lang, "no documents in this language")
        lang_docs = {doc_id for doc_id, dl in index.doc_lang.items() if dl == lang}
        terms = tokenize(query_by_lang[lang], lang)
        per_variant.append(bm25_search(index, terms, k, candidates=lang_docs))
    merged = merge_max_scores(per_variant)
    ranked = sorted(merged.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    return [ScoredHit(doc_id=d, score=s, rank=r) for r, (d, s) in enumerate(ranked, start=1)]


def save_bm25(index: InvertedIndex, path: str | Path) -> None:
    payload = {
        "format": BM25_FILE_FORMAT,
        "version": BM25_FILE_VERSION,
        "k1": index.params.k1,
        "b": index.params.b,
        "doc_len": index.doc_len,
        "doc_lang": index.doc_lang,
        "postings": {term: [[d, tf] for d, tf in plist] for term, plist in index.postings.items()},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def load_bm25(path: str | Path) -> InvertedIndex:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != BM25_FILE_FORMAT or payload.get("version") != BM25_FILE_VERSION:
        raise IndexFormatError(f"incompatible BM25 index file {path}")
    return InvertedIndex(
        postings={t: [(d, int(tf)) for d, tf in plist] for t, plist in payload["postings"].items()},
        doc_len={d: int(n) for d, n in payload["doc_len"].items()},
        doc_lang=dict(payload["doc_lang"]),
        params=Bm25Params(k1=float(payload["k1"]), b=float(payload["b"])),
    )
