"""Shared test fixtures: synthetic corpora and an alignment-oracle embedder."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from crossqa.corpus import Corpus, Document
from crossqa.dataset import QAPair
from crossqa.embedding import StubEmbeddingProvider
from crossqa.textutil import tokenize
from crossqa.translation import MappingTranslator

FOREIGN_PREFIX = "x"


def to_foreign(text: str) -> str:
    """Word-by-word surface mapping producing a disjoint vocabulary."""
    return " ".join(FOREIGN_PREFIX + w for w in text.split())


class TableEmbedder:
    """Embedder returning preassigned vectors per exact text; lets tests pin
    the cosine between chosen text pairs."""

    def __init__(self, table: dict[str, np.ndarray]):
        self.table = {t: np.asarray(v, dtype=np.float64) for t, v in table.items()}
        self.dim = len(next(iter(self.table.values())))

    def embed_batch(self, texts, role="passage"):
        return np.stack([self.table[t] for t in texts])

    def probe(self, timeout: float = 1.0) -> bool:
        return True


def paired_vectors(similarity: float, dim: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Two unit vectors whose cosine is exactly ``similarity``."""
    a = np.zeros(dim)
    a[0] = 1.0
    b = np.zeros(dim)
    b[0] = similarity
    b[1] = np.sqrt(max(0.0, 1.0 - similarity * similarity))
    return a, b


class AlignedStubEmbedder(StubEmbeddingProvider):
    """Stub embedder that maps the synthetic foreign vocabulary back onto the
    English one before hashing, imitating a trained cross-lingual encoder:
    a word and its translation land on the same vector."""

    def embed_batch(self, texts, role="passage"):
        canonical = [
            " ".join(
                tok[len(FOREIGN_PREFIX):] if tok.startswith(FOREIGN_PREFIX) and len(tok) > 1 else tok
                for tok in tokenize(text)
            )
            for text in texts
        ]
        return super().embed_batch(canonical, role)


@dataclass
class BilingualFixture:
    corpus: Corpus
    queries: list[QAPair]
    embedder: AlignedStubEmbedder
    translator: MappingTranslator
    answer_doc_ids: dict[str, str]
    answer_langs: dict[str, str]


def build_bilingual_fixture(
    n_queries: int = 24,
    n_english_answerable: int = 4,
    n_distractors: int = 30,
    dim: int = 128,
    seed: int = 7,
) -> BilingualFixture:
    """Bilingual corpus with disjoint surface vocabularies.

    Each query has exactly one relevant document; most are in the foreign
    language ("es"), a few in English. Foreign bodies are word-mapped English,
    so the aligned embedder scores translation pairs identically while plain
    token matching sees nothing shared.
    """
    docs: list[Document] = []
    queries: list[QAPair] = []
    answer_doc_ids: dict[str, str] = {}
    answer_langs: dict[str, str] = {}
    lexicon: dict[str, str] = {}

    def learn(text: str) -> None:
        for w in text.split():
            lexicon[w] = FOREIGN_PREFIX + w

    for i in range(n_queries):
        a, b, c = f"topic{i}alpha", f"topic{i}beta", f"topic{i}gamma"
        question = f"how does {a} affect {b} and {c}"
        reference = f"{a} treats {b} through {c} pathways"
        filler = f"relleno{i} unrelated{i} extra{i} note{i}"
        learn(question)
        learn(reference)
        learn(filler)
        in_english = i < n_english_answerable
        lang = "en" if in_english else "es"
        body = f"{reference}. {filler}." if in_english else f"{to_foreign(reference)}. {to_foreign(filler)}."
        doc_id = f"doc-{lang}-{i:03d}"
        docs.append(Document(
            id=doc_id,
            title=f"study {i}",
            body=body,
            lang=lang,
            date=None,
        ))
        queries.append(QAPair(
            id=f"q{i:03d}",
            question=question,
            question_lang="en",
            answer=reference,
            answer_lang="en",
        ))
        answer_doc_ids[f"q{i:03d}"] = doc_id
        answer_langs[f"q{i:03d}"] = lang

    rng = np.random.default_rng(seed)
    for j in range(n_distractors):
        words = " ".join(f"noise{j}w{t}" for t in range(8))
        learn(words)
        lang = "en" if j % 2 == 0 else "es"
        body = f"{words}." if lang == "en" else f"{to_foreign(words)}."
        docs.append(Document(
            id=f"dis-{lang}-{j:03d}",
            title=f"distractor {j}",
            body=body,
            lang=lang,
            date=None,
        ))

    corpus = Corpus(docs)
    embedder = AlignedStubEmbedder(dim=dim, seed=seed)
    translator = MappingTranslator({
        ("en", "es"): lexicon,
        ("es", "en"): {foreign: english for english, foreign in lexicon.items()},
    })
    return BilingualFixture(
        corpus=corpus,
        queries=queries,
        embedder=embedder,
        translator=translator,
        answer_doc_ids=answer_doc_ids,
        answer_langs=answer_langs,
    )


def make_aligned_extractor():
    """Reader stand-in for bilingual fixtures: runs the lexical-overlap stub
    with the question both as-is and word-mapped into the foreign surface,
    keeping whichever finds the stronger spans. Imitates a multilingual
    reader the way AlignedStubEmbedder imitates a multilingual encoder."""
    from crossqa.extraction import stub_extract_spans

    def extract(question, body, max_answers=3):
        native = stub_extract_spans(question, body, max_answers)
        foreign = stub_extract_spans(to_foreign(question), body, max_answers)
        return max(
            native, foreign,
            key=lambda spans: max((s.confidence for s in spans), default=0.0),
        )

    return extract


def make_corpus_lines(records: list[dict]) -> list[str]:
    return [json.dumps(r, ensure_ascii=False) for r in records]


def random_token_text(rng: np.random.Generator, n_tokens: int, vocab: int = 10_000) -> str:
    return " ".join(f"w{rng.integers(vocab)}" for _ in range(n_tokens))


def brute_force_mips(
    pairs: list[tuple[str, np.ndarray]],
    query: np.ndarray,
    k: int,
    candidates: set[str] | None = None,
) -> list[tuple[str, float]]:
    """Independent full-scan oracle: float32-quantized rows, per-row float64
    dots, plain Python sort by (-score, id)."""
    q = np.asarray(query, dtype=np.float64)
    scored = []
    for doc_id, vec in pairs:
        if candidates is not None and doc_id not in candidates:
            continue
        row = np.asarray(vec, dtype=np.float32).astype(np.float64)
        scored.append((doc_id, float(np.dot(row, q))))
    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored[:k]


def embed_documents(corpus: Corpus, embedder) -> list[tuple[str, np.ndarray]]:
    docs = list(corpus)
    vecs = embedder.embed_batch([d.body for d in docs], role="passage")
    return [(d.id, vecs[i]) for i, d in enumerate(docs)]
