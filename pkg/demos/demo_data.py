"""Shared sample data for the demo scripts.

A miniature multilingual corpus about a fictional outbreak. The "es" and "de"
abstracts are word-by-word surface mappings of English text, so a small
dictionary translator and an alignment-aware embedder can stand in for the
real machine-translation and multilingual-encoder services. Everything is
deterministic; no model downloads, no network.
"""

from __future__ import annotations

from datetime import date

from crossqa import Corpus, Document, MappingTranslator, QAPair, StubEmbeddingProvider
from crossqa.textutil import tokenize

ES_PREFIX = "z"
DE_PREFIX = "q"


def map_words(text: str, prefix: str) -> str:
    return " ".join(prefix + w for w in text.split())


class AlignedEmbedder(StubEmbeddingProvider):
    """Hash embedder that strips the synthetic language prefixes first, so a
    sentence and its word-mapped translation land on the same vector. This is
    the demo stand-in for a trained cross-lingual encoder."""

    def embed_batch(self, texts, role="passage"):
        canonical = []
        for text in texts:
            words = []
            for tok in tokenize(text):
                if len(tok) > 1 and tok[0] in (ES_PREFIX, DE_PREFIX):
                    words.append(tok[1:])
                else:
                    words.append(tok)
            canonical.append(" ".join(words))
        return super().embed_batch(canonical, role)


_EN_DOCS = [
    ("en-001", "Fever patterns", "2021-03-12",
     "patients with rovid infection develop high fever within three days. "
     "fever responds to standard antipyretics in most cases."),
    ("en-002", "Vaccine trial", "2021-07-01",
     "the rovid vaccine trial enrolled four thousand adults. "
     "vaccine efficacy against severe outcomes reached ninety percent."),
    ("en-003", "Transmission routes", "2020-11-20",
     "rovid transmission happens mostly through respiratory droplets. "
     "surface contact plays a minor role in spread."),
]

_FOREIGN_DOCS = [
    ("es-001", "es", ES_PREFIX, "2021-05-30",
     "children with rovid infection show mild cough and low fever. "
     "most children recover within one week."),
    ("es-002", "es", ES_PREFIX, "2022-01-15",
     "the rovid mortality rate differs strongly between regions. "
     "older patients face the highest mortality risk."),
    ("de-001", "de", DE_PREFIX, "2021-09-09",
     "long rovid symptoms include fatigue and reduced concentration. "
     "symptoms persist for months in some patients."),
]


def sample_corpus() -> Corpus:
    docs = [
        Document(id=i, title=t, body=b, lang="en", date=date.fromisoformat(d))
        for i, t, d, b in _EN_DOCS
    ]
    for doc_id, lang, prefix, d, body in _FOREIGN_DOCS:
        mapped = " ".join(
            map_words(sentence.strip(), prefix) + "."
            for sentence in body.split(".") if sentence.strip()
        )
        docs.append(Document(
            id=doc_id, title=f"({lang}) study", body=mapped, lang=lang,
            date=date.fromisoformat(d),
        ))
    return Corpus(docs)


def sample_corpus_jsonl_lines() -> list[str]:
    from crossqa.corpus import dumps_record

    return [dumps_record(doc) for doc in sample_corpus()]


def sample_translator() -> MappingTranslator:
    vocab = set()
    for _, _, _, body in _EN_DOCS:
        vocab.update(body.replace(".", "").split())
    for _, _, _, _, body in _FOREIGN_DOCS:
        vocab.update(body.replace(".", "").split())
    vocab.update("what is the of in rate for children symptoms".split())
    lexicons = {}
    for lang, prefix in (("es", ES_PREFIX), ("de", DE_PREFIX)):
        forward = {w: prefix + w for w in vocab}
        lexicons[("en", lang)] = forward
        lexicons[(lang, "en")] = {v: k for k, v in forward.items()}
    return MappingTranslator(lexicons)


def sample_queries() -> list[QAPair]:
    rows = [
        ("q1", "what happens to children with rovid infection",
         "children with rovid infection show mild cough and low fever"),
        ("q2", "how effective is the rovid vaccine",
         "vaccine efficacy against severe outcomes reached ninety percent"),
        ("q3", "what are long rovid symptoms",
         "long rovid symptoms include fatigue and reduced concentration"),
        ("q4", "how does rovid mortality differ",
         "the rovid mortality rate differs strongly between regions"),
    ]
    return [
        QAPair(id=i, question=q, question_lang="en", answer=a, answer_lang="en")
        for i, q, a in rows
    ]


def aligned_extractor(question: str, body: str, max_answers: int = 3):
    """Demo reader: the lexical stub tried with the question as-is and mapped
    into each synthetic language; strongest spans win."""
    from crossqa import stub_extract_spans

    options = [stub_extract_spans(question, body, max_answers)]
    for prefix in (ES_PREFIX, DE_PREFIX):
        options.append(stub_extract_spans(map_words(question, prefix), body, max_answers))
    return max(options, key=lambda spans: max((s.confidence for s in spans), default=0.0))


if __name__ == "__main__":
    for line in sample_corpus_jsonl_lines():
        print(line)
