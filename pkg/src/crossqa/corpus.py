"""Multilingual abstract corpus: data model, JSONL ingestion, filtering, stats.

A corpus is immutable once ingested. On disk a store directory holds an
append-only ``records.jsonl`` log plus a small ``meta.json``; loading replays
the log and rebuilds the id map in memory. Re-ingestion produces a fresh
snapshot that consumers swap in atomically.

Corpus records are UTF-8 JSONL objects with keys ``id``, ``title``, ``text``,
``lang`` and optional ``date`` ("YYYY-MM-DD"), ``source``, ``parallel_group``.
Unknown keys are ignored. Records that fail validation are rejected with a
line number and reason, never silently dropped or coerced.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import CrossQAError, UnknownLanguageError

# Two-letter ISO 639-1 codes. Kept as a module-level registry so ingest and
# filters agree on what counts as a known language.
ISO_639_1_CODES = frozenset(
    """
    aa ab ae af ak am an ar as av ay az ba be bg bh bi bm bn bo br bs ca ce ch
    co cr cs cu cv cy da de dv dz ee el en eo es et eu fa ff fi fj fo fr fy ga
    gd gl gn gu gv ha he hi ho hr ht hu hy hz ia id ie ig ii ik io is it iu ja
    jv ka kg ki kj kk kl km kn ko kr ks ku kv kw ky la lb lg li ln lo lt lu lv
    mg mh mi mk ml mn mr ms mt my na nb nd ne ng nl nn no nr nv ny oc oj om or
    os pa pi pl ps pt qu rm rn ro ru rw sa sc sd se sg si sk sl sm sn so sq sr
    ss st su sv sw ta te tg th ti tk tl tn to tr ts tt tw ty ug uk ur uz ve vi
    vo wa wo xh yi yo za zh zu
    """.split()
)

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")

STORE_RECORDS_FILE = "records.jsonl"
STORE_META_FILE = "meta.json"
STORE_FORMAT = "crossqa-store"
STORE_VERSION = 1


class RecordError(CrossQAError):
    """A single corpus record failed validation; carries the reason."""


@dataclass(frozen=True)
class Document:
    """One corpus record: a scientific abstract with language and date metadata.

    ``parallel_group`` links translations of the same abstract across
    languages; it carries no behavior here beyond round-tripping.
    """

    id: str
    title: str
    body: str
    lang: str
    date: date | None = None
    source: str | None = None
    parallel_group: str | None = None


@dataclass(frozen=True)
class DateRange:
    """Inclusive publication-date window; either bound may be open.

    Serialized as ``date_from`` / ``date_to``. A document without a date never
    falls inside a bounded range: date filters are a trust signal, so undated
    records are excluded rather than assumed to match.
    """

    start: date | None = None
    end: date | None = None

    def __post_init__(self):
        if self.start is not None and self.end is not None and self.start > self.end:
            raise ValueError(f"date range start {self.start} is after end {self.end}")

    @property
    def bounded(self) -> bool:
        return self.start is not None or self.end is not None

    def contains(self, d: date | None) -> bool:
        if not self.bounded:
            return True
        if d is None:
            return False
        if self.start is not None and d < self.start:
            return False
        if self.end is not None and d > self.end:
            return False
        return True


@dataclass(frozen=True)
class CorpusStats:
    """Exact corpus counts; ``sum(per_lang.values()) == total`` always holds."""

    total: int
    per_lang: Mapping[str, int]
    date_min: date | None = None
    date_max: date | None = None

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "per_lang": dict(sorted(self.per_lang.items(), key=lambda kv: (-kv[1], kv[0]))),
            "date_min": self.date_min.isoformat() if self.date_min else None,
            "date_max": self.date_max.isoformat() if self.date_max else None,
        }


def parse_record(obj: object, registry: frozenset[str] = ISO_639_1_CODES) -> Document:
    """Validate one decoded JSONL object and build a Document.

    Raises :class:`RecordError` with a human-readable reason on any violation.
    """
    if not isinstance(obj, dict):
        raise RecordError("record is not a JSON object")
    doc_id = obj.get("id")
    if not isinstance(doc_id, str) or not doc_id:
        raise RecordError("missing or empty id")
    title = obj.get("title")
    if not isinstance(title, str):
        raise RecordError("missing title (empty string is allowed)")
    body = obj.get("text")
    if not isinstance(body, str) or not body.strip():
        raise RecordError("missing or empty text")
    lang = obj.get("lang")
    if not isinstance(lang, str) or lang not in registry:
        raise RecordError(f"unknown language code {lang!r}")
    raw_date = obj.get("date")
    parsed_date: date | None = None
    if raw_date is not None:
        if not isinstance(raw_date, str) or not _DATE_RE.match(raw_date):
            raise RecordError(f"bad date format {raw_date!r} (expected YYYY-MM-DD)")
        try:
            parsed_date = date.fromisoformat(raw_date)
        except ValueError:
            raise RecordError(f"bad date format {raw_date!r} (not a calendar date)")
    source = obj.get("source")
    if source is not None and not isinstance(source, str):
        raise RecordError("source must be a string")
    group = obj.get("parallel_group")
    if group is not None and not isinstance(group, str):
        raise RecordError("parallel_group must be a string")
    return Document(
        id=doc_id, title=title, body=body, lang=lang,
        date=parsed_date, source=source, parallel_group=group,
    )


def document_to_record(doc: Document) -> dict:
    """Canonical JSONL object for a document (stable key order, no nulls)."""
    record: dict = {"id": doc.id, "title": doc.title, "text": doc.body, "lang": doc.lang}
    if doc.date is not None:
        record["date"] = doc.date.isoformat()
    if doc.source is not None:
        record["source"] = doc.source
    if doc.parallel_group is not None:
        record["parallel_group"] = doc.parallel_group
    return record


def dumps_record(doc: Document) -> str:
    return json.dumps(document_to_record(doc), ensure_ascii=False, separators=(",", ":"))


class Corpus:
    """Immutable document collection with id lookup and metadata filtering."""

    def __init__(self, documents: Sequence[Document], registry: frozenset[str] = ISO_639_1_CODES):
        self._docs: dict[str, Document] = {}
        self._registry = registry
        for doc in documents:
            if doc.id in self._docs:
                raise ValueError(f"duplicate document id {doc.id!r}")
            self._docs[doc.id] = doc

    def __len__(self) -> int:
        return len(self._docs)

    def __iter__(self) -> Iterator[Document]:
        return iter(self._docs.values())

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._docs

    @property
    def ids(self) -> list[str]:
        return list(self._docs)

    @property
    def languages(self) -> set[str]:
        return {doc.lang for doc in self._docs.values()}

    def get(self, doc_id: str) -> Document:
        try:
            return self._docs[doc_id]
        except KeyError:
            raise KeyError(f"no document with id {doc_id!r}") from None

    def filter_documents(
        self,
        langs: Iterable[str] | None = None,
        date_range: DateRange | None = None,
    ) -> set[str]:
        """Ids of documents matching both filters; absent filters mean "all".

        Raises :class:`UnknownLanguageError` for a lang code outside the
        registry. Documents without a date are excluded by any bounded range.
        """
        lang_set: set[str] | None = None
        if langs is not None:
            lang_set = set(langs)
            for code in sorted(lang_set):
                if code not in self._registry:
                    raise UnknownLanguageError(code, "language filter")
        out = set()
        for doc in self._docs.values():
            if lang_set is not None and doc.lang not in lang_set:
                continue
            if date_range is not None and not date_range.contains(doc.date):
                continue
            out.add(doc.id)
        return out

    def stats(self) -> CorpusStats:
        per_lang: dict[str, int] = {}
        dates = []
        for doc in self._docs.values():
            per_lang[doc.lang] = per_lang.get(doc.lang, 0) + 1
            if doc.date is not None:
                dates.append(doc.date)
        return CorpusStats(
            total=len(self._docs),
            per_lang=per_lang,
            date_min=min(dates) if dates else None,
            date_max=max(dates) if dates else None,
        )


def ingest_corpus(
    lines: Iterable[str],
    registry: frozenset[str] = ISO_639_1_CODES,
) -> tuple[Corpus, CorpusStats, list[tuple[int, str]]]:
    """Ingest JSONL lines into a corpus.

    Returns (corpus, stats, rejected) where ``rejected`` pairs each bad line's
    1-based number with the rejection reason. Stats reflect stored records
    only. Blank lines are skipped.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    rejected: list[tuple[int, str]] = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            rejected.append((line_no, f"invalid JSON: {exc.msg}"))
            continue
        try:
            doc = parse_record(obj, registry)
        except RecordError as exc:
            rejected.append((line_no, str(exc)))
            continue
        if doc.id in seen:
            rejected.append((line_no, "duplicate id"))
            continue
        seen.add(doc.id)
        docs.append(doc)
    corpus = Corpus(docs, registry)
    return corpus, corpus.stats(), rejected


def ingest_corpus_file(path: str | Path, registry: frozenset[str] = ISO_639_1_CODES):
    with open(path, "r", encoding="utf-8") as fh:
        return ingest_corpus(fh, registry)


def save_store(corpus: Corpus, store_dir: str | Path) -> None:
    """Write the append-only record log and metadata for a corpus snapshot."""
    store = Path(store_dir)
    store.mkdir(parents=True, exist_ok=True)
    with open(store / STORE_RECORDS_FILE, "w", encoding="utf-8") as fh:
        for doc in corpus:
            fh.write(dumps_record(doc))
            fh.write("\n")
    meta = {"format": STORE_FORMAT, "version": STORE_VERSION, "total": len(corpus)}
    with open(store / STORE_META_FILE, "w", encoding="utf-8") as fh:
        json.dump(meta, fh)
        fh.write("\n")


def load_store(store_dir: str | Path) -> Corpus:
    """Rebuild a corpus snapshot from its store directory.

    The log was written by :func:`save_store`, so every record must parse;
    any rejection means the store is damaged and loading fails loudly.
    """
    store = Path(store_dir)
    meta_path = store / STORE_META_FILE
    if meta_path.exists():
        with open(meta_path, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
        if meta.get("format") != STORE_FORMAT or meta.get("version") != STORE_VERSION:
            raise CrossQAError(f"incompatible store at {store}: {meta}")
    corpus, _, rejected = ingest_corpus_file(store / STORE_RECORDS_FILE)
    if rejected:
        line_no, reason = rejected[0]
        raise CrossQAError(
            f"corrupt store at {store}: line {line_no}: {reason} "
            f"({len(rejected)} bad records total)"
        )
    return corpus
