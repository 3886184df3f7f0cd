"""
Corpus ingestion, statistics, and metadata filtering
====================================================

Walks the corpus lifecycle: parse JSONL records, look at what got rejected,
inspect per-language counts, and slice the collection by language and
publication date.
"""
from datetime import date

from crossqa import DateRange, ingest_corpus, load_store, save_store

from demo_data import sample_corpus_jsonl_lines

lines = sample_corpus_jsonl_lines()
# Sneak in two broken records to show rejection reporting.
lines.append('{"id": "en-001", "title": "dup", "text": "x", "lang": "en"}')
lines.append('{"id": "bad-date", "title": "", "text": "x", "lang": "en", "date": "last tuesday"}')

corpus, stats, rejected = ingest_corpus(lines)

print(f"ingested {stats.total} documents")
print("rejections:")
for line_no, reason in rejected:
    print(f"  line {line_no}: {reason}")

print("\nper-language counts (descending):")
for lang, count in sorted(stats.per_lang.items(), key=lambda kv: -kv[1]):
    print(f"  {lang}: {count}")
print(f"date span: {stats.date_min} .. {stats.date_max}")

print("\nSpanish-only slice:", sorted(corpus.filter_documents(langs={"es"})))
window = DateRange(date(2021, 1, 1), date(2021, 12, 31))
print("published in 2021:", sorted(corpus.filter_documents(date_range=window)))
print("both filters:     ", sorted(corpus.filter_documents(langs={"es"}, date_range=window)))

save_store(corpus, "/tmp/crossqa-demo-store")
reloaded = load_store("/tmp/crossqa-demo-store")
print(f"\nstore round trip: {len(reloaded)} documents, "
      f"doc en-002 title {reloaded.get('en-002').title!r}")
