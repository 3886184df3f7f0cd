"""
The full pipeline: retrieve, extract, re-rank, translate, highlight
===================================================================

One call runs the whole flow. Answer spans are printed with bracket markers
standing in for the UI's colored highlights (color index 0 is the single-
answer red). A date range that matches nothing triggers the documented
fallback instead of an empty page.
"""
from datetime import date

from crossqa import DateRange, PipelineComponents, QueryOptions, answer_query, build_dense_index

from demo_data import AlignedEmbedder, aligned_extractor, sample_corpus, sample_translator

corpus = sample_corpus()
embedder = AlignedEmbedder(dim=64, seed=0)
docs = list(corpus)
vectors = embedder.embed_batch([d.body for d in docs], role="passage")
components = PipelineComponents(
    corpus=corpus,
    index=build_dense_index((d.id, vectors[i]) for i, d in enumerate(docs)),
    embedder=embedder,
    extractor=aligned_extractor,
    translator=sample_translator(),
)


def show(results):
    for result in results:
        doc = result.document
        print(f"\n  [{doc.date}] {doc.id} ({doc.lang})  retrieval={result.retrieval_score:.3f}")
        body = doc.body
        rendered = ""
        cursor = 0
        for span, color in zip(sorted(result.answers, key=lambda s: s.start_char),
                               result.highlight_colors):
            rendered += body[cursor:span.start_char] + f"<c{color}>{span.text}</c{color}>"
            cursor = span.end_char
        rendered += body[cursor:]
        print(f"    {rendered}")
        if result.answer_translations:
            for span, translated in zip(result.answers, result.answer_translations):
                print(f"    answer (en): {translated}")
        if result.fallback_used:
            print("    note: requested date range had no documents; searched all dates")


query = "what happens to children with rovid infection"
print(f"query: {query!r}")
show(answer_query(query, QueryOptions(k=2), components))

print("\nsame query, restricted to 1999 (no documents exist there):")
opts = QueryOptions(k=2, date_range=DateRange(date(1999, 1, 1), date(1999, 12, 31)))
show(answer_query(query, opts, components))
