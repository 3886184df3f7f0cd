"""Cross-lingual open-retrieval question answering over multilingual corpora.

The engine answers English questions from a corpus of scientific abstracts in
many languages: documents and queries are encoded into a shared vector space,
exact inner-product search retrieves candidates under language and date
filters, a reader extracts answer spans, documents re-rank by answer
confidence, and non-English results are translated for display. A BM25 index
with translated-query federation provides the lexical baseline, and the
evaluation harness scores retrieval with FM@k and reading with EM/F1.
"""

from .corpus import (
    Corpus,
    CorpusStats,
    DateRange,
    Document,
    ingest_corpus,
    ingest_corpus_file,
    load_store,
    save_store,
)
from .dataset import (
    EN2ALL_TARGET_LANGS,
    FilterConfig,
    FilterReport,
    QAPair,
    dataset_stats,
    filter_translations,
    generate_en2all,
    load_dataset,
    save_dataset,
)
from .dense import (
    DenseIndex,
    ScoredHit,
    build_dense_index,
    load_index,
    mips_search,
    save_index,
)
from .embedding import (
    RemoteEmbeddingProvider,
    StubEmbeddingProvider,
    cosine,
    provider_from_env,
    stub_embed,
)
from .errors import (
    CrossQAError,
    DatasetError,
    DimensionMismatchError,
    EmptyTextError,
    ExtractionError,
    IndexCorruptionError,
    IndexFormatError,
    TranslationError,
    TransportError,
    UnknownLanguageError,
)
from .evaluation import (
    EvalConfig,
    ReadingEvalReport,
    RetrievalEvalReport,
    exact_match,
    format_benchmark_table,
    fuzzy_match_at_k,
    reading_metrics,
    run_retrieval_benchmark,
    split_sentences,
    token_f1,
)
from .extraction import AnswerSpan, RemoteExtractor, extractor_from_env, stub_extract_spans
from .lexical import (
    Bm25Params,
    InvertedIndex,
    bm25_search,
    build_inverted_index,
    federated_search,
    load_bm25,
    save_bm25,
)
from .pipeline import (
    PipelineComponents,
    QueryOptions,
    RankedResult,
    answer_query,
    assign_highlight_colors,
    rerank,
)
from .translation import (
    EchoTranslator,
    MappingTranslator,
    RemoteTranslator,
    translator_from_env,
)

__version__ = "0.1.0"
