"""Model service for the crossqa engine.

Serves the embedding, span-extraction, and translation wire contracts, and
implements the two training procedures: a contrastive bi-encoder retriever
(in-batch negatives over raw inner products) and a span-extraction reader
(start/end cross-entropy, optional pretraining stage).
"""

from .models import ReaderModel, RetrieverModel, build_encoder, predict_spans
from .training import (
    ReaderTrainConfig,
    RetrieverTrainConfig,
    train_reader,
    train_retriever,
)

__version__ = "0.1.0"
