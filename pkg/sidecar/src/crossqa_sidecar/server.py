"""Wire-contract service: /embed, /extract, /translate.

The payload shapes are exactly what the engine's clients send and expect:

    POST /embed     {"texts", "role", "normalize"} -> {"dim", "vectors"}
    POST /extract   {"question", "context", "max_answers"} -> {"spans"}
    POST /translate {"texts", "source", "target"} -> {"texts"}

Oversize inputs are truncated and flagged with ``"truncated": true`` in the
response. Unknown translation pairs return a structured error body. Without
trained checkpoints (MODEL_DIR unset or empty) the service runs randomly
initialized tiny models with a fixed seed, so responses are deterministic and
schema-correct even before any training has happened.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path

import torch
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .models import ReaderModel, RetrieverModel, build_encoder, predict_spans
from .training import load_reader, load_retriever

logger = logging.getLogger(__name__)

RETRIEVER_CHECKPOINT = "retriever.pt"
READER_CHECKPOINT = "reader.pt"

EMBED_ROLES = ("query", "passage", "sentence_sim")


class PassthroughTranslator:
    """Deterministic stand-in when no translation model artifacts exist.

    Echoes the input; a real deployment mounts MarianMT checkpoints under
    MODEL_DIR and gets actual translation through the same wire contract.
    """

    known_pairs: frozenset | None = None  # None: accepts any pair

    def translate(self, texts, source, target):
        return list(texts)


class HfMarianTranslator:
    """MarianMT via transformers, one model per language pair directory
    (MODEL_DIR/marian-<src>-<tgt>). Only known pairs are served."""

    def __init__(self, model_dir: Path):
        self.model_dir = model_dir
        self._cache = {}
        self.known_pairs = frozenset(
            tuple(p.name.split("-")[1:3])
            for p in model_dir.glob("marian-*-*")
            if p.is_dir()
        )

    def translate(self, texts, source, target):
        if (source, target) not in self.known_pairs:
            raise KeyError(f"{source}->{target}")
        if (source, target) not in self._cache:
            from transformers import MarianMTModel, MarianTokenizer

            path = self.model_dir / f"marian-{source}-{target}"
            self._cache[(source, target)] = (
                MarianTokenizer.from_pretrained(path),
                MarianMTModel.from_pretrained(path),
            )
        tokenizer, model = self._cache[(source, target)]
        batch = tokenizer(list(texts), return_tensors="pt", padding=True, truncation=True)
        with torch.no_grad():
            generated = model.generate(**batch)
        return tokenizer.batch_decode(generated, skip_special_tokens=True)


class SidecarState:
    """Loaded models; falls back to seeded random-init tiny models."""

    def __init__(self, model_dir: str | None = None, seed: int = 0):
        base = Path(model_dir) if model_dir else None
        self.retriever: RetrieverModel
        self.reader: ReaderModel
        if base and (base / RETRIEVER_CHECKPOINT).exists():
            self.retriever = load_retriever(base / RETRIEVER_CHECKPOINT)
            logger.info("loaded retriever checkpoint from %s", base)
        else:
            self.retriever = RetrieverModel(build_encoder("tiny:64x2", seed=seed))
            logger.info("no retriever checkpoint; serving a seeded untrained encoder")
        if base and (base / READER_CHECKPOINT).exists():
            self.reader = load_reader(base / READER_CHECKPOINT)
            logger.info("loaded reader checkpoint from %s", base)
        else:
            self.reader = ReaderModel(build_encoder("tiny:64x2", seed=seed + 1))
            logger.info("no reader checkpoint; serving a seeded untrained reader")
        self.retriever.eval()
        self.reader.eval()
        if base and any(base.glob("marian-*-*")):
            self.translator = HfMarianTranslator(base)
        else:
            self.translator = PassthroughTranslator()


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": {"code": code, "message": message}})


def create_app(state: SidecarState | None = None) -> FastAPI:
    state = state or SidecarState(os.environ.get("MODEL_DIR"))
    app = FastAPI(title="crossqa-sidecar", docs_url=None, redoc_url=None)
    app.state.models = state

    @app.post("/embed")
    async def embed(request: Request):
        payload = await request.json()
        texts = payload.get("texts")
        role = payload.get("role", "passage")
        if not isinstance(texts, list) or not texts or not all(isinstance(t, str) for t in texts):
            return _error(400, "bad_request", "texts must be a nonempty list of strings")
        if role not in EMBED_ROLES:
            return _error(400, "bad_request", f"role must be one of {EMBED_ROLES}")
        normalize = bool(payload.get("normalize", True))
        with torch.no_grad():
            vectors, truncated = state.retriever.embed_texts(texts, normalize=normalize)
        body = {"dim": int(vectors.shape[1]), "vectors": vectors.tolist()}
        if truncated:
            body["truncated"] = True
        return body

    @app.post("/extract")
    async def extract(request: Request):
        payload = await request.json()
        question = payload.get("question")
        context = payload.get("context")
        if not isinstance(question, str) or not question.strip():
            return _error(400, "bad_request", "question must be a nonempty string")
        if not isinstance(context, str) or not context.strip():
            return _error(400, "bad_request", "context must be a nonempty string")
        max_answers = payload.get("max_answers", 3)
        if not isinstance(max_answers, int) or max_answers < 1:
            return _error(400, "bad_request", "max_answers must be a positive integer")
        spans, truncated = predict_spans(state.reader, question, context, max_answers)
        body = {"spans": spans}
        if truncated:
            body["truncated"] = True
        return body

    @app.post("/translate")
    async def translate(request: Request):
        payload = await request.json()
        texts = payload.get("texts")
        source, target = payload.get("source"), payload.get("target")
        if not isinstance(texts, list) or not texts:
            return _error(400, "bad_request", "texts must be a nonempty list")
        if not isinstance(source, str) or not isinstance(target, str):
            return _error(400, "bad_request", "source and target language codes required")
        try:
            out = state.translator.translate(texts, source, target)
        except KeyError:
            return _error(400, "unknown_language_pair",
                          f"no translation model for {source}->{target}")
        return {"texts": out}

    @app.get("/health")
    async def health():
        return {
            "status": "ok",
            "retriever": type(state.retriever).__name__,
            "translator": type(state.translator).__name__,
        }

    return app
