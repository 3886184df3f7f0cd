"""Embedding providers and vector similarity.

Two providers implement one contract: a deterministic hash-based stub for
tests and offline work, and an HTTP client for a model service. Providers
return unit-norm float64 row vectors, so on the serving path inner product
and cosine coincide.

The stub is bit-reproducible: token hashing uses FNV-1a-64 and component
generation uses a splitmix64 stream, both fixed here so independently written
implementations produce identical vectors for identical (text, dim, seed).
"""

from __future__ import annotations

import os
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, EmptyTextError, TransportError
from .textutil import tokenize

ROLES = ("query", "passage", "sentence_sim")

DEFAULT_STUB_DIM = 64
DEFAULT_STUB_SEED = 0
MIN_STUB_DIM = 8

_MASK64 = (1 << 64) - 1
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_SM64_GOLDEN = 0x9E3779B97F4A7C15
_SM64_MIX1 = 0xBF58476D1CE4E5B9
_SM64_MIX2 = 0x94D049BB133111EB


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


def _splitmix64_unit_floats(seed: int, n: int) -> np.ndarray:
    """First ``n`` outputs of a splitmix64 stream, mapped into [-1, 1).

    Each output takes the top 53 bits of the mixed state, scales by 2**-53
    and stretches to [-1, 1). All steps are exact in float64, which is what
    makes the stub reproducible across platforms.
    """
    steps = np.arange(1, n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK64) + steps * np.uint64(_SM64_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_SM64_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_SM64_MIX2)
        z = z ^ (z >> np.uint64(31))
    return ((z >> np.uint64(11)).astype(np.float64) * 2.0**-53) * 2.0 - 1.0


@lru_cache(maxsize=65536)
def _token_vector(token_hash: int, dim: int) -> np.ndarray:
    vec = _splitmix64_unit_floats(token_hash, dim)
    vec.setflags(write=False)
    return vec


def stub_embed(text: str, dim: int = DEFAULT_STUB_DIM, seed: int = DEFAULT_STUB_SEED) -> np.ndarray:
    """Deterministic bag-of-tokens embedding.

    Per token t, ``h = fnv1a64(utf8(t)) XOR seed`` seeds a splitmix64 stream
    yielding ``dim`` components in [-1, 1). Token vectors are accumulated in
    sorted hash order (so any permutation of the same token multiset is
    bit-identical) and the sum is L2-normalized. Token multiplicity counts.

    Raises :class:`EmptyTextError` when the text has zero tokens.
    """
    if dim < MIN_STUB_DIM:
        raise ValueError(f"stub dim must be >= {MIN_STUB_DIM}, got {dim}")
    tokens = tokenize(text)
    if not tokens:
        raise EmptyTextError("empty text")
    hashes = sorted(fnv1a64(tok.encode("utf-8")) ^ (seed & _MASK64) for tok in tokens)
    acc = np.zeros(dim, dtype=np.float64)
    for h in hashes:
        acc += _token_vector(h, dim)
    norm = float(np.linalg.norm(acc))
    if norm == 0.0:
        raise EmptyTextError("token vectors cancelled to the zero vector")
    return acc / norm


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity of two nonzero vectors, clipped into [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise DimensionMismatchError(f"cosine needs equal 1-d shapes, got {u.shape} and {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine is undefined for the zero vector")
    return min(1.0, max(-1.0, float(np.dot(u, v)) / (nu * nv)))


def _check_batch(texts: Sequence[str], role: str) -> None:
    if role not in ROLES:
        raise ValueError(f"unknown embedding role {role!r}, expected one of {ROLES}")
    if len(texts) == 0:
        raise ValueError("embed_batch requires a nonempty list of texts")


class StubEmbeddingProvider:
    """In-process provider wrapping :func:`stub_embed`.

    The role does not change the vector; the stub stands in for every encoder
    at once so a single fixture can drive retrieval and evaluation.
    """

    def __init__(self, dim: int = DEFAULT_STUB_DIM, seed: int = DEFAULT_STUB_SEED):
        if dim < MIN_STUB_DIM:
            raise ValueError(f"stub dim must be >= {MIN_STUB_DIM}, got {dim}")
        self._dim = dim
        self.seed = seed

    @property
    def dim(self) -> int:
        return self._dim

    def embed_batch(self, texts: Sequence[str], role: str = "passage") -> np.ndarray:
        """Embed texts in order; returns a (len(texts), dim) float64 array."""
        _check_batch(texts, role)
        return np.stack([stub_embed(t, self._dim, self.seed) for t in texts])

    def probe(self, timeout: float = 1.0) -> bool:
        return True


class RemoteEmbeddingProvider:
    """HTTP client for the embedding wire contract.

    Request ``{"texts": [...], "role": ..., "normalize": true}`` yields
    ``{"dim": n, "vectors": [[...], ...]}``. The dimension is discovered from
    the first response rather than configured.
    """

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint
        self.timeout = timeout
        self._dim: int | None = None

    @property
    def dim(self) -> int:
        if self._dim is None:
            self.embed_batch(["handshake"], role="passage")
        assert self._dim is not None
        return self._dim

    def embed_batch(self, texts: Sequence[str], role: str = "passage") -> np.ndarray:
        import httpx

        _check_batch(texts, role)
        payload = {"texts": list(texts), "role": role, "normalize": True}
        try:
            resp = httpx.post(self.endpoint, json=payload, timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
        except httpx.HTTPError as exc:
            raise TransportError(f"embedding endpoint {self.endpoint} failed: {exc}") from exc
        try:
            dim = int(data["dim"])
            vectors = np.asarray(data["vectors"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise TransportError(f"malformed embedding response: {exc}") from exc
        if vectors.shape != (len(texts), dim):
            raise TransportError(
                f"embedding response shape {vectors.shape} does not match {len(texts)} texts of dim {dim}"
            )
        self._dim = dim
        return vectors

    def probe(self, timeout: float = 1.0) -> bool:
        import httpx

        try:
            httpx.post(
                self.endpoint,
                json={"texts": ["ping"], "role": "query", "normalize": True},
                timeout=timeout,
            )
            return True
        except httpx.HTTPError:
            return False


def provider_from_env(env=os.environ):
    """Select the embedding provider: EMBED_ENDPOINT if set, else the stub.

    The stub reads STUB_SEED (default 0) and STUB_DIM (default 64).
    """
    endpoint = env.get("EMBED_ENDPOINT")
    if endpoint:
        return RemoteEmbeddingProvider(endpoint)
    return StubEmbeddingProvider(
        dim=int(env.get("STUB_DIM", DEFAULT_STUB_DIM)),
        seed=int(env.get("STUB_SEED", DEFAULT_STUB_SEED)),
    )
