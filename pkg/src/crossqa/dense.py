"""Exact maximum-inner-product search over passage vectors.

The index is a flat float32 matrix scanned exactly; no approximation, so
retrieval results are deterministic and evaluation is reproducible. Ties are
broken by ascending doc id everywhere. The corpus scale this serves (a few
hundred thousand abstracts) does not need ANN structures.

On-disk format, all little-endian:
    magic ``XQAI`` | u32 version | u32 dim | u64 count
    count id records: u16 byte length + UTF-8 id
    count * dim IEEE-754 float32 values, row-major
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, IndexCorruptionError, IndexFormatError

MAGIC = b"XQAI"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class ScoredHit:
    """One retrieval hit. ``score`` is an inner product or a BM25 score,
    depending on the producing index; ``rank`` is 1-based."""

    doc_id: str
    score: float
    rank: int


class DenseIndex:
    """Immutable flat vector index; rows are stored float32, scored in float64."""

    def __init__(self, ids: Sequence[str], matrix: np.ndarray):
        if matrix.ndim != 2:
            raise ValueError("matrix must be 2-d")
        if len(ids) != matrix.shape[0]:
            raise ValueError("ids and matrix row count disagree")
        self.ids: list[str] = list(ids)
        self.matrix: np.ndarray = np.ascontiguousarray(matrix, dtype=np.float32)
        self.id_to_row: dict[str, int] = {doc_id: row for row, doc_id in enumerate(self.ids)}
        if len(self.id_to_row) != len(self.ids):
            raise ValueError("duplicate doc id in index")
        self._ids_array = np.asarray(self.ids, dtype=object)
        # float64 copy used for scoring; float32 stays the storage contract.
        self._matrix64 = self.matrix.astype(np.float64)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.ids)


def build_dense_index(vectors: Iterable[tuple[str, np.ndarray]]) -> DenseIndex:
    """Build an index over (doc_id, vector) pairs.

    Rejects empty input, duplicate ids, and mixed dimensions. Vectors are
    converted to float32 once here; search and the file format share that
    representation, so in-memory and reloaded indexes score identically.
    """
    ids: list[str] = []
    rows: list[np.ndarray] = []
    dim: int | None = None
    seen: set[str] = set()
    for doc_id, vec in vectors:
        arr = np.asarray(vec, dtype=np.float32)
        if arr.ndim != 1:
            raise ValueError(f"vector for {doc_id!r} is not 1-d")
        if not np.isfinite(arr).all():
            raise ValueError(f"vector for {doc_id!r} has non-finite components")
        if dim is None:
            dim = arr.shape[0]
        elif arr.shape[0] != dim:
            raise DimensionMismatchError(
                f"vector for {doc_id!r} has dim {arr.shape[0]}, expected {dim}"
            )
        if doc_id in seen:
            raise ValueError(f"duplicate doc id {doc_id!r}")
        seen.add(doc_id)
        ids.append(doc_id)
        rows.append(arr)
    if not ids:
        raise ValueError("cannot build an index over zero vectors")
    return DenseIndex(ids, np.stack(rows))


def mips_search(
    index: DenseIndex,
    query: np.ndarray,
    k: int,
    candidates: set[str] | None = None,
) -> list[ScoredHit]:
    """Exact top-k by inner product, restricted to ``candidates`` when given.

    Returns min(k, candidate count) hits sorted by score descending, ties by
    ascending doc id. Candidate filtering happens before scoring, so k results
    come back whenever k candidates exist. An empty candidate set returns an
    empty list rather than erroring; callers treat it as "nothing to search".
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    if q.shape[0] != index.dim:
        raise DimensionMismatchError(f"query dim {q.shape[0]} != index dim {index.dim}")

    # einsum keeps the per-row reduction identical for every row position,
    # so duplicated vectors tie bit-exactly and id tie-breaking is stable;
    # BLAS matmul rounds differently at different row offsets on some shapes.
    if candidates is None:
        scores = np.einsum("ij,j->i", index._matrix64, q)
        ids = index._ids_array
    else:
        row_idx = np.array(
            sorted(index.id_to_row[doc_id] for doc_id in candidates if doc_id in index.id_to_row),
            dtype=np.intp,
        )
        if row_idx.size == 0:
            return []
        scores = np.einsum("ij,j->i", index._matrix64[row_idx], q)
        ids = index._ids_array[row_idx]

    # Primary key: score descending; secondary: doc id ascending.
    order = np.lexsort((ids, -scores))
    top = order[: min(k, scores.shape[0])]
    return [
        ScoredHit(doc_id=str(ids[i]), score=float(scores[i]), rank=rank)
        for rank, i in enumerate(top, start=1)
    ]


def save_index(index: DenseIndex, path: str | Path) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<I", index.dim))
        fh.write(struct.pack("<Q", len(index)))
        for doc_id in index.ids:
            raw = doc_id.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise ValueError(f"doc id too long to serialize: {len(raw)} bytes")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
        fh.write(np.ascontiguousarray(index.matrix, dtype="<f4").tobytes())


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise IndexCorruptionError(f"truncated index file while reading {what}")
    return data


def load_index(path: str | Path) -> DenseIndex:
    """Load an index written by :func:`save_index`; bit-exact round trip.

    Wrong magic or version raises :class:`IndexFormatError` ("incompatible
    index"); short reads or trailing bytes raise :class:`IndexCorruptionError`.
    """
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise IndexFormatError(f"incompatible index: bad magic {magic!r}")
        (version,) = struct.unpack("<I", _read_exact(fh, 4, "version"))
        if version != FORMAT_VERSION:
            raise IndexFormatError(
                f"incompatible index: version {version}, expected {FORMAT_VERSION}"
            )
        (dim,) = struct.unpack("<I", _read_exact(fh, 4, "dim"))
        (count,) = struct.unpack("<Q", _read_exact(fh, 8, "count"))
        ids = []
        for i in range(count):
            (id_len,) = struct.unpack("<H", _read_exact(fh, 2, f"id {i} length"))
            ids.append(_read_exact(fh, id_len, f"id {i}").decode("utf-8"))
        raw = _read_exact(fh, count * dim * 4, "vector block")
        if fh.read(1) != b"":
            raise IndexCorruptionError("trailing bytes after vector block")
    matrix = np.frombuffer(raw, dtype="<f4").reshape(count, dim)
    return DenseIndex(ids, matrix)
