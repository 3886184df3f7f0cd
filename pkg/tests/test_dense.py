"""Dense index: exact MIPS against a brute-force oracle, file round trips."""

import struct

import numpy as np
import pytest

from crossqa.dense import (
    FORMAT_VERSION,
    MAGIC,
    build_dense_index,
    load_index,
    mips_search,
    save_index,
)
from crossqa.embedding import stub_embed
from crossqa.errors import DimensionMismatchError, IndexCorruptionError, IndexFormatError

from support import brute_force_mips


def random_pairs(rng, n, dim):
    return [(f"doc{i:05d}", rng.uniform(-1.0, 1.0, size=dim)) for i in range(n)]


class TestBuild:
    def test_basis_vectors(self):
        idx = build_dense_index([("a", np.eye(8)[0]), ("b", np.eye(8)[1]), ("c", np.eye(8)[2])])
        assert len(idx) == 3 and idx.dim == 8

    def test_duplicate_id_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            build_dense_index([("a", np.ones(8)), ("a", np.zeros(8))])

    def test_dim_mismatch_rejected(self):
        with pytest.raises(DimensionMismatchError):
            build_dense_index([("a", np.ones(8)), ("b", np.ones(9))])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            build_dense_index([])

    def test_non_finite_rejected(self):
        bad = np.ones(8)
        bad[3] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            build_dense_index([("a", bad)])

    def test_thousand_stub_vectors(self):
        pairs = [(f"d{i}", stub_embed(f"text number {i}", 64, 0)) for i in range(1000)]
        idx = build_dense_index(pairs)
        assert len(idx) == 1000 and idx.dim == 64


class TestSearch:
    def test_identity_on_basis(self):
        e = np.eye(8)
        idx = build_dense_index([("doc1", e[0]), ("doc2", e[1]), ("doc3", e[2])])
        hits = mips_search(idx, e[1], k=1)
        assert len(hits) == 1
        assert hits[0].doc_id == "doc2"
        assert hits[0].score == pytest.approx(1.0, abs=1e-9)
        assert hits[0].rank == 1

    def test_forced_candidate(self):
        e = np.eye(8)
        idx = build_dense_index([("doc1", e[0]), ("doc2", e[1]), ("doc3", e[2])])
        hits = mips_search(idx, e[0], k=5, candidates={"doc3"})
        assert [h.doc_id for h in hits] == ["doc3"]

    def test_empty_candidates_empty_result(self):
        idx = build_dense_index([("a", np.ones(8))])
        assert mips_search(idx, np.ones(8), k=3, candidates=set()) == []

    def test_query_dim_mismatch(self):
        idx = build_dense_index([("a", np.ones(8))])
        with pytest.raises(DimensionMismatchError):
            mips_search(idx, np.ones(9), k=1)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(42)
        pairs = random_pairs(rng, 1000, 64)
        idx = build_dense_index(pairs)
        query = rng.uniform(-1, 1, size=64)
        got = mips_search(idx, query, k=100)
        want = brute_force_mips(pairs, query, k=100)
        assert [h.doc_id for h in got] == [d for d, _ in want]
        for hit, (_, score) in zip(got, want):
            assert hit.score == pytest.approx(score, abs=1e-9)

    def test_tie_break_ascending_id(self):
        vec = np.ones(8) / np.sqrt(8)
        idx = build_dense_index([("z", vec), ("a", vec), ("m", vec)])
        hits = mips_search(idx, vec, k=3)
        assert [h.doc_id for h in hits] == ["a", "m", "z"]

    def test_top_k_prefix_of_top_k_plus_one(self):
        rng = np.random.default_rng(7)
        pairs = random_pairs(rng, 300, 32)
        idx = build_dense_index(pairs)
        for _ in range(10):
            query = rng.normal(size=32)
            for k in (1, 5, 17):
                small = [h.doc_id for h in mips_search(idx, query, k)]
                big = [h.doc_id for h in mips_search(idx, query, k + 1)]
                assert big[:k] == small

    def test_filter_soundness(self):
        rng = np.random.default_rng(8)
        pairs = random_pairs(rng, 200, 16)
        idx = build_dense_index(pairs)
        candidates = {d for d, _ in pairs[::3]}
        hits = mips_search(idx, rng.normal(size=16), k=50, candidates=candidates)
        assert hits and all(h.doc_id in candidates for h in hits)
        assert len(hits) == 50

    def test_score_equals_stored_dot(self):
        rng = np.random.default_rng(9)
        pairs = random_pairs(rng, 50, 24)
        idx = build_dense_index(pairs)
        query = rng.normal(size=24)
        for hit in mips_search(idx, query, k=50):
            stored = idx.matrix[idx.id_to_row[hit.doc_id]].astype(np.float64)
            assert hit.score == pytest.approx(float(stored @ query), abs=1e-9)

    def test_k_must_be_positive(self):
        idx = build_dense_index([("a", np.ones(8))])
        with pytest.raises(ValueError):
            mips_search(idx, np.ones(8), k=0)

    def test_results_capped_by_candidates(self):
        rng = np.random.default_rng(10)
        idx = build_dense_index(random_pairs(rng, 10, 8))
        hits = mips_search(idx, rng.normal(size=8), k=50)
        assert len(hits) == 10
        assert [h.rank for h in hits] == list(range(1, 11))


class TestFileFormat:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(11)
        pairs = random_pairs(rng, 100, 32)
        idx = build_dense_index(pairs)
        path = tmp_path / "index.xqai"
        save_index(idx, path)
        loaded = load_index(path)
        assert loaded.ids == idx.ids
        assert loaded.matrix.tobytes() == idx.matrix.tobytes()
        for _ in range(20):
            query = rng.normal(size=32)
            a = mips_search(idx, query, k=7)
            b = mips_search(loaded, query, k=7)
            assert [(h.doc_id, h.score) for h in a] == [(h.doc_id, h.score) for h in b]

    def test_unicode_ids(self, tmp_path):
        idx = build_dense_index([("документ-1", np.ones(8)), ("文档二", np.zeros(8))])
        save_index(idx, tmp_path / "u.xqai")
        assert load_index(tmp_path / "u.xqai").ids == ["документ-1", "文档二"]

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "bad.xqai"
        path.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(IndexFormatError, match="incompatible"):
            load_index(path)

    def test_wrong_version(self, tmp_path):
        path = tmp_path / "v9.xqai"
        path.write_bytes(MAGIC + struct.pack("<I", FORMAT_VERSION + 1) + b"\x00" * 12)
        with pytest.raises(IndexFormatError, match="version"):
            load_index(path)

    def test_truncated_file(self, tmp_path):
        idx = build_dense_index([("a", np.ones(8)), ("b", np.zeros(8))])
        path = tmp_path / "t.xqai"
        save_index(idx, path)
        data = path.read_bytes()
        path.write_bytes(data[:-5])
        with pytest.raises(IndexCorruptionError):
            load_index(path)

    def test_trailing_garbage(self, tmp_path):
        idx = build_dense_index([("a", np.ones(8))])
        path = tmp_path / "g.xqai"
        save_index(idx, path)
        path.write_bytes(path.read_bytes() + b"x")
        with pytest.raises(IndexCorruptionError):
            load_index(path)
