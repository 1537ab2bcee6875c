import numpy as np
import pytest

from paraspan.core import Span, whitespace_tokenize
from paraspan.embeddings import (
    EmbeddingMatrix,
    FileEmbeddingProvider,
    HashEmbeddingProvider,
    StoreWriter,
    pair_key,
    span_pool,
)
from paraspan.errors import DimMismatch, InvalidSpan, PairNotFound

SRC = whitespace_tokenize("he will confirm the report")
REF = whitespace_tokenize("he is going to verify it")


@pytest.fixture(scope="module")
def provider():
    return HashEmbeddingProvider(dim=32, seed=0)


class TestHashProvider:
    def test_layout_row_count(self, provider):
        src = whitespace_tokenize("a b c d")
        ref = whitespace_tokenize("p q r s t")
        matrix = provider.embed_pair(src, ref)
        assert matrix.vectors.shape == (4 + 5 + 3, 32)

    def test_default_dim_is_768(self):
        assert HashEmbeddingProvider().dim == 768

    def test_deterministic(self, provider):
        m1 = provider.embed_pair(SRC, REF)
        m2 = provider.embed_pair(SRC, REF)
        assert np.array_equal(m1.vectors, m2.vectors)
        fresh = HashEmbeddingProvider(dim=32, seed=0).embed_pair(SRC, REF)
        assert np.array_equal(m1.vectors, fresh.vectors)

    def test_context_sensitivity(self, provider):
        a = whitespace_tokenize("please confirm the booking now")
        b = whitespace_tokenize("they confirm nothing on tv")
        row_a = provider.embed_pair(a, REF).vectors[1 + 1]
        row_b = provider.embed_pair(b, REF).vectors[1 + 1]
        cos = float(row_a @ row_b)  # rows are unit-norm
        assert cos < 1.0 - 1e-6

    def test_rows_unit_norm(self, provider):
        matrix = provider.embed_pair(SRC, REF)
        norms = np.linalg.norm(matrix.vectors, axis=1)
        assert np.allclose(norms, 1.0)


class TestSpanPool:
    def test_single_token_is_row(self, provider):
        matrix = provider.embed_pair(SRC, REF)
        assert np.array_equal(
            span_pool(matrix, Span(2, 2), "source"), matrix.vectors[1 + 2]
        )

    def test_arithmetic_mean(self):
        vectors = np.zeros((2 + 2 + 3, 4))
        vectors[1] = 1.0
        vectors[2] = 3.0
        matrix = EmbeddingMatrix(vectors=vectors, n=2, m=2)
        assert np.array_equal(span_pool(matrix, Span(0, 1), "source"), np.full(4, 2.0))

    def test_reference_base_offset(self, provider):
        src = whitespace_tokenize("a b c d")
        matrix = provider.embed_pair(src, REF)
        assert np.array_equal(
            span_pool(matrix, Span(0, 0), "reference"), matrix.vectors[6]
        )

    def test_full_side_equals_mean_of_rows(self, provider):
        matrix = provider.embed_pair(SRC, REF)
        base = matrix.side_base("reference")
        want = matrix.vectors[base : base + matrix.m].mean(axis=0)
        got = span_pool(matrix, Span(0, matrix.m - 1), "reference")
        assert np.allclose(got, want)

    def test_out_of_range(self, provider):
        matrix = provider.embed_pair(SRC, REF)
        with pytest.raises(InvalidSpan):
            span_pool(matrix, Span(0, len(SRC)), "source")


class TestMatrixValidation:
    def test_row_count_enforced(self):
        with pytest.raises(DimMismatch):
            EmbeddingMatrix(vectors=np.zeros((5, 4)), n=2, m=2)

    def test_rejects_non_finite(self):
        vectors = np.zeros((7, 4))
        vectors[0, 0] = np.nan
        with pytest.raises(ValueError):
            EmbeddingMatrix(vectors=vectors, n=2, m=2)


class TestFileStore:
    def _write(self, tmp_path, provider, pairs):
        path = tmp_path / "store.bin"
        with StoreWriter(path, dim=provider.dim) as writer:
            for src, ref in pairs:
                writer.add(src, ref, provider.embed_pair(src, ref))
        return path

    def test_round_trip(self, tmp_path, provider):
        path = self._write(tmp_path, provider, [(SRC, REF)])
        reader = FileEmbeddingProvider(path)
        got = reader.embed_pair(SRC, REF)
        want = provider.embed_pair(SRC, REF)
        assert got.n == want.n and got.m == want.m
        # store holds float32, so compare at float32 precision
        assert np.array_equal(got.vectors, want.vectors.astype(np.float32).astype(np.float64))
        reader.close()

    def test_pair_not_found(self, tmp_path, provider):
        path = self._write(tmp_path, provider, [(SRC, REF)])
        reader = FileEmbeddingProvider(path)
        with pytest.raises(PairNotFound):
            reader.embed_pair(REF, SRC)
        reader.close()

    def test_deduplicates_by_pair_key(self, tmp_path, provider):
        path = tmp_path / "store.bin"
        with StoreWriter(path, dim=provider.dim) as writer:
            assert writer.add(SRC, REF, provider.embed_pair(SRC, REF))
            assert not writer.add(SRC, REF, provider.embed_pair(SRC, REF))
        reader = FileEmbeddingProvider(path)
        assert reader.count == 1
        reader.close()

    def test_header_count_and_offsets(self, tmp_path, provider):
        pairs = [
            (whitespace_tokenize(f"src sentence {i}"), whitespace_tokenize(f"ref text {i}"))
            for i in range(5)
        ]
        path = self._write(tmp_path, provider, pairs)
        reader = FileEmbeddingProvider(path)
        assert reader.count == 5
        for src, ref in pairs:
            assert pair_key(src, ref) in reader.keys()
            matrix = reader.embed_pair(src, ref)
            assert matrix.vectors.shape == (len(src) + len(ref) + 3, provider.dim)
        reader.close()

    def test_dim_mismatch_on_wrong_lengths(self, tmp_path, provider):
        path = self._write(tmp_path, provider, [(SRC, REF)])
        reader = FileEmbeddingProvider(path)
        other = whitespace_tokenize(" ".join(SRC.tokens + ("extra",)))
        # same raw text is impossible here, so fake a key collision via direct call
        with pytest.raises(PairNotFound):
            reader.embed_pair(other, REF)
        reader.close()

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "store.bin"
        path.write_bytes(b"XXXX" + b"\x00" * 20)
        (tmp_path / "store.bin.index.json").write_text("{}")
        with pytest.raises(ValueError):
            FileEmbeddingProvider(path)


class TestProviderInterchangeability:
    def test_same_matrices_behind_both_providers(self, tmp_path):
        """File-backed and hash providers are drop-in equivalents for consumers."""
        provider = HashEmbeddingProvider(dim=16, seed=1)
        pairs = [
            (whitespace_tokenize("one two three"), whitespace_tokenize("uno dos tres")),
            (SRC, REF),
        ]
        path = tmp_path / "store.bin"
        with StoreWriter(path, dim=16) as writer:
            for src, ref in pairs:
                writer.add(src, ref, provider.embed_pair(src, ref))
        reader = FileEmbeddingProvider(path)
        for src, ref in pairs:
            a = provider.embed_pair(src, ref)
            b = reader.embed_pair(src, ref)
            assert np.allclose(a.vectors, b.vectors, atol=1e-7)
        reader.close()
