"""Per-token contextual vectors for jointly encoded sentence pairs.

Matrix layout for a source of n tokens and a reference of m tokens is
``[BOS] <n source rows> [SEP] <m reference rows> [SEP]``: n + m + 3 rows of
dimension D. Providers are read-only after load; concurrent ``embed_pair``
calls are allowed.

Binary store format (written by the embedding exporter, read here):

    header:  magic b"PSEM" | version u32 | D u32 | count u64   (little-endian)
    entry:   key_len u32 | pair-key UTF-8 | n u32 | m u32 | (n+m+3)*D float32

The companion JSON index (``<store>.index.json`` by default) maps pair-key to
the absolute byte offset of the entry. Pair-key = SHA-256 hex digest of
``source_raw + "\\n" + reference_raw``.
"""
from __future__ import annotations

import hashlib
import json
import mmap
import struct
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np

from .core import Span, TokenizedSentence
from .errors import DimMismatch, InvalidSpan, PairNotFound

__all__ = [
    "EmbeddingMatrix",
    "EmbeddingProvider",
    "HashEmbeddingProvider",
    "FileEmbeddingProvider",
    "StoreWriter",
    "span_pool",
    "pair_key",
]

MAGIC = b"PSEM"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIQ")
_U32 = struct.Struct("<I")
_ENTRY_META = struct.Struct("<II")

Side = Literal["source", "reference"]


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Rows for one jointly encoded pair: markers plus one row per token."""

    vectors: np.ndarray
    n: int
    m: int

    def __post_init__(self):
        expected = self.n + self.m + 3
        if self.vectors.ndim != 2 or self.vectors.shape[0] != expected:
            raise DimMismatch(
                f"expected {expected} rows for n={self.n}, m={self.m}, "
                f"got shape {self.vectors.shape}"
            )
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("embedding matrix contains non-finite entries")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def side_base(self, side: Side) -> int:
        if side == "source":
            return 1
        if side == "reference":
            return self.n + 2
        raise ValueError(f"unknown side {side!r}")

    def side_len(self, side: Side) -> int:
        return self.n if side == "source" else self.m


def span_pool(matrix: EmbeddingMatrix, span: Span, side: Side) -> np.ndarray:
    """Mean of the rows covered by ``span`` on the given side."""
    if span.end >= matrix.side_len(side):
        raise InvalidSpan(
            f"span ({span.start},{span.end}) outside {side} of length {matrix.side_len(side)}"
        )
    base = matrix.side_base(side)
    return matrix.vectors[base + span.start : base + span.end + 1].mean(axis=0)


def pair_key(source: TokenizedSentence, reference: TokenizedSentence) -> str:
    payload = (source.raw_text + "\n" + reference.raw_text).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


class EmbeddingProvider(ABC):
    """Produces the joint embedding matrix for a sentence pair; deterministic."""

    @property
    @abstractmethod
    def dim(self) -> int: ...

    @abstractmethod
    def embed_pair(
        self, source: TokenizedSentence, reference: TokenizedSentence
    ) -> EmbeddingMatrix: ...


def _fnv1a_64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


class HashEmbeddingProvider(EmbeddingProvider):
    """Deterministic test embedder: hash-seeded unit vectors with context mixing.

    Each token's base vector is pseudo-random, seeded by the FNV-1a 64-bit hash
    of the token (xor a provider seed). A row is the L2-normalized mix of 0.6x
    the token's own vector and 0.4x the mean of its +-2 neighbors within the
    same sentence, so identical tokens in different contexts embed differently.
    """

    BOS_MARKER = "[BOS]"
    SEP_MARKER = "[SEP]"

    def __init__(self, dim: int = 768, seed: int = 0):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self._dim = dim
        self._seed = seed
        self._base_cache: dict[str, np.ndarray] = {}

    @property
    def dim(self) -> int:
        return self._dim

    def _base_vector(self, token: str) -> np.ndarray:
        cached = self._base_cache.get(token)
        if cached is not None:
            return cached
        h = _fnv1a_64(token.encode("utf-8")) ^ (self._seed & 0xFFFFFFFFFFFFFFFF)
        rng = np.random.Generator(np.random.PCG64(h))
        vec = rng.standard_normal(self._dim)
        vec /= np.linalg.norm(vec)
        self._base_cache[token] = vec
        return vec

    def _sentence_rows(self, tokens: tuple[str, ...]) -> np.ndarray:
        base = np.stack([self._base_vector(tok) for tok in tokens])
        rows = np.empty_like(base)
        for i in range(len(tokens)):
            lo, hi = max(0, i - 2), min(len(tokens), i + 3)
            window = [j for j in range(lo, hi) if j != i]
            mixed = 0.6 * base[i]
            if window:
                mixed = mixed + 0.4 * base[window].mean(axis=0)
            rows[i] = mixed / np.linalg.norm(mixed)
        return rows

    def embed_pair(
        self, source: TokenizedSentence, reference: TokenizedSentence
    ) -> EmbeddingMatrix:
        bos = self._base_vector(self.BOS_MARKER)
        sep = self._base_vector(self.SEP_MARKER)
        vectors = np.vstack(
            [
                bos[None, :],
                self._sentence_rows(source.tokens),
                sep[None, :],
                self._sentence_rows(reference.tokens),
                sep[None, :],
            ]
        )
        return EmbeddingMatrix(vectors=vectors, n=len(source), m=len(reference))


class StoreWriter:
    """Writes the binary embedding store plus its JSON offset index.

    Duplicate pair-keys are skipped (content addressing). Use as a context
    manager; the entry count in the header is patched on close.
    """

    def __init__(self, path: str | Path, dim: int, index_path: str | Path | None = None):
        self.path = Path(path)
        self.index_path = Path(index_path) if index_path else default_index_path(self.path)
        self.dim = dim
        self._offsets: dict[str, int] = {}
        self._fh = open(self.path, "wb")
        self._fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, dim, 0))

    def add(
        self,
        source: TokenizedSentence,
        reference: TokenizedSentence,
        matrix: EmbeddingMatrix,
    ) -> bool:
        """Append one entry; returns False when the pair-key already exists."""
        if matrix.dim != self.dim:
            raise DimMismatch(f"matrix dim {matrix.dim} != store dim {self.dim}")
        if matrix.n != len(source) or matrix.m != len(reference):
            raise DimMismatch("matrix row counts disagree with the sentence pair")
        key = pair_key(source, reference)
        if key in self._offsets:
            return False
        self._offsets[key] = self._fh.tell()
        encoded = key.encode("utf-8")
        self._fh.write(_U32.pack(len(encoded)))
        self._fh.write(encoded)
        self._fh.write(_ENTRY_META.pack(matrix.n, matrix.m))
        self._fh.write(np.ascontiguousarray(matrix.vectors, dtype="<f4").tobytes())
        return True

    def close(self):
        self._fh.seek(0)
        self._fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, self.dim, len(self._offsets)))
        self._fh.close()
        self.index_path.write_text(json.dumps(self._offsets, sort_keys=True), encoding="utf-8")

    def __enter__(self) -> "StoreWriter":
        return self

    def __exit__(self, *exc):
        self.close()


def default_index_path(store_path: Path) -> Path:
    return store_path.with_name(store_path.name + ".index.json")


class FileEmbeddingProvider(EmbeddingProvider):
    """Reads pre-computed pair embeddings from the binary store format."""

    def __init__(self, path: str | Path, index_path: str | Path | None = None):
        self.path = Path(path)
        self.index_path = Path(index_path) if index_path else default_index_path(self.path)
        raw = self.path.read_bytes()
        if len(raw) < _HEADER.size:
            raise ValueError(f"{self.path}: truncated store header")
        magic, version, dim, count = _HEADER.unpack_from(raw, 0)
        if magic != MAGIC:
            raise ValueError(f"{self.path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise ValueError(f"{self.path}: unsupported format version {version}")
        self._dim = int(dim)
        self.count = int(count)
        self._offsets: dict[str, int] = json.loads(self.index_path.read_text(encoding="utf-8"))
        if len(self._offsets) != self.count:
            raise ValueError(
                f"{self.path}: header count {self.count} != index size {len(self._offsets)}"
            )
        self._fh = open(self.path, "rb")
        self._mm = mmap.mmap(self._fh.fileno(), 0, access=mmap.ACCESS_READ)

    @property
    def dim(self) -> int:
        return self._dim

    def keys(self) -> frozenset[str]:
        return frozenset(self._offsets)

    def _read_entry(self, offset: int) -> tuple[str, int, int, np.ndarray]:
        (key_len,) = _U32.unpack_from(self._mm, offset)
        pos = offset + _U32.size
        key = self._mm[pos : pos + key_len].decode("utf-8")
        pos += key_len
        n, m = _ENTRY_META.unpack_from(self._mm, pos)
        pos += _ENTRY_META.size
        rows = n + m + 3
        vectors = np.frombuffer(self._mm, dtype="<f4", count=rows * self._dim, offset=pos)
        return key, n, m, vectors.reshape(rows, self._dim).astype(np.float64)

    def embed_pair(
        self, source: TokenizedSentence, reference: TokenizedSentence
    ) -> EmbeddingMatrix:
        key = pair_key(source, reference)
        offset = self._offsets.get(key)
        if offset is None:
            raise PairNotFound(f"pair {key[:12]}... not in store {self.path}")
        stored_key, n, m, vectors = self._read_entry(offset)
        if stored_key != key:
            raise ValueError(f"{self.path}: index offset for {key[:12]}... points at wrong entry")
        if n != len(source) or m != len(reference):
            raise DimMismatch(
                f"stored entry has n={n}, m={m}; query pair has "
                f"n={len(source)}, m={len(reference)}"
            )
        return EmbeddingMatrix(vectors=vectors, n=n, m=m)

    def close(self):
        self._mm.close()
        self._fh.close()
