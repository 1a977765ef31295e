"""Embedding vectors: binary file I/O and a deterministic fallback embedder.

Real vectors come from an external sentence encoder via the adapter's
embedding files.  The fallback embedder exists so tests and demos run
with no model at all: it feature-hashes the lowercased tokens of a text
into a fixed-width signed-count vector and L2-normalizes.  Its use is
stamped into output metadata so fallback vectors are never silently
mixed with real ones.

File format (little-endian): magic ``EVGE``, u32 version (=1), u64
count, u32 dim, then count u64 row ids, then count×dim float32 vectors
row-major.  Row ids must be the identity permutation 0..count-1 when
the file is attached to a KG store or paired with a query stream.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, FormatError

EMBEDDING_MAGIC = b"EVGE"
EMBEDDING_VERSION = 1


@dataclass(frozen=True)
class EmbeddingFile:
    ids: np.ndarray  # (count,) uint64
    vectors: np.ndarray  # (count, dim) float32

    @property
    def count(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def require_identity_ids(self, what: str = "embedding file") -> None:
        if not np.array_equal(self.ids, np.arange(self.count, dtype=np.uint64)):
            raise FormatError(f"{what} row ids must be the identity permutation 0..{self.count - 1}")


def check_vectors(vectors: np.ndarray) -> np.ndarray:
    """Validate a (count, dim) float array; returns a float32 view/copy."""
    arr = np.asarray(vectors)
    if arr.ndim != 2:
        raise FormatError(f"embedding matrix must be 2-d, got shape {arr.shape}")
    if arr.shape[1] == 0:
        raise FormatError("embedding dim must be at least 1")
    if not np.all(np.isfinite(arr)):
        raise FormatError("embedding matrix contains non-finite values")
    return np.ascontiguousarray(arr, dtype=np.float32)


def embeddings_blob(vectors: np.ndarray, ids: np.ndarray | None = None) -> bytes:
    vecs = check_vectors(vectors)
    count, dim = vecs.shape
    if ids is None:
        ids_arr = np.arange(count, dtype=np.uint64)
    else:
        ids_arr = np.ascontiguousarray(ids, dtype=np.uint64)
        if ids_arr.shape != (count,):
            raise FormatError(f"ids shape {ids_arr.shape} does not match {count} vectors")
    header = EMBEDDING_MAGIC + struct.pack("<IQI", EMBEDDING_VERSION, count, dim)
    return header + ids_arr.astype("<u8").tobytes() + vecs.astype("<f4").tobytes()


def parse_embeddings(blob: bytes) -> EmbeddingFile:
    view = memoryview(blob)
    if len(view) < 4 or bytes(view[:4]) != EMBEDDING_MAGIC:
        raise FormatError("not an embedding file (bad magic bytes)")
    header_size = 4 + struct.calcsize("<IQI")
    if len(view) < header_size:
        raise FormatError("truncated embedding header")
    version, count, dim = struct.unpack_from("<IQI", view, 4)
    if version != EMBEDDING_VERSION:
        raise FormatError(f"embedding file version {version} not supported (expected {EMBEDDING_VERSION})")
    if dim == 0:
        raise FormatError("embedding dim must be at least 1")
    ids_bytes = 8 * count
    vec_bytes = 4 * count * dim
    expected = header_size + ids_bytes + vec_bytes
    if len(view) < expected:
        raise FormatError(f"truncated embedding file (expected {expected} bytes, got {len(view)})")
    if len(view) > expected:
        raise FormatError(f"embedding file has {len(view) - expected} trailing bytes")
    ids = np.frombuffer(view, dtype="<u8", count=count, offset=header_size).astype(np.uint64)
    vectors = (
        np.frombuffer(view, dtype="<f4", count=count * dim, offset=header_size + ids_bytes)
        .astype(np.float32)
        .reshape(count, dim)
    )
    if not np.all(np.isfinite(vectors)):
        raise FormatError("embedding file contains non-finite values")
    return EmbeddingFile(ids=ids, vectors=vectors)


def write_embeddings(path: str, vectors: np.ndarray, ids: np.ndarray | None = None) -> None:
    with open(path, "wb") as fh:
        fh.write(embeddings_blob(vectors, ids))


def read_embeddings(path: str) -> EmbeddingFile:
    with open(path, "rb") as fh:
        return parse_embeddings(fh.read())


class HashEmbedder:
    """Feature-hashed bag of lowercased tokens, L2-normalized.

    Each token hashes (blake2b, 8 bytes) to a bucket and a sign; token
    counts accumulate and the vector is normalized to unit length (the
    zero vector stays zero for empty text).  Deterministic across runs
    and platforms.
    """

    def __init__(self, dim: int = 64) -> None:
        if dim < 1:
            raise FormatError("embedding dim must be at least 1")
        self.dim = dim

    @property
    def name(self) -> str:
        return f"fallback-hash-{self.dim}"

    def embed_one(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        for token in text.lower().split():
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
            value = int.from_bytes(digest, "little")
            sign = -1.0 if (value >> 63) & 1 else 1.0
            vec[value % self.dim] += sign
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec.astype(np.float32)

    def embed(self, texts: list[str]) -> np.ndarray:
        if not texts:
            return np.empty((0, self.dim), dtype=np.float32)
        return np.stack([self.embed_one(t) for t in texts])


def attach_embeddings(store, emb: EmbeddingFile) -> None:
    """Bind node embeddings to a KG store (row i = node i)."""
    emb.require_identity_ids("KG embedding file")
    if emb.count != store.node_count:
        raise DimensionMismatchError(
            f"embedding file has {emb.count} rows but the KG has {store.node_count} nodes"
        )
    store.embeddings = emb.vectors
