"""Deterministic sentence encoder and the engine's embedding file format.

The encoder stands in for a neural sentence model: it feature-hashes
lowercased whitespace tokens into signed buckets and L2-normalizes, so
identical texts always produce identical rows — the property the
engine's exact-search round trip checks.  A different hash salt keeps
these vectors distinct from the engine's internal fallback, so the two
sources can never be confused for one another.

The file layout is the engine's published binary format: magic
``EVGE``, u32 version (=1), u64 count, u32 dim, count u64 row ids
(identity), then count×dim float32 vectors row-major, little-endian.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from .errors import ConfigError, FormatError

EMBEDDING_MAGIC = b"EVGE"
EMBEDDING_VERSION = 1
_SALT = b"narrative-adapter"


class SentenceHashEncoder:
    """Fixed-width deterministic text encoder."""

    def __init__(self, dim: int = 64) -> None:
        if dim < 1:
            raise ConfigError(f"encoder dim must be at least 1, got {dim}")
        self.dim = dim

    @property
    def name(self) -> str:
        return f"adapter-hash-{self.dim}"

    def encode_one(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        for token in text.lower().split():
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=_SALT).digest()
            value = int.from_bytes(digest, "little")
            bucket = (value >> 1) % self.dim
            sign = 1.0 if value & 1 else -1.0
            vec[bucket] += sign
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec.astype(np.float32)

    def encode(self, texts: list[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim), dtype=np.float32)
        return np.stack([self.encode_one(t) for t in texts])


def embeddings_blob(vectors: np.ndarray) -> bytes:
    arr = np.ascontiguousarray(vectors, dtype="<f4")
    if arr.ndim != 2:
        raise FormatError(f"embedding matrix must be 2-d, got shape {arr.shape}")
    if arr.shape[1] == 0:
        raise FormatError("embedding dim must be at least 1")
    if not np.all(np.isfinite(arr)):
        raise FormatError("embedding matrix contains non-finite values")
    count, dim = arr.shape
    header = EMBEDDING_MAGIC + struct.pack("<IQI", EMBEDDING_VERSION, count, dim)
    ids = np.arange(count, dtype="<u8")
    return header + ids.tobytes() + arr.tobytes()


def embed_texts(texts: list[str], dim: int = 64) -> np.ndarray:
    """Encode a batch; row order equals input order."""
    return SentenceHashEncoder(dim).encode(texts)


def write_embedding_file(path: str, vectors: np.ndarray) -> None:
    blob = embeddings_blob(vectors)
    with open(path, "wb") as fh:
        fh.write(blob)
