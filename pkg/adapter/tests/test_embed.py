"""Sentence encoder determinism and the binary embedding file layout."""

from __future__ import annotations

import hashlib
import struct

import numpy as np
import pytest

from evkg_adapter import SentenceHashEncoder, embed_texts, embeddings_blob, write_embedding_file
from evkg_adapter.errors import ConfigError, FormatError


def parse_blob(blob: bytes) -> tuple[np.ndarray, np.ndarray]:
    """Independent reader for the embedding file layout: returns (ids, vectors)."""
    assert blob[:4] == b"EVGE"
    version, count, dim = struct.unpack_from("<IQI", blob, 4)
    assert version == 1
    offset = 4 + struct.calcsize("<IQI")
    ids = np.frombuffer(blob, dtype="<u8", count=count, offset=offset)
    offset += count * 8
    vectors = np.frombuffer(blob, dtype="<f4", count=count * dim, offset=offset)
    assert offset + count * dim * 4 == len(blob), "trailing bytes"
    return ids.copy(), vectors.reshape(count, dim).copy()


def test_encoding_is_deterministic_across_instances():
    texts = ["the dog barked", "a quiet evening", "the dog barked"]
    a = SentenceHashEncoder(32).encode(texts)
    b = SentenceHashEncoder(32).encode(texts)
    assert np.array_equal(a, b)
    assert a.dtype == np.float32 and a.shape == (3, 32)
    assert np.array_equal(a[0], a[2])  # identical texts, identical rows


def test_rows_match_single_text_encoding():
    enc = SentenceHashEncoder(16)
    texts = ["one small step", "another text"]
    stacked = enc.encode(texts)
    for row, text in zip(stacked, texts):
        assert np.array_equal(row, enc.encode_one(text))


def test_rows_are_unit_length_or_zero():
    enc = SentenceHashEncoder(64)
    vectors = enc.encode(["a few plain words", "", "more words here"])
    norms = np.linalg.norm(vectors, axis=1)
    assert norms[0] == pytest.approx(1.0, abs=1e-6)
    assert norms[1] == 0.0  # no tokens, zero row
    assert norms[2] == pytest.approx(1.0, abs=1e-6)


def test_token_order_does_not_matter_but_tokens_do():
    enc = SentenceHashEncoder(64)
    assert np.array_equal(enc.encode_one("green tea first"), enc.encode_one("first green tea"))
    assert not np.array_equal(enc.encode_one("green tea"), enc.encode_one("black tea"))


def test_case_is_ignored():
    enc = SentenceHashEncoder(64)
    assert np.array_equal(enc.encode_one("Hello World"), enc.encode_one("hello world"))


def test_blob_layout_round_trips():
    enc = SentenceHashEncoder(8)
    vectors = enc.encode(["alpha beta", "gamma", "delta epsilon zeta"])
    ids, parsed = parse_blob(embeddings_blob(vectors))
    assert np.array_equal(ids, np.arange(3, dtype=np.uint64))
    assert np.array_equal(parsed, vectors)


def test_blob_layout_is_frozen():
    # Guards the on-disk contract: any change to hashing, signs, buckets,
    # normalization, or header packing shows up as a digest change here.
    blob = embeddings_blob(SentenceHashEncoder(8).encode(["a b", "c"]))
    assert hashlib.sha256(blob).hexdigest() == (
        "58a0691d772045039b0f296dfe03b0ed4ada45a742abd40eedac36fddd92a38d"
    )


def test_write_embedding_file(tmp_path):
    path = tmp_path / "rows.evge"
    vectors = embed_texts(["first text", "second text"], dim=12)
    write_embedding_file(str(path), vectors)
    ids, parsed = parse_blob(path.read_bytes())
    assert ids.tolist() == [0, 1]
    assert np.array_equal(parsed, vectors)


def test_invalid_inputs_are_rejected():
    with pytest.raises(ConfigError):
        SentenceHashEncoder(0)
    with pytest.raises(FormatError):
        embeddings_blob(np.zeros(4, dtype=np.float32))  # 1-d
    with pytest.raises(FormatError):
        embeddings_blob(np.zeros((2, 0), dtype=np.float32))  # empty dim
    bad = np.zeros((2, 3), dtype=np.float32)
    bad[1, 1] = np.nan
    with pytest.raises(FormatError):
        embeddings_blob(bad)


def test_randomized_texts_round_trip_through_blob():
    rng = np.random.default_rng(7)
    words = ["sun", "rain", "tree", "song", "door", "light", "river", "stone"]
    texts = [
        " ".join(rng.choice(words, size=rng.integers(1, 6)))
        for _ in range(50)
    ]
    vectors = embed_texts(texts, dim=24)
    ids, parsed = parse_blob(embeddings_blob(vectors))
    assert np.array_equal(ids, np.arange(50, dtype=np.uint64))
    assert np.array_equal(parsed, vectors)
    # duplicate texts encode to identical rows wherever they occur
    first_row = {}
    for i, text in enumerate(texts):
        j = first_row.setdefault(text, i)
        assert np.array_equal(vectors[i], vectors[j])
