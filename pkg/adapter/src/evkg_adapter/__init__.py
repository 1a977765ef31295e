"""Turn raw narrative text into the eventuality-graph engine's inputs.

Three batch operations: rule-based semantic-role frame extraction with
person coreference (wire-format records the engine validates on read),
deterministic sentence embedding into the engine's binary vector
format, and person-token normalization of raw graph node texts with
duplicate merging and id densification.
"""

from __future__ import annotations

from .embed import SentenceHashEncoder, embed_texts, embeddings_blob, write_embedding_file
from .errors import AdapterError, ConfigError, FormatError
from .frames import (
    ExtractionError,
    RawDocument,
    extract_document,
    extract_frames,
    extract_sentence,
)
from .kgnorm import NormalizedNodes, normalize_kg_nodes, normalize_node_text
from .text import canonical, lemmatize_verb, looks_like_verb, strip_possessive

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "ConfigError",
    "ExtractionError",
    "FormatError",
    "NormalizedNodes",
    "RawDocument",
    "SentenceHashEncoder",
    "canonical",
    "embed_texts",
    "embeddings_blob",
    "extract_document",
    "extract_frames",
    "extract_sentence",
    "lemmatize_verb",
    "looks_like_verb",
    "normalize_kg_nodes",
    "normalize_node_text",
    "strip_possessive",
    "write_embedding_file",
]
