"""Nearest-anchor matching: map event texts to KG nodes by embedding distance.

A query event is grounded to the KG node whose embedding is nearest in
L2 distance, accepted only when that distance is at or under a
threshold (default 0.65).  The exact backend scans all rows in float64
and is certified optimal; the approximate backend (inverted-file over
k-means cells) trades recall for speed on large graphs and advertises
itself in the index metadata.  Ties always break to the smallest node
id, so matching is fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.cluster.vq import kmeans2

from .errors import ConfigError, DimensionMismatchError, FormatError, InvariantError
from .embedding import check_vectors

#: Default acceptance threshold on L2 distance.
DEFAULT_THRESHOLD = 0.65

_CHUNK_ROWS = 8192


@dataclass(frozen=True)
class NearestHit:
    node_id: int
    distance: float


@dataclass(frozen=True)
class AnchorMatch:
    """An accepted grounding: one (event, abstraction level) to one KG node."""

    doc_id: str
    sent_idx: int
    frame_idx: int
    level: int
    node_id: int
    distance: float

    @property
    def event_key(self) -> tuple[str, int, int]:
        return (self.doc_id, self.sent_idx, self.frame_idx)

    def to_record(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "sent_idx": self.sent_idx,
            "frame_idx": self.frame_idx,
            "level": self.level,
            "node_id": self.node_id,
            "distance": self.distance,
        }

    @classmethod
    def from_record(cls, obj: dict) -> "AnchorMatch":
        if not isinstance(obj, dict):
            raise FormatError("anchor record must be an object")
        values = {}
        for key in ("doc_id", "sent_idx", "frame_idx", "level", "node_id", "distance"):
            if key not in obj:
                raise FormatError(f"anchor record missing field {key!r}")
            values[key] = obj[key]
        if not isinstance(values["doc_id"], str) or not values["doc_id"]:
            raise FormatError("doc_id must be a non-empty string")
        for name in ("sent_idx", "level", "node_id"):
            val = values[name]
            if not isinstance(val, int) or isinstance(val, bool) or val < 0:
                raise FormatError(f"{name} must be a non-negative integer")
        fidx = values["frame_idx"]
        if not isinstance(fidx, int) or isinstance(fidx, bool) or fidx < -1:
            raise FormatError("frame_idx must be an integer >= -1")
        dist = values["distance"]
        if not isinstance(dist, (int, float)) or isinstance(dist, bool) or dist < 0:
            raise FormatError("distance must be a non-negative number")
        return cls(
            values["doc_id"], values["sent_idx"], fidx, values["level"], values["node_id"], float(dist)
        )


class AnchorSets:
    """Accepted matches grouped per source event, levels strictly increasing."""

    def __init__(self, matches: Iterable[AnchorMatch]) -> None:
        ordered = sorted(matches, key=lambda m: (m.doc_id, m.sent_idx, m.frame_idx, m.level))
        for a, b in zip(ordered, ordered[1:]):
            if a.event_key == b.event_key and a.level == b.level:
                raise InvariantError(
                    f"two anchors for event {a.event_key} at level {a.level} (nodes {a.node_id}, {b.node_id})"
                )
        self._matches = tuple(ordered)

    @property
    def matches(self) -> tuple[AnchorMatch, ...]:
        return self._matches

    def __iter__(self):
        return iter(self._matches)

    def __len__(self) -> int:
        return len(self._matches)

    def by_event(self) -> dict[tuple[str, int, int], tuple[AnchorMatch, ...]]:
        grouped: dict[tuple[str, int, int], list[AnchorMatch]] = {}
        for m in self._matches:
            grouped.setdefault(m.event_key, []).append(m)
        return {k: tuple(v) for k, v in grouped.items()}

    def node_ids(self) -> list[int]:
        return sorted({m.node_id for m in self._matches})


@dataclass(frozen=True)
class GroundingStats:
    queries: int
    hits: int
    hit_rate: float
    mean_distance: float | None
    mode: str = "event"

    def to_record(self) -> dict:
        return {
            "queries": self.queries,
            "hits": self.hits,
            "hit_rate": self.hit_rate,
            "mean_distance": self.mean_distance,
            "mode": self.mode,
        }


class EventIndex:
    """Immutable nearest-neighbor index over node embedding rows."""

    def __init__(self, vectors: np.ndarray, backend: str, metadata: dict, ivf=None) -> None:
        self._vectors = vectors
        self.backend = backend
        self.metadata = metadata
        self._ivf = ivf

    @property
    def count(self) -> int:
        return int(self._vectors.shape[0])

    @property
    def dim(self) -> int:
        return int(self._vectors.shape[1])

    def _check_query(self, query: np.ndarray) -> np.ndarray:
        q = np.asarray(query, dtype=np.float64).reshape(-1)
        if q.shape[0] != self.dim:
            raise DimensionMismatchError(f"query has dim {q.shape[0]} but the index has dim {self.dim}")
        if not np.all(np.isfinite(q)):
            raise FormatError("query vector contains non-finite values")
        return q

    def nearest(self, query: np.ndarray) -> NearestHit | None:
        """Global (exact) or probed (approximate) nearest row; None if empty."""
        q = self._check_query(query)
        if self.count == 0:
            return None
        if self._ivf is None:
            d2 = _chunked_sqdist(self._vectors, q)
            return _best_hit(d2, None)
        return self._ivf.nearest(self._vectors, q)


def _chunked_sqdist(vectors: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Float64 squared distances of every row to q, computed in chunks."""
    n = vectors.shape[0]
    d2 = np.empty(n, dtype=np.float64)
    for lo in range(0, n, _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, n)
        diff = vectors[lo:hi].astype(np.float64) - q
        d2[lo:hi] = np.einsum("ij,ij->i", diff, diff)
    return d2


def _best_hit(d2: np.ndarray, row_ids: np.ndarray | None) -> NearestHit:
    best = d2.min()
    pos = int(np.flatnonzero(d2 == best)[0])
    if row_ids is not None:
        tied = row_ids[np.flatnonzero(d2 == best)]
        node = int(tied.min())
        best_d = float(np.sqrt(best))
        return NearestHit(node, best_d)
    return NearestHit(pos, float(np.sqrt(best)))


class _IvfBackend:
    """Inverted file: k-means cells, probe the closest nprobe cells."""

    def __init__(self, centroids: np.ndarray, cells: list[np.ndarray], nprobe: int) -> None:
        self.centroids = centroids
        self.cells = cells
        self.nprobe = nprobe

    def nearest(self, vectors: np.ndarray, q: np.ndarray) -> NearestHit | None:
        cdiff = self.centroids - q
        cd2 = np.einsum("ij,ij->i", cdiff, cdiff)
        order = np.argsort(cd2, kind="stable")
        probe = self.nprobe
        while True:
            rows = [self.cells[c] for c in order[:probe] if self.cells[c].size]
            if rows or probe >= len(order):
                break
            probe += 1  # widen until a non-empty cell is reached
        if not rows:
            return None
        candidates = np.concatenate(rows)
        diff = vectors[candidates].astype(np.float64) - q
        d2 = np.einsum("ij,ij->i", diff, diff)
        return _best_hit(d2, candidates)


def build_index(
    vectors: np.ndarray,
    backend: str = "exact",
    *,
    nlist: int | None = None,
    nprobe: int | None = None,
    seed: int = 0,
) -> EventIndex:
    """Build the search index; metadata records the backend and parameters."""
    vecs = check_vectors(vectors)
    if backend == "exact":
        return EventIndex(vecs, "exact", {"backend": "exact"})
    if backend != "approximate":
        raise ConfigError(f"unknown index backend {backend!r} (expected 'exact' or 'approximate')")
    n = vecs.shape[0]
    if n == 0:
        return EventIndex(vecs, "approximate", {"backend": "approximate", "nlist": 0, "nprobe": 0, "seed": seed})
    k = nlist if nlist is not None else max(1, int(round(np.sqrt(n))))
    k = min(k, n)
    if k < 1:
        raise ConfigError("nlist must be at least 1")
    # default probe width is generous: recall stays high even on
    # cluster-free (gaussian) data, and callers can tune it down
    probes = nprobe if nprobe is not None else max(1, (5 * k + 7) // 8)
    if probes < 1:
        raise ConfigError("nprobe must be at least 1")
    probes = min(probes, k)
    centroids, labels = kmeans2(vecs.astype(np.float64), k, minit="++", seed=seed)
    cells = [np.flatnonzero(labels == c).astype(np.int64) for c in range(k)]
    meta = {"backend": "approximate", "nlist": k, "nprobe": probes, "seed": seed}
    return EventIndex(vecs, "approximate", meta, ivf=_IvfBackend(centroids, cells, probes))


def match_event(index: EventIndex, query: np.ndarray, l: float = DEFAULT_THRESHOLD) -> NearestHit | None:
    """Nearest node if its distance is within l, else None."""
    if l < 0:
        raise ConfigError(f"distance threshold must be non-negative, got {l}")
    hit = index.nearest(query)
    if hit is None or hit.distance > l:
        return None
    return hit


QueryRef = tuple[str, int, int, int]  # (doc_id, sent_idx, frame_idx, level)


def ground(
    index: EventIndex,
    queries: Sequence[tuple[QueryRef, np.ndarray]],
    l: float = DEFAULT_THRESHOLD,
) -> AnchorSets:
    """Match each query independently; failures drop out of the result."""
    matches = []
    for (doc_id, sent_idx, frame_idx, level), vec in queries:
        hit = match_event(index, vec, l)
        if hit is not None:
            matches.append(AnchorMatch(doc_id, sent_idx, frame_idx, level, hit.node_id, hit.distance))
    return AnchorSets(matches)


def sentence_ground(
    index: EventIndex,
    sentences: Sequence[tuple[tuple[str, int], np.ndarray]],
    l: float = DEFAULT_THRESHOLD,
) -> AnchorSets:
    """Whole-sentence grounding bypass: one query per sentence.

    Sentence anchors carry frame_idx -1 and level 0, marking that no
    frame extraction took place.
    """
    queries = [((doc_id, sent_idx, -1, 0), vec) for (doc_id, sent_idx), vec in sentences]
    return ground(index, queries, l)


def grounding_stats(anchors: AnchorSets, queries: int, mode: str = "event") -> GroundingStats:
    hits = len(anchors)
    if hits > queries:
        raise InvariantError(f"{hits} hits exceed {queries} queries")
    hit_rate = hits / queries if queries else 0.0
    mean_distance = float(np.mean([m.distance for m in anchors])) if hits else None
    return GroundingStats(queries=queries, hits=hits, hit_rate=hit_rate, mean_distance=mean_distance, mode=mode)
