"""Immutable in-memory store for the eventuality knowledge graph.

Nodes are short normalized eventuality strings (``[P0] feel sleepy``),
edges are typed by interned discourse-relation names.  The store keeps
CSR-style adjacency in both directions, sorted by (relation, neighbor)
within each node, so traversal order is deterministic.  Loading is
single-threaded; after load the store never mutates and may be shared
freely across threads.

On-disk formats:

* nodes file — one JSON object per line: ``{"id": int, "text": str,
  "freq": int}``; ids must be dense ``0..N-1``.
* edges file — tab-separated ``src<TAB>rel<TAB>dst[<TAB>weight]``;
  duplicate (src, rel, dst) rows are merged with weights summed.
* snapshot — little-endian binary, magic ``EVGS``: header (u32 version,
  u64 node count, u64 edge count, u32 relation count), then the relation
  table (u32 length + UTF-8 bytes each), the node table (u64 freq, u32
  length + UTF-8 text each; id implicit), and the edge arrays in
  canonical (src, rel, dst) order as int64/int32/int64/float64 blocks.
"""

from __future__ import annotations

import json
import struct
from array import array
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import FormatError, UnknownNodeError, UnknownRelationError

SNAPSHOT_MAGIC = b"EVGS"
SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class EventualityNode:
    id: int
    text: str
    freq: int


@dataclass(frozen=True)
class TypedEdge:
    src: int
    rel: int
    dst: int
    weight: float = 1.0


class RelationTable:
    """Bijective, case-sensitive relation-name interning.

    Append-only while the store loads; frozen afterwards, at which point
    unknown names raise instead of growing the table.
    """

    def __init__(self) -> None:
        self._names: list[str] = []
        self._ids: dict[str, int] = {}
        self._frozen = False

    def intern(self, name: str) -> int:
        rid = self._ids.get(name)
        if rid is not None:
            return rid
        if self._frozen:
            raise UnknownRelationError(f"relation table is frozen; unknown relation {name!r}")
        rid = len(self._names)
        self._names.append(name)
        self._ids[name] = rid
        return rid

    def id_of(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise UnknownRelationError(f"unknown relation {name!r}") from None

    def name_of(self, rid: int) -> str:
        if not 0 <= rid < len(self._names):
            raise UnknownRelationError(f"unknown relation id {rid}")
        return self._names[rid]

    def freeze(self) -> None:
        self._frozen = True

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: str) -> bool:
        return name in self._ids


class KgStore:
    """The loaded graph: node texts, relation table, and dual adjacency.

    Not constructed directly; use :func:`load_kg`, :func:`restore`, or
    :func:`build_store` (for in-memory fixtures).
    """

    def __init__(
        self,
        texts: list[str],
        freqs: np.ndarray,
        relations: RelationTable,
        out_indptr: np.ndarray,
        out_rel: np.ndarray,
        out_dst: np.ndarray,
        out_weight: np.ndarray,
        in_indptr: np.ndarray,
        in_rel: np.ndarray,
        in_src: np.ndarray,
        in_weight: np.ndarray,
    ) -> None:
        self._texts = texts
        self._freqs = freqs
        self.relations = relations
        self._out_indptr = out_indptr
        self._out_rel = out_rel
        self._out_dst = out_dst
        self._out_weight = out_weight
        self._in_indptr = in_indptr
        self._in_rel = in_rel
        self._in_src = in_src
        self._in_weight = in_weight
        self.embeddings = None  # attached by the matcher, see matching.attach_embeddings

    @property
    def node_count(self) -> int:
        return len(self._texts)

    @property
    def edge_count(self) -> int:
        return int(self._out_rel.shape[0])

    def node(self, node_id: int) -> EventualityNode:
        self._check_node(node_id)
        return EventualityNode(node_id, self._texts[node_id], int(self._freqs[node_id]))

    def text(self, node_id: int) -> str:
        self._check_node(node_id)
        return self._texts[node_id]

    def _check_node(self, node_id: int) -> None:
        if not 0 <= node_id < len(self._texts):
            raise UnknownNodeError(f"unknown node id {node_id}")

    def neighbors(self, node_id: int, direction: str = "out") -> Iterator[tuple[TypedEdge, int]]:
        """Yield (edge, neighbor id) sorted by (relation, neighbor id)."""
        self._check_node(node_id)
        if direction == "out":
            lo, hi = self._out_indptr[node_id], self._out_indptr[node_id + 1]
            for k in range(lo, hi):
                dst = int(self._out_dst[k])
                yield TypedEdge(node_id, int(self._out_rel[k]), dst, float(self._out_weight[k])), dst
        elif direction == "in":
            lo, hi = self._in_indptr[node_id], self._in_indptr[node_id + 1]
            for k in range(lo, hi):
                src = int(self._in_src[k])
                yield TypedEdge(src, int(self._in_rel[k]), node_id, float(self._in_weight[k])), src
        else:
            raise ValueError(f"direction must be 'out' or 'in', got {direction!r}")

    def out_neighbor_ids(self, node_id: int) -> np.ndarray:
        """Destination ids of all out-edges (may repeat across relations)."""
        self._check_node(node_id)
        return self._out_dst[self._out_indptr[node_id] : self._out_indptr[node_id + 1]]

    def in_neighbor_ids(self, node_id: int) -> np.ndarray:
        self._check_node(node_id)
        return self._in_src[self._in_indptr[node_id] : self._in_indptr[node_id + 1]]

    def edge_between(self, src: int, dst: int) -> TypedEdge | None:
        """The smallest-relation-id edge src -> dst, or None."""
        self._check_node(src)
        self._check_node(dst)
        lo, hi = self._out_indptr[src], self._out_indptr[src + 1]
        for k in range(lo, hi):
            if int(self._out_dst[k]) == dst:
                return TypedEdge(src, int(self._out_rel[k]), dst, float(self._out_weight[k]))
        return None

    def edges(self) -> Iterator[TypedEdge]:
        """All edges in canonical (src, rel, dst) order."""
        for src in range(self.node_count):
            lo, hi = self._out_indptr[src], self._out_indptr[src + 1]
            for k in range(lo, hi):
                yield TypedEdge(src, int(self._out_rel[k]), int(self._out_dst[k]), float(self._out_weight[k]))


def build_store(
    nodes: list[tuple[int, str, int]],
    edges: list[tuple[int, str, int, float]],
) -> KgStore:
    """Build a store from in-memory (id, text, freq) and (src, rel, dst, weight) rows.

    Applies the same validation and duplicate-edge merging as file loading.
    """
    n = len(nodes)
    texts: list[str] = [""] * n
    freqs = np.zeros(n, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    for node_id, text, freq in nodes:
        if not 0 <= node_id < n:
            raise FormatError(f"node id {node_id} not dense in 0..{n - 1}")
        if seen[node_id]:
            raise FormatError(f"duplicate node id {node_id}")
        if not text:
            raise FormatError(f"node {node_id} has empty text")
        if freq < 0:
            raise FormatError(f"node {node_id} has negative freq")
        seen[node_id] = True
        texts[node_id] = text
        freqs[node_id] = freq

    relations = RelationTable()
    src_a = array("q")
    rel_a = array("i")
    dst_a = array("q")
    w_a = array("d")
    for src, rel_name, dst, weight in edges:
        if not 0 <= src < n:
            raise FormatError(f"edge references unknown node id {src}")
        if not 0 <= dst < n:
            raise FormatError(f"edge references unknown node id {dst}")
        if weight < 0:
            raise FormatError(f"edge ({src}, {rel_name!r}, {dst}) has negative weight")
        src_a.append(src)
        rel_a.append(relations.intern(rel_name))
        dst_a.append(dst)
        w_a.append(weight)
    relations.freeze()
    return _assemble(texts, freqs, relations, *_edge_arrays(src_a, rel_a, dst_a, w_a))


def load_kg(nodes_path: str, edges_path: str) -> KgStore:
    """Load the node and edge files into an immutable store.

    Reports malformed lines with their 1-based line number; rejects
    non-dense or duplicate node ids and edges that point outside the
    node table.  Duplicate (src, rel, dst) rows merge with summed weights.
    """
    texts_by_id: dict[int, tuple[str, int]] = {}
    max_id = -1
    with open(nodes_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{nodes_path}:{lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise FormatError(f"{nodes_path}:{lineno}: expected an object")
            try:
                node_id = obj["id"]
                text = obj["text"]
                freq = obj["freq"]
            except KeyError as exc:
                raise FormatError(f"{nodes_path}:{lineno}: missing field {exc.args[0]!r}") from None
            if not isinstance(node_id, int) or isinstance(node_id, bool):
                raise FormatError(f"{nodes_path}:{lineno}: id must be an integer")
            if not isinstance(text, str) or not text:
                raise FormatError(f"{nodes_path}:{lineno}: text must be a non-empty string")
            if not isinstance(freq, int) or isinstance(freq, bool) or freq < 0:
                raise FormatError(f"{nodes_path}:{lineno}: freq must be a non-negative integer")
            if node_id < 0:
                raise FormatError(f"{nodes_path}:{lineno}: id must be non-negative")
            if node_id in texts_by_id:
                raise FormatError(f"{nodes_path}:{lineno}: duplicate node id {node_id}")
            texts_by_id[node_id] = (text, freq)
            max_id = max(max_id, node_id)

    n = len(texts_by_id)
    if n and max_id != n - 1:
        raise FormatError(f"{nodes_path}: node ids must be dense 0..{n - 1} (saw max id {max_id})")
    texts = [texts_by_id[i][0] for i in range(n)]
    freqs = np.array([texts_by_id[i][1] for i in range(n)], dtype=np.int64)

    relations = RelationTable()
    src_a = array("q")
    rel_a = array("i")
    dst_a = array("q")
    w_a = array("d")
    with open(edges_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) not in (3, 4):
                raise FormatError(f"{edges_path}:{lineno}: expected 3 or 4 tab-separated fields, got {len(parts)}")
            try:
                src = int(parts[0])
                dst = int(parts[2])
            except ValueError:
                raise FormatError(f"{edges_path}:{lineno}: src and dst must be integers") from None
            rel_name = parts[1]
            if not rel_name:
                raise FormatError(f"{edges_path}:{lineno}: empty relation name")
            weight = 1.0
            if len(parts) == 4:
                try:
                    weight = float(parts[3])
                except ValueError:
                    raise FormatError(f"{edges_path}:{lineno}: weight must be a number") from None
                if not np.isfinite(weight) or weight < 0:
                    raise FormatError(f"{edges_path}:{lineno}: weight must be finite and non-negative")
            if not 0 <= src < n:
                raise FormatError(f"{edges_path}:{lineno}: edge references unknown node id {src}")
            if not 0 <= dst < n:
                raise FormatError(f"{edges_path}:{lineno}: edge references unknown node id {dst}")
            src_a.append(src)
            rel_a.append(relations.intern(rel_name))
            dst_a.append(dst)
            w_a.append(weight)
    relations.freeze()
    return _assemble(texts, freqs, relations, *_edge_arrays(src_a, rel_a, dst_a, w_a))


def _edge_arrays(src_a: array, rel_a: array, dst_a: array, w_a: array) -> tuple[np.ndarray, ...]:
    src = np.frombuffer(src_a, dtype=np.int64) if len(src_a) else np.empty(0, np.int64)
    rel = np.frombuffer(rel_a, dtype=np.int32) if len(rel_a) else np.empty(0, np.int32)
    dst = np.frombuffer(dst_a, dtype=np.int64) if len(dst_a) else np.empty(0, np.int64)
    w = np.frombuffer(w_a, dtype=np.float64) if len(w_a) else np.empty(0, np.float64)
    return src, rel, dst, w


def _assemble(
    texts: list[str],
    freqs: np.ndarray,
    relations: RelationTable,
    src: np.ndarray,
    rel: np.ndarray,
    dst: np.ndarray,
    w: np.ndarray,
) -> KgStore:
    n = len(texts)
    # merge duplicate (src, rel, dst) rows, weights summed
    if src.size:
        order = np.lexsort((dst, rel, src))
        src, rel, dst, w = src[order], rel[order], dst[order], w[order]
        first = np.empty(src.size, dtype=bool)
        first[0] = True
        np.logical_or(
            src[1:] != src[:-1],
            np.logical_or(rel[1:] != rel[:-1], dst[1:] != dst[:-1]),
            out=first[1:],
        )
        starts = np.flatnonzero(first)
        w = np.add.reduceat(w, starts)
        src, rel, dst = src[starts], rel[starts], dst[starts]

    out_indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=out_indptr[1:])

    in_order = np.lexsort((src, rel, dst))
    in_src, in_rel, in_dst, in_w = src[in_order], rel[in_order], dst[in_order], w[in_order]
    in_indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(in_dst, minlength=n), out=in_indptr[1:])

    return KgStore(
        texts=texts,
        freqs=freqs,
        relations=relations,
        out_indptr=out_indptr,
        out_rel=rel,
        out_dst=dst,
        out_weight=w,
        in_indptr=in_indptr,
        in_rel=in_rel,
        in_src=in_src,
        in_weight=in_w,
    )


def snapshot(store: KgStore) -> bytes:
    """Serialize the store to the EVGS binary blob (deterministic bytes)."""
    parts: list[bytes] = [
        SNAPSHOT_MAGIC,
        struct.pack("<IQQI", SNAPSHOT_VERSION, store.node_count, store.edge_count, len(store.relations)),
    ]
    for name in store.relations.names:
        raw = name.encode("utf-8")
        parts.append(struct.pack("<I", len(raw)))
        parts.append(raw)
    for i in range(store.node_count):
        raw = store._texts[i].encode("utf-8")
        parts.append(struct.pack("<QI", int(store._freqs[i]), len(raw)))
        parts.append(raw)
    parts.append(_edge_src(store).astype("<i8").tobytes())
    parts.append(store._out_rel.astype("<i4").tobytes())
    parts.append(store._out_dst.astype("<i8").tobytes())
    parts.append(store._out_weight.astype("<f8").tobytes())
    return b"".join(parts)


def _edge_src(store: KgStore) -> np.ndarray:
    counts = np.diff(store._out_indptr)
    return np.repeat(np.arange(store.node_count, dtype=np.int64), counts)


def save_snapshot(store: KgStore, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(snapshot(store))


def restore(blob: bytes) -> KgStore:
    """Rebuild a store from a snapshot blob; inverse of :func:`snapshot`."""
    view = memoryview(blob)
    if len(view) < 4 or bytes(view[:4]) != SNAPSHOT_MAGIC:
        raise FormatError("not a KG snapshot (bad magic bytes)")
    off = 4
    try:
        version, n, e, r = struct.unpack_from("<IQQI", view, off)
    except struct.error:
        raise FormatError("truncated snapshot header") from None
    off += struct.calcsize("<IQQI")
    if version != SNAPSHOT_VERSION:
        raise FormatError(f"snapshot version {version} not supported (expected {SNAPSHOT_VERSION})")

    def take(count: int) -> memoryview:
        nonlocal off
        if off + count > len(view):
            raise FormatError("truncated snapshot")
        chunk = view[off : off + count]
        off += count
        return chunk

    relations = RelationTable()
    for _ in range(r):
        (length,) = struct.unpack("<I", take(4))
        relations.intern(bytes(take(length)).decode("utf-8"))
    relations.freeze()

    texts: list[str] = []
    freqs = np.empty(n, dtype=np.int64)
    for i in range(n):
        freq, length = struct.unpack("<QI", take(12))
        freqs[i] = freq
        texts.append(bytes(take(length)).decode("utf-8"))

    src = np.frombuffer(take(8 * e), dtype="<i8").astype(np.int64)
    rel = np.frombuffer(take(4 * e), dtype="<i4").astype(np.int32)
    dst = np.frombuffer(take(8 * e), dtype="<i8").astype(np.int64)
    w = np.frombuffer(take(8 * e), dtype="<f8").astype(np.float64)
    if off != len(view):
        raise FormatError(f"snapshot has {len(view) - off} trailing bytes")
    if e and (rel.min() < 0 or rel.max() >= r):
        raise FormatError("snapshot edge references unknown relation id")
    if e and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
        raise FormatError("snapshot edge references unknown node id")

    return _assemble(texts, freqs, relations, src, rel, dst, w)


def load_snapshot(path: str) -> KgStore:
    with open(path, "rb") as fh:
        return restore(fh.read())
