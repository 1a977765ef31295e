"""Subgraph retrieval: bounded shortest paths between anchors, then the
joint graph that ties context events to what was found.

Between every ordered pair of anchor nodes belonging to distinct source
events (same document), a directed shortest path of at most γ hops is
searched; the nodes and edges of every found path are unioned into the
KG subgraph.  Among equal-length paths the lexicographically smallest
node-id sequence wins, and parallel edges resolve to the smallest
relation id, so retrieval is deterministic.

The joint graph adds one context node per source event, a ``grounding``
edge from each context event to every KG node its ladder matched, and
``context`` edges chaining consecutive events in narrative order.
Anchor nodes are always present even when no path reached them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError, FormatError, InvariantError
from .kg import KgStore, TypedEdge
from .matching import AnchorSets

#: Default hop limit: at most two intermediate nodes between anchors.
DEFAULT_GAMMA = 3

GROUNDING_RELATION = "grounding"
CONTEXT_RELATION = "context"
RESERVED_RELATIONS = frozenset({GROUNDING_RELATION, CONTEXT_RELATION})


@dataclass(frozen=True)
class PathResult:
    src: int
    dst: int
    nodes: tuple[int, ...]
    edges: tuple[TypedEdge, ...]

    @property
    def hops(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class KgSubgraph:
    """Union of all retrieved path nodes and edges, canonically sorted."""

    nodes: tuple[int, ...]
    edges: tuple[TypedEdge, ...]


@dataclass(frozen=True)
class JointNode:
    id: str
    text: str


@dataclass(frozen=True)
class JointEdge:
    src: str
    dst: str
    rel: str


def _node_sort_key(node_id: str) -> tuple[int, int]:
    kind, _, num = node_id.partition(":")
    return (0 if kind == "ctx" else 1, int(num))


@dataclass(frozen=True)
class JointSubgraph:
    context_nodes: tuple[JointNode, ...]
    kg_nodes: tuple[JointNode, ...]
    edges: tuple[JointEdge, ...]

    @property
    def nodes(self) -> tuple[JointNode, ...]:
        return self.context_nodes + self.kg_nodes

    def to_record(self) -> dict:
        return {
            "context_nodes": [{"id": n.id, "text": n.text} for n in self.context_nodes],
            "kg_nodes": [{"id": n.id, "text": n.text} for n in self.kg_nodes],
            "edges": [{"src": e.src, "dst": e.dst, "rel": e.rel} for e in self.edges],
        }

    @classmethod
    def from_record(cls, obj: dict) -> "JointSubgraph":
        if not isinstance(obj, dict):
            raise FormatError("joint subgraph record must be an object")
        for key in ("context_nodes", "kg_nodes", "edges"):
            if key not in obj or not isinstance(obj[key], list):
                raise FormatError(f"joint subgraph record needs list field {key!r}")

        def parse_node(entry: dict, prefix: str) -> JointNode:
            if not isinstance(entry, dict) or not isinstance(entry.get("id"), str) or not isinstance(entry.get("text"), str):
                raise FormatError("joint node must be an object with string id and text")
            if not entry["id"].startswith(prefix + ":"):
                raise FormatError(f"joint node id {entry['id']!r} must start with {prefix!r}")
            return JointNode(entry["id"], entry["text"])

        ctx = tuple(parse_node(n, "ctx") for n in obj["context_nodes"])
        kg = tuple(parse_node(n, "kg") for n in obj["kg_nodes"])
        known = {n.id for n in ctx} | {n.id for n in kg}
        edges = []
        for entry in obj["edges"]:
            if not isinstance(entry, dict):
                raise FormatError("joint edge must be an object")
            try:
                edge = JointEdge(entry["src"], entry["dst"], entry["rel"])
            except KeyError as exc:
                raise FormatError(f"joint edge missing field {exc.args[0]!r}") from None
            if edge.src not in known or edge.dst not in known:
                raise FormatError(f"joint edge {edge.src} -> {edge.dst} references an unknown node")
            edges.append(edge)
        return cls(ctx, kg, tuple(edges))


def shortest_path(store: KgStore, a: int, b: int, gamma: int = DEFAULT_GAMMA) -> PathResult | None:
    """Directed shortest path a → b of at most gamma hops, or None.

    Among equal-length paths the lexicographically smallest node-id
    sequence is returned; each hop uses the smallest-relation-id edge
    between its endpoints.
    """
    if gamma < 1:
        raise ConfigError(f"hop limit must be at least 1, got {gamma}")
    store.node(a)
    store.node(b)
    if a == b:
        return PathResult(a, b, (a,), ())

    dist_from_a = {a: 0}
    frontier = [a]
    length = None
    for step in range(gamma):
        nxt = []
        for u in frontier:
            for w in store.out_neighbor_ids(u):
                w = int(w)
                if w not in dist_from_a:
                    dist_from_a[w] = step + 1
                    nxt.append(w)
        if b in dist_from_a:
            length = step + 1
            break
        frontier = nxt
    if length is None:
        return None

    # distances towards b, enough to certify path completions
    dist_to_b = {b: 0}
    frontier = [b]
    for step in range(length):
        nxt = []
        for u in frontier:
            for w in store.in_neighbor_ids(u):
                w = int(w)
                if w not in dist_to_b:
                    dist_to_b[w] = step + 1
                    nxt.append(w)
        frontier = nxt

    # greedy: at each hop pick the smallest next node that still completes
    nodes = [a]
    edges = []
    current = a
    for step in range(length):
        remaining = length - step - 1
        best = None
        for w in store.out_neighbor_ids(current):
            w = int(w)
            if dist_to_b.get(w) == remaining and (best is None or w < best):
                best = w
        if best is None:
            raise InvariantError(f"path reconstruction from {a} to {b} lost the trail at {current}")
        edge = store.edge_between(current, best)
        if edge is None:
            raise InvariantError(f"adjacency disagrees on edge {current} -> {best}")
        edges.append(edge)
        nodes.append(best)
        current = best
    return PathResult(a, b, tuple(nodes), tuple(edges))


def retrieve_subgraph(store: KgStore, anchors: AnchorSets, gamma: int = DEFAULT_GAMMA) -> KgSubgraph:
    """Union of shortest paths over all ordered cross-event anchor pairs.

    Events pair only within the same document; a node paired with itself
    (the same anchor reached from two events) is skipped.  The result is
    independent of anchor iteration order.
    """
    by_event = anchors.by_event()
    keys = list(by_event)
    node_set: set[int] = set()
    edge_set: set[TypedEdge] = set()
    cache: dict[tuple[int, int], PathResult | None] = {}
    for ki in keys:
        for kj in keys:
            if ki == kj or ki[0] != kj[0]:
                continue
            for ma in by_event[ki]:
                for mb in by_event[kj]:
                    va, vb = ma.node_id, mb.node_id
                    if va == vb:
                        continue
                    pair = (va, vb)
                    if pair not in cache:
                        cache[pair] = shortest_path(store, va, vb, gamma)
                    path = cache[pair]
                    if path is not None:
                        node_set.update(path.nodes)
                        edge_set.update(path.edges)
    return KgSubgraph(
        nodes=tuple(sorted(node_set)),
        edges=tuple(sorted(edge_set, key=lambda e: (e.src, e.rel, e.dst))),
    )


def build_joint_graph(
    store: KgStore,
    subgraph: KgSubgraph,
    events: Sequence[tuple[tuple[str, int, int], str]],
    anchors: AnchorSets,
) -> JointSubgraph:
    """Assemble the joint graph for one narrative instance.

    ``events`` is the ordered context: one ((doc_id, sent_idx,
    frame_idx), plain text) entry per source event.  Every accepted
    anchor node appears as a KG node even if no path reached it;
    duplicate (event, node) groundings collapse to one edge.
    """
    reserved = RESERVED_RELATIONS.intersection(store.relations.names)
    if reserved:
        raise InvariantError(f"KG relation names collide with reserved joint relations: {sorted(reserved)}")
    event_pos: dict[tuple[str, int, int], int] = {}
    for key, _text in events:
        if key in event_pos:
            raise InvariantError(f"duplicate context event {key}")
        event_pos[key] = len(event_pos)

    context_nodes = tuple(JointNode(f"ctx:{k}", text) for k, (_key, text) in enumerate(events))

    kg_ids = set(subgraph.nodes)
    for match in anchors:
        if match.event_key not in event_pos:
            raise FormatError(f"anchor references unknown context event {match.event_key}")
        kg_ids.add(match.node_id)
    kg_nodes = tuple(JointNode(f"kg:{n}", store.text(n)) for n in sorted(kg_ids))

    edges: set[JointEdge] = set()
    for e in subgraph.edges:
        edges.add(JointEdge(f"kg:{e.src}", f"kg:{e.dst}", store.relations.name_of(e.rel)))
    for match in anchors:
        k = event_pos[match.event_key]
        edges.add(JointEdge(f"ctx:{k}", f"kg:{match.node_id}", GROUNDING_RELATION))
    for k in range(len(events) - 1):
        edges.add(JointEdge(f"ctx:{k}", f"ctx:{k + 1}", CONTEXT_RELATION))

    ordered = tuple(sorted(edges, key=lambda e: (_node_sort_key(e.src), _node_sort_key(e.dst), e.rel)))
    return JointSubgraph(context_nodes=context_nodes, kg_nodes=kg_nodes, edges=ordered)
