"""Retrieve the joint reasoning subgraph for one grounded story.

Anchors from different context events are connected through bounded
shortest paths; the union of those paths, the context chain, and the
grounding links form one joint graph per narrative.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from evkg import (
    AbstractionCap,
    HashEmbedder,
    SrlFrame,
    build_index,
    build_joint_graph,
    extract_partial_events,
    ground,
    load_kg,
    normalize_document,
    retrieve_subgraph,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--doc", default="s0", help="story document id (default s0)")
    parser.add_argument("--gamma", type=int, default=3, help="path hop limit (default 3)")
    args = parser.parse_args()

    store = load_kg(str(FIXTURES / "kg_nodes.jsonl"), str(FIXTURES / "kg_edges.tsv"))
    with open(FIXTURES / "stories.jsonl", encoding="utf-8") as fh:
        frames = [SrlFrame.from_record(json.loads(line)) for line in fh]
    frames = sorted(
        (f for f in frames if f.doc_id == args.doc),
        key=lambda f: (f.sent_idx, f.frame_idx),
    )
    if not frames:
        raise SystemExit(f"no frames for doc {args.doc!r}")

    embedder = HashEmbedder(64)
    index = build_index(embedder.embed([store.text(i) for i in range(store.node_count)]))
    events = normalize_document(frames)
    queries = [
        ((e.doc_id, e.sent_idx, e.frame_idx, rung.level), embedder.embed_one(rung.plain))
        for e in events
        for rung in extract_partial_events(e, AbstractionCap.ARG1)
    ]
    anchors = ground(index, queries)
    print(f"doc {args.doc}: {len(anchors)} accepted anchors")

    subgraph = retrieve_subgraph(store, anchors, args.gamma)
    print(f"path union: {len(subgraph.nodes)} nodes, {len(subgraph.edges)} edges")

    context = [((e.doc_id, e.sent_idx, e.frame_idx), e.plain) for e in events]
    joint = build_joint_graph(store, subgraph, context, anchors)
    print(f"\njoint graph: {len(joint.context_nodes)} context nodes, "
          f"{len(joint.kg_nodes)} graph nodes, {len(joint.edges)} edges")
    for node in joint.nodes:
        print(f"  {node.id:<7} {node.text}")
    print()
    for edge in sorted(joint.edges, key=lambda e: (e.rel, e.src, e.dst)):
        print(f"  {edge.src} --{edge.rel}--> {edge.dst}")


if __name__ == "__main__":
    main()
