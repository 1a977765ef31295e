"""Ground one story against the bundled graph and watch abstraction help.

Every ladder rung becomes a query; a rung is accepted when its nearest
graph node sits within the distance threshold.  Overly specific events
miss at level 0 and recover at a higher rung, which is exactly why the
ladder exists.
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
    extract_partial_events,
    ground,
    grounding_stats,
    load_kg,
    normalize_document,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--doc", default="s0", help="story document id (default s0)")
    parser.add_argument("--threshold", type=float, default=0.65)
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

    queries = []
    texts = {}
    for event in normalize_document(frames):
        for rung in extract_partial_events(event, AbstractionCap.ARG1):
            key = (event.doc_id, event.sent_idx, event.frame_idx, rung.level)
            queries.append((key, embedder.embed_one(rung.plain)))
            texts[key] = rung.plain
    anchors = ground(index, queries, args.threshold)
    matched = {(m.doc_id, m.sent_idx, m.frame_idx, m.level): m for m in anchors}

    print(f"doc {args.doc}: {len(queries)} ladder queries, threshold {args.threshold}")
    for key, _vec in queries:
        hit = matched.get(key)
        text = texts[key]
        if hit is None:
            print(f"  miss  level {key[3]}  {text!r}")
        else:
            print(
                f"  HIT   level {key[3]}  {text!r} -> node {hit.node_id} "
                f"{store.text(hit.node_id)!r}  d={hit.distance:.4f}"
            )

    stats = grounding_stats(anchors, len(queries))
    print(
        f"\nhit rate {stats.hit_rate:.2f} over {stats.queries} queries, "
        f"mean anchor distance {stats.mean_distance:.4f}"
    )


if __name__ == "__main__":
    main()
