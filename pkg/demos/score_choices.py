"""Score two candidate story endings with the bundled graph scorer.

Each choice's joint graph runs through relational graph convolution,
pools to one vector (attention weights show which nodes mattered),
fuses with the instance text embedding, and softmaxes into a
probability per ending.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from evkg import (
    AbstractionCap,
    HashEmbedder,
    SrlFrame,
    build_index,
    build_joint_graph,
    extract_partial_events,
    ground,
    joint_tensors,
    load_kg,
    load_params,
    normalize_document,
    relation_vocabulary,
    retrieve_subgraph,
    score_choices,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    store = load_kg(str(FIXTURES / "kg_nodes.jsonl"), str(FIXTURES / "kg_edges.tsv"))
    params = load_params(str(FIXTURES / "scorer.evgw"))
    vocabulary = relation_vocabulary(store)
    embedder = HashEmbedder(64)
    index = build_index(embedder.embed([store.text(i) for i in range(store.node_count)]))

    with open(FIXTURES / "stories_choice.jsonl", encoding="utf-8") as fh:
        frames = [SrlFrame.from_record(json.loads(line)) for line in fh]

    instances: dict[str, list[str]] = {}
    for f in frames:
        instance, _, choice = f.doc_id.rpartition("#")
        if f.doc_id not in instances.setdefault(instance, []):
            instances[instance].append(f.doc_id)

    for instance, choice_docs in sorted(instances.items()):
        choices = []
        for doc in choice_docs:
            doc_frames = sorted(
                (f for f in frames if f.doc_id == doc),
                key=lambda f: (f.sent_idx, f.frame_idx),
            )
            events = normalize_document(doc_frames)
            queries = [
                ((e.doc_id, e.sent_idx, e.frame_idx, r.level), embedder.embed_one(r.plain))
                for e in events
                for r in extract_partial_events(e, AbstractionCap.ARG1)
            ]
            anchors = ground(index, queries)
            subgraph = retrieve_subgraph(store, anchors)
            context = [((e.doc_id, e.sent_idx, e.frame_idx), e.plain) for e in events]
            joint = build_joint_graph(store, subgraph, context, anchors)
            tensors = joint_tensors(joint, vocabulary)
            features = embedder.embed([n.text for n in joint.nodes])
            text_vec = embedder.embed_one(" ".join(e.plain for e in events))
            choices.append(((doc, joint), (text_vec, tensors, features)))

        result = score_choices([c for _meta, c in choices], params)
        print(f"instance {instance}:")
        for k, ((doc, joint), _c) in enumerate(choices):
            marker = "  <- predicted" if k == result.argmax else ""
            print(
                f"  {doc}: logit {result.logits[k]:+.4f}  "
                f"p={result.probabilities[k]:.4f}{marker}"
            )
            weights = result.attention[k]
            if weights is not None and weights.size:
                top = np.argsort(-weights)[:3]
                names = ", ".join(
                    f"{joint.nodes[i].id}({weights[i]:.2f})" for i in top
                )
                print(f"      attention: {names}")


if __name__ == "__main__":
    main()
