"""Generate the bundled mini-KG and story fixtures, verifying the
designed grounding behavior before writing anything.

The 200-node KG contains 20 "target" eventualities (4 per story) plus
distractors with disjoint vocabulary.  Each story has four frames
engineered to first ground at a specific abstraction cap:

  frame 0 ("A"): full event text equals a target node  -> grounds at NONE
  frame 1 ("B"): needs its ARGM dropped first          -> grounds at ARGM
  frame 2 ("C"): needs its ARG2 dropped as well        -> grounds at ARG234
  frame 3 ("D"): needs its ARG1 dropped                -> grounds at ARG1

With the unit-norm hashing embedder and threshold 0.65, a query whose
tokens are a superset of a node's matches iff node_len/query_len is at
least ~0.622; argument token counts above are chosen around that bound
with margin, and this script re-checks every intended hit and miss with
the real embedder before freezing the files.
"""

from __future__ import annotations

import json
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from evkg.embedding import HashEmbedder
from evkg.events import AbstractionCap, Argument, PersonSpan, SrlFrame, Verb
from evkg.kg import load_kg
from evkg.matching import build_index, ground
from evkg.rgcn import random_params, relation_vocabulary, save_params
from evkg.cli import run_ground, run_pie, run_retrieve, run_score

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "..", "fixtures")
SEED = 20260822
FALLBACK_DIM = 64
THRESHOLD = 0.65

RELATIONS = ["Precedence", "Reason", "Conjunction", "Contrast", "Synchronous", "Condition"]

SHE, HIM = 7, 3  # coreference cluster ids used in every document

# Per story: verbs for the four frames plus argument token fillers.
STORIES = [
    dict(verbs=("sip", "pack", "visit", "walk"),
         a_obj="hot tea", b_obj="a small bag", b_tmp="very early monday morning",
         c_arg2="for a quiet chat", d_obj="the long muddy trail"),
    dict(verbs=("brew", "fold", "greet", "jog"),
         a_obj="fresh coffee", b_obj="two warm shirts", b_tmp="right after the late storm",
         c_arg2="at the corner shop", d_obj="around the frozen pond"),
    dict(verbs=("carve", "stack", "phone", "swim"),
         a_obj="oak figures", b_obj="nine clay plates", b_tmp="during the long dull night",
         c_arg2="about the lost keys", d_obj="across the wide bay"),
    dict(verbs=("paint", "wrap", "thank", "hike"),
         a_obj="bright murals", b_obj="six glass beads", b_tmp="before the big noisy parade",
         c_arg2="for the kind gift", d_obj="up the steep rocky ridge"),
    dict(verbs=("knead", "sort", "meet", "row"),
         a_obj="soft dough", b_obj="old torn maps", b_tmp="while the slow rain fell",
         c_arg2="near the main gate", d_obj="past the quiet dock"),
]

DISTRACTOR_SUBJECTS = ["the crew", "the pair", "a dog", "the clerk", "the boys",
                       "a bird", "the cook", "the kids", "the guard", "a cat"]
DISTRACTOR_VERBS = ["lift", "drop", "spin", "toss", "pull", "push", "dig", "tie", "saw", "rub"]
DISTRACTOR_OBJECTS = ["iron rods", "wet ropes", "loose bricks", "spare wheels", "dry logs",
                      "thin wires", "flat stones", "worn boots", "pale shells", "bent nails"]


# ------------------------------------------------------------ frame builders


def _span_arg(role: str, mention: str, start: int, cluster: int) -> Argument:
    return Argument(role=role, text=mention, start=start, end=start + 1,
                    person_spans=(PersonSpan(start=start, end=start + 1, cluster=cluster),))


def _plain_arg(role: str, text: str, start: int) -> Argument:
    n = len(text.split())
    return Argument(role=role, text=text, start=start, end=start + n)


def make_frame(doc_id: str, sent_idx: int, verb: str, tail: list[tuple[str, str]]) -> SrlFrame:
    """One frame: ARG0 mention, the verb, then the given (role, text) args."""
    args = [_span_arg("ARG0", "she", 0, SHE)]
    pos = 2
    tokens = ["she", verb]
    for role, text in tail:
        if text == "him":
            args.append(_span_arg(role, "him", pos, HIM))
        else:
            args.append(_plain_arg(role, text, pos))
        pos += len(text.split())
        tokens.extend(text.split())
    return SrlFrame(
        doc_id=doc_id,
        sent_idx=sent_idx,
        frame_idx=0,
        verb=Verb(text=verb, lemma=verb, start=1, end=2),
        args=tuple(args),
        negated=False,
        modal=None,
        sentence=" ".join(tokens),
    )


def story_frames(doc_id: str, spec: dict) -> list[SrlFrame]:
    va, vb, vc, vd = spec["verbs"]
    return [
        make_frame(doc_id, 0, va, [("ARG1", spec["a_obj"])]),
        make_frame(doc_id, 1, vb, [("ARG1", spec["b_obj"]), ("ARGM-TMP", spec["b_tmp"])]),
        make_frame(doc_id, 2, vc, [("ARG1", "him"), ("ARG2", spec["c_arg2"])]),
        make_frame(doc_id, 3, vd, [("ARG1", spec["d_obj"])]),
    ]


def target_texts(spec: dict) -> list[str]:
    va, vb, vc, vd = spec["verbs"]
    return [
        f"[P0] {va} {spec['a_obj']}",
        f"[P0] {vb} {spec['b_obj']}",
        f"[P0] {vc} [P1]",
        f"[P0] {vd}",
    ]


# -------------------------------------------------------------- KG assembly


def build_kg(rng: np.random.Generator) -> tuple[list[dict], list[tuple], dict]:
    """Node records, edge rows, and the text -> id map."""
    targets = [text for spec in STORIES for text in target_texts(spec)]
    distractors = []
    for subj in DISTRACTOR_SUBJECTS:
        for verb in DISTRACTOR_VERBS:
            for obj in DISTRACTOR_OBJECTS:
                distractors.append(f"{subj} {verb} {obj}")
    rng.shuffle(distractors)
    texts = targets + distractors[: 200 - len(targets)]
    assert len(set(texts)) == 200
    order = rng.permutation(200)
    node_id = {texts[k]: int(order[k]) for k in range(200)}
    nodes = sorted(
        ({"id": node_id[t], "text": t, "freq": int(rng.integers(1, 1000))} for t in texts),
        key=lambda rec: rec["id"],
    )

    distractor_ids = sorted(node_id[t] for t in texts if t not in set(targets))
    mids = iter(distractor_ids)
    edges: list[tuple] = []
    for spec in STORIES:
        a, b, c, d = (node_id[t] for t in target_texts(spec))
        m1, m2, m3 = next(mids), next(mids), next(mids)
        edges.append((a, "Precedence", b, 1.0))
        edges.append((b, "Reason", m1, 1.0))
        edges.append((m1, "Precedence", c, 1.0))
        edges.append((c, "Conjunction", m2, 1.0))
        edges.append((m2, "Contrast", m3, 1.0))
        edges.append((m3, "Precedence", d, 1.0))
        edges.append((d, "Synchronous", a, 1.0))
    seen = {(e[0], e[1], e[2]) for e in edges}
    while len(edges) < 600:
        u = int(rng.choice(distractor_ids))
        v = int(rng.choice(distractor_ids))
        rel = RELATIONS[int(rng.integers(len(RELATIONS)))]
        if u == v or (u, rel, v) in seen:
            continue
        seen.add((u, rel, v))
        edges.append((u, rel, v, float(rng.integers(1, 6))))
    return nodes, edges, node_id


# ------------------------------------------------------------- choice docs


def choice_frames() -> list[SrlFrame]:
    frames = []
    # Each choice document reuses two target patterns so it grounds.
    plans = [
        ("tale0#A", [(0, "a"), (0, "d")]),
        ("tale0#B", [(1, "a"), (1, "b")]),
        ("tale1#A", [(2, "a"), (2, "c")]),
        ("tale1#B", [(3, "a"), (3, "d")]),
    ]
    for doc_id, parts in plans:
        for sent_idx, (story, kind) in enumerate(parts):
            spec = STORIES[story]
            va, vb, vc, vd = spec["verbs"]
            if kind == "a":
                frame = make_frame(doc_id, sent_idx, va, [("ARG1", spec["a_obj"])])
            elif kind == "b":
                frame = make_frame(doc_id, sent_idx, vb,
                                   [("ARG1", spec["b_obj"]), ("ARGM-TMP", spec["b_tmp"])])
            elif kind == "c":
                frame = make_frame(doc_id, sent_idx, vc,
                                   [("ARG1", "him"), ("ARG2", spec["c_arg2"])])
            else:
                frame = make_frame(doc_id, sent_idx, vd, [("ARG1", spec["d_obj"])])
            frames.append(frame)
    return frames


# ------------------------------------------------------------- verification


def verify(nodes: list[dict], edges: list[tuple], node_id: dict,
           stories: list[list[SrlFrame]], tmp_dir: str) -> None:
    nodes_path = os.path.join(tmp_dir, "kg_nodes.jsonl")
    edges_path = os.path.join(tmp_dir, "kg_edges.tsv")
    write_nodes(nodes_path, nodes)
    write_edges(edges_path, edges)
    store = load_kg(nodes_path, edges_path)
    assert store.node_count == 200 and store.edge_count == 600

    embedder = HashEmbedder(dim=FALLBACK_DIM)
    vectors = embedder.embed([store.text(i) for i in range(store.node_count)])
    index = build_index(vectors, backend="exact")

    frames = [f for story in stories for f in story]
    frame_records = [f.to_record() for f in frames]
    caps = [AbstractionCap.NONE, AbstractionCap.ARGM, AbstractionCap.ARG234, AbstractionCap.ARG1]
    grounded_counts = []
    anchors = None
    for cap in caps:
        partials = run_pie([SrlFrame.from_record(r) for r in frame_records], cap=cap, no_norm=False)
        queries = [((p["doc_id"], p["sent_idx"], p["frame_idx"], p["level"]),
                    embedder.embed_one(p["text"])) for p in partials]
        anchors = ground(index, queries, THRESHOLD)
        grounded_counts.append(len({m.event_key for m in anchors}))
    assert grounded_counts == [5, 10, 15, 20], grounded_counts

    # The full cap-ARG1 anchor table must be exactly the designed one: each
    # frame hits its own target at distance 0 at the designed level, plus the
    # structural C-frame re-hit ("[P0] verb" vs "[P0] verb [P1]" always passes
    # the threshold).  Anything else is a hash-collision accident: reword.
    rehit = float(np.sqrt(2.0 - 2.0 * 2.0 / np.sqrt(6.0)))
    expected = {}
    for s, spec in enumerate(STORIES):
        na, nb, nc, nd = (node_id[t] for t in target_texts(spec))
        expected[(f"s{s}", 0, 0, 0)] = (na, 0.0)
        expected[(f"s{s}", 1, 0, 1)] = (nb, 0.0)
        expected[(f"s{s}", 2, 0, 1)] = (nc, 0.0)
        expected[(f"s{s}", 2, 0, 2)] = (nc, rehit)
        expected[(f"s{s}", 3, 0, 1)] = (nd, 0.0)
    got = {(m.doc_id, m.sent_idx, m.frame_idx, m.level): (m.node_id, m.distance) for m in anchors}
    assert set(got) == set(expected), {
        "unexpected": sorted(set(got) - set(expected)),
        "missing": sorted(set(expected) - set(got)),
    }
    for key, (node, dist) in expected.items():
        assert got[key][0] == node, (key, got[key], node)
        assert abs(got[key][1] - dist) < 1e-6, (key, got[key], dist)
    print(f"grounded source events per cap (NONE, ARGM, ARG234, ARG1): {grounded_counts}")
    print(f"cap-ARG1 anchor table matches the design ({len(expected)} anchors)")


def verify_choices(store_paths: tuple[str, str], params_path: str, frames: list[SrlFrame]) -> None:
    store = load_kg(*store_paths)
    partials = run_pie(frames, cap=AbstractionCap.ARG1, no_norm=False)
    records, anchors = run_ground(
        store, partials, threshold=THRESHOLD, backend="exact", nlist=None, nprobe=None,
        seed=0, threads=1, kg_embeddings=None, query_embeddings=None, fallback_dim=FALLBACK_DIM,
    )
    docs = {m.doc_id for m in anchors}
    assert docs == {f.doc_id for f in frames}, f"ungrounded choice docs: {docs}"
    normalized = [
        {"doc_id": e["doc_id"], "sent_idx": e["sent_idx"], "frame_idx": e["frame_idx"],
         "level": 0, "text": e["text"], "tagged": e["tagged"]}
        for e in partials if e["level"] == 0
    ]
    joint = run_retrieve(store, list(anchors), normalized, gamma=3)
    scores = run_score(joint, store, params_path, fallback_dim=FALLBACK_DIM)
    assert len(scores) == 2
    for rec in scores:
        assert abs(sum(rec["probabilities"]) - 1.0) < 1e-9
    print(f"choice instances scored: {[rec['instance_id'] for rec in scores]}")


# ------------------------------------------------------------------ writing


def write_nodes(path: str, nodes: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in nodes:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def write_edges(path: str, edges: list[tuple]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for src, rel, dst, weight in edges:
            fh.write(f"{src}\t{rel}\t{dst}\t{weight}\n")


def write_frames(path: str, frames: list[SrlFrame]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for frame in frames:
            fh.write(json.dumps(frame.to_record(), ensure_ascii=False) + "\n")


def main() -> None:
    os.makedirs(FIXTURE_DIR, exist_ok=True)
    rng = np.random.default_rng(SEED)
    nodes, edges, node_id = build_kg(rng)
    stories = [story_frames(f"s{k}", spec) for k, spec in enumerate(STORIES)]

    verify(nodes, edges, node_id, stories, FIXTURE_DIR)

    write_frames(os.path.join(FIXTURE_DIR, "stories.jsonl"),
                 [f for story in stories for f in story])

    choices = choice_frames()
    write_frames(os.path.join(FIXTURE_DIR, "stories_choice.jsonl"), choices)

    nodes_path = os.path.join(FIXTURE_DIR, "kg_nodes.jsonl")
    edges_path = os.path.join(FIXTURE_DIR, "kg_edges.tsv")
    store = load_kg(nodes_path, edges_path)
    vocab = relation_vocabulary(store)
    params = random_params(
        seed=SEED, dims=[FALLBACK_DIM, 16], num_relations=2 * len(vocab),
        num_bases=-1, self_loop=True, pooling="attention",
        text_dim=FALLBACK_DIM, mlp_hidden=(16,),
    )
    params_path = os.path.join(FIXTURE_DIR, "scorer.evgw")
    save_params(params, params_path)

    verify_choices((nodes_path, edges_path), params_path, choices)
    print("fixtures written to", os.path.abspath(FIXTURE_DIR))


if __name__ == "__main__":
    main()
