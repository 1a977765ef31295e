"""Command-line orchestration of the grounding pipeline.

Commands front the library stage by stage — ``ingest-kg``,
``normalize``, ``pie``, ``ground``, ``retrieve``, ``serialize``,
``score``, ``stats`` — and ``pipeline`` chains them
(normalize → pie → ground → retrieve → serialize, optionally → score)
with byte-identical outputs to running the stages by hand.

Inputs and outputs are line-delimited JSON records (KG snapshots,
embeddings, and scorer parameters are binary files).  Outputs are
canonically sorted, written atomically, and reruns are idempotent.
Without embedding files, a deterministic hashing embedder fills in and
stamps its name into every record it influenced.  Errors exit nonzero
(2 input format, 3 configuration, 4 internal invariant) with a single
machine-readable record on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .embedding import HashEmbedder, attach_embeddings, read_embeddings
from .errors import ConfigError, EvkgError, FormatError
from .events import (
    AbstractionCap,
    SrlFrame,
    extract_partial_events,
    normalize_document,
)
from .kg import KgStore, load_kg, load_snapshot, snapshot
from .matching import (
    DEFAULT_THRESHOLD,
    AnchorMatch,
    AnchorSets,
    build_index,
    ground,
    grounding_stats,
)
from .records import dump_record, load_records, read_records, records_text, write_bytes, write_text
from .retrieval import DEFAULT_GAMMA, JointSubgraph, build_joint_graph, retrieve_subgraph
from .rgcn import joint_tensors, load_params, relation_vocabulary, score_choices
from .serialization import SerializationVariant, serialize

ANCHOR_FIELDS = ("doc_id", "sent_idx", "frame_idx", "level", "node_id", "distance")
DEFAULT_FALLBACK_DIM = 64
ATTENTION_TOP_K = 5


# ------------------------------------------------------------- configuration


@dataclass
class PipelineConfig:
    """Everything the pipeline needs, loadable from a key=value file."""

    kg_snapshot: str | None = None
    kg_nodes: str | None = None
    kg_edges: str | None = None
    events: str | None = None
    out_dir: str | None = None
    kg_embeddings: str | None = None
    query_embeddings: str | None = None
    params: str | None = None
    threshold: float = DEFAULT_THRESHOLD
    gamma: int = DEFAULT_GAMMA
    cap: str = "ARG1"
    variant: str = "node_edge"
    relation_labels: bool = False
    no_extract: bool = False
    no_norm: bool = False
    no_pie: bool = False
    fallback_dim: int = DEFAULT_FALLBACK_DIM
    backend: str = "exact"
    nlist: int | None = None
    nprobe: int | None = None
    seed: int = 0
    threads: int = 1

    def validate(self) -> None:
        if not self.events:
            raise ConfigError("an events file is required (events=... or --events)")
        if not self.out_dir:
            raise ConfigError("an output directory is required (out_dir=... or --out-dir)")
        if self.kg_snapshot:
            if self.kg_nodes or self.kg_edges:
                raise ConfigError("give either kg_snapshot or kg_nodes+kg_edges, not both")
        elif not (self.kg_nodes and self.kg_edges):
            raise ConfigError("a knowledge graph is required: kg_snapshot, or kg_nodes and kg_edges")
        _check_search_options(
            threshold=self.threshold,
            backend=self.backend,
            nlist=self.nlist,
            nprobe=self.nprobe,
            fallback_dim=self.fallback_dim,
            threads=self.threads,
            kg_embeddings=self.kg_embeddings,
            query_embeddings=self.query_embeddings,
        )
        if self.gamma < 1:
            raise ConfigError(f"gamma must be >= 1, got {self.gamma}")
        _parse_cap(self.cap)
        _parse_variant(self.variant)
        if self.no_extract:
            # Whole-sentence grounding leaves nothing to abstract over.
            self.no_pie = True


def _parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {value!r}")


def _convert(field: dataclasses.Field, value: str):
    kind = field.type
    try:
        if kind == "bool":
            return _parse_bool(value)
        if kind == "int" or kind == "int | None":
            return int(value)
        if kind == "float":
            return float(value)
    except ValueError:
        raise ConfigError(f"config key {field.name!r}: expected {kind}, got {value!r}") from None
    return value


def load_config_file(path: str) -> dict:
    """Parse a key=value config file ('#' starts a comment line)."""
    by_name = {f.name: f for f in dataclasses.fields(PipelineConfig)}
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, _, raw = stripped.partition("=")
            key = key.strip()
            if key not in by_name:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = _convert(by_name[key], raw.strip())
    return values


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig()
    if args.config:
        for key, value in load_config_file(args.config).items():
            setattr(cfg, key, value)
    for field in dataclasses.fields(PipelineConfig):
        override = getattr(args, field.name, None)
        if override is not None:
            setattr(cfg, field.name, override)
    cfg.validate()
    return cfg


def _parse_cap(name: str) -> AbstractionCap:
    try:
        return AbstractionCap.parse(name)
    except FormatError as exc:
        raise ConfigError(str(exc)) from None


def _parse_variant(name: str) -> SerializationVariant:
    try:
        return SerializationVariant.parse(name)
    except FormatError as exc:
        raise ConfigError(str(exc)) from None


def _check_search_options(
    *,
    threshold: float,
    backend: str,
    nlist: int | None,
    nprobe: int | None,
    fallback_dim: int,
    threads: int,
    kg_embeddings: str | None,
    query_embeddings: str | None,
) -> None:
    if threshold < 0:
        raise ConfigError(f"threshold must be >= 0, got {threshold}")
    if backend not in ("exact", "approximate"):
        raise ConfigError(f"backend must be 'exact' or 'approximate', got {backend!r}")
    for name, value in (("nlist", nlist), ("nprobe", nprobe)):
        if value is not None and value < 1:
            raise ConfigError(f"{name} must be >= 1, got {value}")
    if fallback_dim < 1:
        raise ConfigError(f"fallback embedder dim must be >= 1, got {fallback_dim}")
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    if (kg_embeddings is None) != (query_embeddings is None):
        raise ConfigError(
            "supply both kg embeddings and query embeddings, or neither (fallback embedder)"
        )


# ------------------------------------------------------------ input loading


def _read_frames(path: str) -> list[SrlFrame]:
    frames = []
    seen = set()
    for lineno, obj in read_records(path):
        try:
            frame = SrlFrame.from_record(obj)
        except FormatError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
        key = (frame.doc_id, frame.sent_idx, frame.frame_idx)
        if key in seen:
            raise FormatError(f"{path}:{lineno}: duplicate frame {key}")
        seen.add(key)
        frames.append(frame)
    return frames


def _load_event_records(path: str) -> list[dict]:
    """Validated event-text records: doc/frame refs with level and texts."""
    out = []
    for lineno, obj in read_records(path):
        for key in ("doc_id", "sent_idx", "frame_idx", "level", "text"):
            if key not in obj:
                raise FormatError(f"{path}:{lineno}: missing field {key!r}")
        if not isinstance(obj["doc_id"], str) or not obj["doc_id"]:
            raise FormatError(f"{path}:{lineno}: doc_id must be a non-empty string")
        for key in ("sent_idx", "level"):
            if not isinstance(obj[key], int) or isinstance(obj[key], bool) or obj[key] < 0:
                raise FormatError(f"{path}:{lineno}: {key} must be a non-negative integer")
        fidx = obj["frame_idx"]
        if not isinstance(fidx, int) or isinstance(fidx, bool) or fidx < -1:
            raise FormatError(f"{path}:{lineno}: frame_idx must be an integer >= -1")
        if not isinstance(obj["text"], str):
            raise FormatError(f"{path}:{lineno}: text must be a string")
        out.append(obj)
    return out


def _load_anchor_matches(path: str) -> list[AnchorMatch]:
    matches = []
    for lineno, obj in read_records(path):
        core = {key: obj[key] for key in ANCHOR_FIELDS if key in obj}
        try:
            matches.append(AnchorMatch.from_record(core))
        except FormatError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
    return matches


def _load_store_from(snapshot_path: str | None, nodes: str | None, edges: str | None) -> KgStore:
    if snapshot_path:
        return load_snapshot(snapshot_path)
    return load_kg(nodes, edges)


# ------------------------------------------------------------- stage cores


def run_normalize(frames: list[SrlFrame], *, no_norm: bool, no_extract: bool) -> list[dict]:
    """Level-0 event records per frame — or per-sentence records when
    extraction is bypassed (frame_idx -1, raw sentence text)."""
    by_doc: dict[str, list[SrlFrame]] = {}
    for frame in frames:
        by_doc.setdefault(frame.doc_id, []).append(frame)
    records = []
    for doc_id in sorted(by_doc):
        doc_frames = sorted(by_doc[doc_id], key=lambda f: (f.sent_idx, f.frame_idx))
        if no_extract:
            sentences: dict[int, str] = {}
            for frame in doc_frames:
                if frame.sentence is None:
                    raise FormatError(
                        f"frame ({frame.doc_id}, {frame.sent_idx}, {frame.frame_idx}) has no "
                        "sentence text; whole-sentence grounding requires it"
                    )
                if sentences.get(frame.sent_idx, frame.sentence) != frame.sentence:
                    raise FormatError(
                        f"document {frame.doc_id!r} sentence {frame.sent_idx} has inconsistent texts"
                    )
                sentences[frame.sent_idx] = frame.sentence
            for sent_idx in sorted(sentences):
                text = sentences[sent_idx]
                records.append(
                    {"doc_id": doc_id, "sent_idx": sent_idx, "frame_idx": -1, "level": 0,
                     "text": text, "tagged": text}
                )
        else:
            for event in normalize_document(doc_frames, enabled=not no_norm):
                records.append(
                    {"doc_id": event.doc_id, "sent_idx": event.sent_idx,
                     "frame_idx": event.frame_idx, "level": 0,
                     "text": event.plain, "tagged": event.tagged}
                )
    return records


def run_pie(frames: list[SrlFrame], *, cap: AbstractionCap, no_norm: bool) -> list[dict]:
    """Full abstraction ladders, one record per (event, level)."""
    by_doc: dict[str, list[SrlFrame]] = {}
    for frame in frames:
        by_doc.setdefault(frame.doc_id, []).append(frame)
    records = []
    for doc_id in sorted(by_doc):
        doc_frames = sorted(by_doc[doc_id], key=lambda f: (f.sent_idx, f.frame_idx))
        for event in normalize_document(doc_frames, enabled=not no_norm):
            for partial in extract_partial_events(event, cap):
                records.append(
                    {"doc_id": event.doc_id, "sent_idx": event.sent_idx,
                     "frame_idx": event.frame_idx, "level": partial.level,
                     "text": partial.plain, "tagged": partial.tagged}
                )
    return records


def run_ground(
    store: KgStore,
    query_records: list[dict],
    *,
    threshold: float,
    backend: str,
    nlist: int | None,
    nprobe: int | None,
    seed: int,
    threads: int,
    kg_embeddings: str | None,
    query_embeddings: str | None,
    fallback_dim: int,
) -> tuple[list[dict], AnchorSets]:
    """Match every query record against the KG; returns stamped anchor
    records plus the underlying anchor sets for stats."""
    refs = [
        (obj["doc_id"], obj["sent_idx"], obj["frame_idx"], obj["level"]) for obj in query_records
    ]
    stamp: dict[str, str] = {}
    if kg_embeddings is not None:
        kg_emb = read_embeddings(kg_embeddings)
        attach_embeddings(store, kg_emb)
        vectors = kg_emb.vectors
        q_emb = read_embeddings(query_embeddings)
        q_emb.require_identity_ids("query embedding file")
        if q_emb.count != len(refs):
            raise FormatError(
                f"query embedding file has {q_emb.count} rows for {len(refs)} query records"
            )
        if q_emb.count and kg_emb.count and q_emb.dim != kg_emb.dim:
            raise FormatError(
                f"query embedding dim {q_emb.dim} != KG embedding dim {kg_emb.dim}"
            )
        query_vectors = q_emb.vectors
    else:
        embedder = HashEmbedder(dim=fallback_dim)
        vectors = embedder.embed([store.text(i) for i in range(store.node_count)])
        query_vectors = embedder.embed([obj["text"] for obj in query_records])
        stamp["embedder"] = embedder.name
    index = build_index(vectors, backend=backend, nlist=nlist, nprobe=nprobe, seed=seed)
    if backend == "approximate":
        stamp["backend"] = backend
    pairs = list(zip(refs, query_vectors))
    if threads > 1 and len(pairs) > 1:
        chunks = [pairs[i::threads] for i in range(threads) if pairs[i::threads]]
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            partial_sets = list(pool.map(lambda chunk: ground(index, chunk, threshold), chunks))
        anchors = AnchorSets([m for part in partial_sets for m in part])
    else:
        anchors = ground(index, pairs, threshold)
    records = [dict(match.to_record(), **stamp) for match in anchors]
    return records, anchors


def run_stats(query_count: int, matches: list[AnchorMatch], mode: str) -> dict:
    return grounding_stats(AnchorSets(matches), query_count, mode=mode).to_record()


def run_retrieve(
    store: KgStore,
    matches: list[AnchorMatch],
    event_records: list[dict],
    gamma: int,
) -> list[dict]:
    """One joint-subgraph record per document, sorted by instance id."""
    contexts: dict[str, list[tuple[tuple[str, int, int], str]]] = {}
    seen = set()
    for obj in event_records:
        if obj["level"] != 0:
            continue
        key = (obj["doc_id"], obj["sent_idx"], obj["frame_idx"])
        if key in seen:
            raise FormatError(f"duplicate context event {key}")
        seen.add(key)
        contexts.setdefault(obj["doc_id"], []).append((key, obj["text"]))
    unknown_docs = sorted({m.doc_id for m in matches} - set(contexts))
    if unknown_docs:
        raise FormatError(f"anchors reference documents absent from the events input: {unknown_docs}")
    records = []
    for doc_id in sorted(contexts):
        doc_events = sorted(contexts[doc_id], key=lambda item: item[0])
        doc_anchors = AnchorSets([m for m in matches if m.doc_id == doc_id])
        subgraph = retrieve_subgraph(store, doc_anchors, gamma)
        joint = build_joint_graph(store, subgraph, doc_events, doc_anchors)
        records.append({"instance_id": doc_id, **joint.to_record()})
    return records


def run_serialize(
    joint_records: list[dict], variant: SerializationVariant, relation_labels: bool
) -> list[dict]:
    out = []
    for obj in joint_records:
        instance_id = obj.get("instance_id")
        if not isinstance(instance_id, str) or not instance_id:
            raise FormatError("joint record needs a non-empty string instance_id")
        graph = JointSubgraph.from_record(obj)
        text = serialize(graph, variant, include_relation_labels=relation_labels)
        out.append({"instance_id": instance_id, "variant": variant.value, "text": text})
    return sorted(out, key=lambda rec: rec["instance_id"])


def run_score(
    joint_records: list[dict],
    store: KgStore,
    params_path: str,
    *,
    fallback_dim: int,
    top_k: int = ATTENTION_TOP_K,
) -> list[dict]:
    """Multiple-choice scoring over joint graphs grouped by instance.

    Choices are joint records whose instance_id is "<instance>#<label>";
    the instance text embedding is the fallback embedding of the
    concatenated context texts.
    """
    params = load_params(params_path)
    vocab = relation_vocabulary(store)
    if params.num_relations != 2 * len(vocab):
        raise ConfigError(
            f"scorer parameters cover {params.num_relations} relations but this KG needs "
            f"{2 * len(vocab)} (forward + inverse)"
        )
    embedder = HashEmbedder(dim=fallback_dim)
    if params.dims[0] != embedder.dim:
        raise ConfigError(
            f"scorer input dim {params.dims[0]} != fallback embedder dim {embedder.dim}"
        )
    if params.head.text_dim != embedder.dim:
        raise ConfigError(
            f"scorer text dim {params.head.text_dim} != fallback embedder dim {embedder.dim}"
        )
    groups: dict[str, dict[str, JointSubgraph]] = {}
    for obj in joint_records:
        instance_id = obj.get("instance_id")
        if not isinstance(instance_id, str) or "#" not in instance_id:
            raise FormatError(
                f"instance id {instance_id!r} lacks the '<instance>#<choice>' form scoring needs"
            )
        base, _, label = instance_id.rpartition("#")
        if not base or not label:
            raise FormatError(f"instance id {instance_id!r} has an empty instance or choice part")
        group = groups.setdefault(base, {})
        if label in group:
            raise FormatError(f"duplicate choice {label!r} for instance {base!r}")
        group[label] = JointSubgraph.from_record(obj)
    records = []
    for base in sorted(groups):
        group = groups[base]
        if len(group) < 2:
            raise FormatError(f"instance {base!r} has {len(group)} choice(s); scoring needs at least 2")
        labels = sorted(group)
        choices = []
        for label in labels:
            graph = group[label]
            tensors = joint_tensors(graph, vocab)
            features = embedder.embed([node.text for node in graph.nodes]).astype(np.float64)
            instance_text = " ".join(node.text for node in graph.context_nodes)
            choices.append((embedder.embed_one(instance_text).astype(np.float64), tensors, features))
        result = score_choices(choices, params)
        record = {
            "instance_id": base,
            "choices": labels,
            "logits": [float(x) for x in result.logits],
            "probabilities": [float(p) for p in result.probabilities],
            "argmax": result.argmax,
            "embedder": embedder.name,
        }
        if params.pooling == "attention":
            blocks = []
            for label, weights in zip(labels, result.attention):
                nodes = group[label].nodes
                order = sorted(range(len(nodes)), key=lambda i: (-weights[i], nodes[i].id))
                blocks.append(
                    {"choice": label,
                     "nodes": [{"id": nodes[i].id, "weight": float(weights[i])} for i in order[:top_k]]}
                )
            record["attention"] = blocks
        records.append(record)
    return records


# ---------------------------------------------------------------- commands


def _emit(records: list[dict], out_path: str | None) -> None:
    text = records_text(records)
    if out_path:
        write_text(out_path, text)
    else:
        sys.stdout.write(text)


def cmd_ingest_kg(args: argparse.Namespace) -> None:
    store = load_kg(args.nodes, args.edges)
    write_bytes(args.out, snapshot(store))
    print(dump_record(
        {"nodes": store.node_count, "edges": store.edge_count, "relations": len(store.relations)}
    ))


def cmd_normalize(args: argparse.Namespace) -> None:
    frames = _read_frames(args.events)
    _emit(run_normalize(frames, no_norm=args.no_norm, no_extract=args.no_extract), args.out)


def cmd_pie(args: argparse.Namespace) -> None:
    frames = _read_frames(args.events)
    cap = _parse_cap(args.cap)
    _emit(run_pie(frames, cap=cap, no_norm=args.no_norm), args.out)


def cmd_ground(args: argparse.Namespace) -> None:
    _check_search_options(
        threshold=args.threshold,
        backend=args.backend,
        nlist=args.nlist,
        nprobe=args.nprobe,
        fallback_dim=args.fallback_dim,
        threads=args.threads,
        kg_embeddings=args.kg_embeddings,
        query_embeddings=args.query_embeddings,
    )
    store = load_snapshot(args.kg)
    queries = _load_event_records(args.queries)
    records, _anchors = run_ground(
        store,
        queries,
        threshold=args.threshold,
        backend=args.backend,
        nlist=args.nlist,
        nprobe=args.nprobe,
        seed=args.seed,
        threads=args.threads,
        kg_embeddings=args.kg_embeddings,
        query_embeddings=args.query_embeddings,
        fallback_dim=args.fallback_dim,
    )
    _emit(records, args.out)


def cmd_stats(args: argparse.Namespace) -> None:
    if args.mode not in ("event", "sentence"):
        raise ConfigError(f"mode must be 'event' or 'sentence', got {args.mode!r}")
    queries = _load_event_records(args.queries)
    matches = _load_anchor_matches(args.anchors)
    _emit([run_stats(len(queries), matches, args.mode)], args.out)


def cmd_retrieve(args: argparse.Namespace) -> None:
    if args.gamma < 1:
        raise ConfigError(f"gamma must be >= 1, got {args.gamma}")
    store = load_snapshot(args.kg)
    matches = _load_anchor_matches(args.anchors)
    events = _load_event_records(args.events)
    _emit(run_retrieve(store, matches, events, args.gamma), args.out)


def cmd_serialize(args: argparse.Namespace) -> None:
    variant = _parse_variant(args.variant)
    joint = load_records(args.joint)
    _emit(run_serialize(joint, variant, args.relation_labels), args.out)


def cmd_score(args: argparse.Namespace) -> None:
    if args.fallback_dim < 1:
        raise ConfigError(f"fallback embedder dim must be >= 1, got {args.fallback_dim}")
    if args.top_k < 1:
        raise ConfigError(f"top-k must be >= 1, got {args.top_k}")
    store = load_snapshot(args.kg)
    joint = load_records(args.joint)
    _emit(
        run_score(joint, store, args.params, fallback_dim=args.fallback_dim, top_k=args.top_k),
        args.out,
    )


def cmd_pipeline(args: argparse.Namespace) -> None:
    cfg = _config_from_args(args)
    frames = _read_frames(cfg.events)
    store = _load_store_from(cfg.kg_snapshot, cfg.kg_nodes, cfg.kg_edges)
    os.makedirs(cfg.out_dir, exist_ok=True)
    written: list[str] = []

    def stage_out(name: str, text: str) -> None:
        path = os.path.join(cfg.out_dir, name)
        write_text(path, text)
        written.append(path)

    try:
        normalized = run_normalize(frames, no_norm=cfg.no_norm, no_extract=cfg.no_extract)
        stage_out("normalized.jsonl", records_text(normalized))
        if cfg.no_pie:
            queries = normalized
        else:
            queries = run_pie(frames, cap=_parse_cap(cfg.cap), no_norm=cfg.no_norm)
            stage_out("partials.jsonl", records_text(queries))
        anchor_records, anchors = run_ground(
            store,
            queries,
            threshold=cfg.threshold,
            backend=cfg.backend,
            nlist=cfg.nlist,
            nprobe=cfg.nprobe,
            seed=cfg.seed,
            threads=cfg.threads,
            kg_embeddings=cfg.kg_embeddings,
            query_embeddings=cfg.query_embeddings,
            fallback_dim=cfg.fallback_dim,
        )
        stage_out("anchors.jsonl", records_text(anchor_records))
        mode = "sentence" if cfg.no_extract else "event"
        stage_out("stats.jsonl", records_text([run_stats(len(queries), list(anchors), mode)]))
        joint = run_retrieve(store, list(anchors), normalized, cfg.gamma)
        stage_out("joint.jsonl", records_text(joint))
        serialized = run_serialize(joint, _parse_variant(cfg.variant), cfg.relation_labels)
        stage_out("serialized.jsonl", records_text(serialized))
        if cfg.params:
            scores = run_score(joint, store, cfg.params, fallback_dim=cfg.fallback_dim)
            stage_out("scores.jsonl", records_text(scores))
    except BaseException:
        for path in written:
            try:
                os.unlink(path)
            except OSError:
                pass
        raise


# ----------------------------------------------------------- argument wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evkg",
        description="Ground narratives to an eventuality knowledge graph and score choices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-kg", help="load node/edge files and write a binary KG snapshot")
    p.add_argument("--nodes", required=True, help="node records file (JSON lines)")
    p.add_argument("--edges", required=True, help="tab-separated edge file")
    p.add_argument("--out", required=True, help="snapshot output path")
    p.set_defaults(func=cmd_ingest_kg)

    p = sub.add_parser("normalize", help="person-token normalization to level-0 event records")
    p.add_argument("--events", required=True, help="semantic-role frame records file")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--no-norm", action="store_true", default=False,
                   help="keep raw argument texts (skip person-token replacement)")
    p.add_argument("--no-extract", action="store_true", default=False,
                   help="emit whole sentences instead of extracted events")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("pie", help="abstraction ladders (partial events) per frame")
    p.add_argument("--events", required=True, help="semantic-role frame records file")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--cap", default="ARG1", help="most abstract tier to reach (default ARG1)")
    p.add_argument("--no-norm", action="store_true", default=False)
    p.set_defaults(func=cmd_pie)

    p = sub.add_parser("ground", help="match event records to nearest KG anchors")
    p.add_argument("--kg", required=True, help="KG snapshot path")
    p.add_argument("--queries", required=True, help="event/partial records to ground")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--kg-embeddings", help="embedding file for KG nodes")
    p.add_argument("--query-embeddings", help="embedding file aligned with the query records")
    p.add_argument("--fallback-dim", type=int, default=DEFAULT_FALLBACK_DIM)
    p.add_argument("--backend", default="exact", help="exact or approximate")
    p.add_argument("--nlist", type=int, help="approximate backend: number of cells")
    p.add_argument("--nprobe", type=int, help="approximate backend: cells probed per query")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_ground)

    p = sub.add_parser("stats", help="grounding hit rate and mean anchor distance")
    p.add_argument("--queries", required=True, help="the records that were grounded")
    p.add_argument("--anchors", required=True, help="anchor records produced by ground")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--mode", default="event", help="event or sentence")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("retrieve", help="joint subgraphs from anchors via bounded shortest paths")
    p.add_argument("--kg", required=True, help="KG snapshot path")
    p.add_argument("--anchors", required=True, help="anchor records file")
    p.add_argument("--events", required=True, help="event records supplying context texts")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--gamma", type=int, default=DEFAULT_GAMMA, help="hop limit (default 3)")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("serialize", help="render joint subgraphs as text")
    p.add_argument("--joint", required=True, help="joint subgraph records file")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--variant", default="node_edge", help="dot, node, or node_edge")
    p.add_argument("--relation-labels", action="store_true", default=False,
                   help="include relation names in node_edge output")
    p.set_defaults(func=cmd_serialize)

    p = sub.add_parser("score", help="score choice groups of joint subgraphs")
    p.add_argument("--kg", required=True, help="KG snapshot path (relation vocabulary)")
    p.add_argument("--joint", required=True, help="joint records with '<instance>#<choice>' ids")
    p.add_argument("--params", required=True, help="scorer parameter file")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--fallback-dim", type=int, default=DEFAULT_FALLBACK_DIM)
    p.add_argument("--top-k", type=int, default=ATTENTION_TOP_K,
                   help="attention nodes reported per choice")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("pipeline", help="run every stage into an output directory")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--kg-snapshot", dest="kg_snapshot", help="KG snapshot path")
    p.add_argument("--kg-nodes", dest="kg_nodes")
    p.add_argument("--kg-edges", dest="kg_edges")
    p.add_argument("--events", dest="events")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--kg-embeddings", dest="kg_embeddings")
    p.add_argument("--query-embeddings", dest="query_embeddings")
    p.add_argument("--params", dest="params", help="scorer parameters; enables the score stage")
    p.add_argument("--threshold", dest="threshold", type=float)
    p.add_argument("--gamma", dest="gamma", type=int)
    p.add_argument("--cap", dest="cap")
    p.add_argument("--variant", dest="variant")
    p.add_argument("--relation-labels", dest="relation_labels", action="store_true", default=None)
    p.add_argument("--no-extract", dest="no_extract", action="store_true", default=None)
    p.add_argument("--no-norm", dest="no_norm", action="store_true", default=None)
    p.add_argument("--no-pie", dest="no_pie", action="store_true", default=None)
    p.add_argument("--fallback-dim", dest="fallback_dim", type=int)
    p.add_argument("--backend", dest="backend")
    p.add_argument("--nlist", dest="nlist", type=int)
    p.add_argument("--nprobe", dest="nprobe", type=int)
    p.add_argument("--seed", dest="seed", type=int)
    p.add_argument("--threads", dest="threads", type=int)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except EvkgError as exc:
        record = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        print(json.dumps(record, ensure_ascii=False), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        record = {"error": "ConfigError", "message": str(exc), "exit_code": 3}
        print(json.dumps(record, ensure_ascii=False), file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
