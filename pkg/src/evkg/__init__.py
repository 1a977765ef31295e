"""Ground narratives to an eventuality knowledge graph and reason over
the joint subgraphs.

The library turns semantic-role frames into normalized events and
abstraction ladders, matches them to nearest KG eventualities by
embedding distance, retrieves bounded shortest-path subgraphs joining
the anchors, links them to the narrative through grounding and context
edges, and hands the result to either of two consumers: a text
serializer (prompt assembly for language models) or a relational
graph-convolution scorer for multiple-choice evaluation.
"""

from __future__ import annotations

from .embedding import (
    EmbeddingFile,
    HashEmbedder,
    attach_embeddings,
    read_embeddings,
    write_embeddings,
)
from .errors import (
    ConfigError,
    DimensionMismatchError,
    EvkgError,
    FormatError,
    InvariantError,
    UnknownNodeError,
    UnknownRelationError,
)
from .events import (
    AbstractionCap,
    Argument,
    NormalizedEvent,
    PartialEvent,
    PersonIndex,
    PersonSpan,
    SrlFrame,
    Verb,
    build_person_index,
    extract_partial_events,
    normalize_document,
    normalize_event,
    raw_event,
    render_text,
)
from .kg import (
    EventualityNode,
    KgStore,
    RelationTable,
    TypedEdge,
    build_store,
    load_kg,
    load_snapshot,
    restore,
    save_snapshot,
    snapshot,
)
from .matching import (
    DEFAULT_THRESHOLD,
    AnchorMatch,
    AnchorSets,
    EventIndex,
    GroundingStats,
    NearestHit,
    build_index,
    ground,
    grounding_stats,
    match_event,
    sentence_ground,
)
from .retrieval import (
    CONTEXT_RELATION,
    DEFAULT_GAMMA,
    GROUNDING_RELATION,
    JointEdge,
    JointNode,
    JointSubgraph,
    KgSubgraph,
    PathResult,
    build_joint_graph,
    retrieve_subgraph,
    shortest_path,
)
from .rgcn import (
    ChoiceScores,
    GraphTensors,
    PooledGraph,
    RgcnLayer,
    RgcnParams,
    ScoreHead,
    forward,
    joint_tensors,
    load_params,
    pool,
    random_params,
    relation_vocabulary,
    rgcn_layer,
    save_params,
    score,
    score_choices,
)
from .serialization import (
    PromptSpec,
    SerializationVariant,
    build_prompt,
    choice_label,
    serialize,
)

__version__ = "0.1.0"

__all__ = [
    "AbstractionCap",
    "AnchorMatch",
    "AnchorSets",
    "Argument",
    "ChoiceScores",
    "ConfigError",
    "CONTEXT_RELATION",
    "DEFAULT_GAMMA",
    "DEFAULT_THRESHOLD",
    "DimensionMismatchError",
    "EmbeddingFile",
    "EventIndex",
    "EventualityNode",
    "EvkgError",
    "FormatError",
    "GraphTensors",
    "GROUNDING_RELATION",
    "GroundingStats",
    "HashEmbedder",
    "InvariantError",
    "JointEdge",
    "JointNode",
    "JointSubgraph",
    "KgStore",
    "KgSubgraph",
    "NearestHit",
    "NormalizedEvent",
    "PartialEvent",
    "PathResult",
    "PersonIndex",
    "PersonSpan",
    "PooledGraph",
    "PromptSpec",
    "RelationTable",
    "RgcnLayer",
    "RgcnParams",
    "ScoreHead",
    "SerializationVariant",
    "SrlFrame",
    "TypedEdge",
    "UnknownNodeError",
    "UnknownRelationError",
    "Verb",
    "attach_embeddings",
    "build_index",
    "build_joint_graph",
    "build_person_index",
    "build_prompt",
    "build_store",
    "choice_label",
    "extract_partial_events",
    "forward",
    "ground",
    "grounding_stats",
    "joint_tensors",
    "load_kg",
    "load_params",
    "load_snapshot",
    "match_event",
    "normalize_document",
    "normalize_event",
    "pool",
    "random_params",
    "raw_event",
    "read_embeddings",
    "relation_vocabulary",
    "render_text",
    "restore",
    "retrieve_subgraph",
    "rgcn_layer",
    "save_params",
    "save_snapshot",
    "score",
    "score_choices",
    "sentence_ground",
    "serialize",
    "shortest_path",
    "snapshot",
    "write_embeddings",
]
