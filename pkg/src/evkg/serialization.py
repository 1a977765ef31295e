"""Render a joint subgraph as text and assemble multiple-choice prompts.

Three variants: DOT (a ``digraph`` listing with node labels and edge
relation labels), Node (node texts joined by "; "), and Node&Edge (one
"src --> dst" segment per edge, optionally carrying the relation as
"--[rel]-->").  Node order is always the graph's canonical order —
context nodes in narrative order, then KG nodes by id — so outputs are
byte-stable.

The prompt layout is one "Event knowledge on narrative choice X: …"
line per choice, a "Question:" line, and a terminal "Answer:".
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from enum import Enum

from .errors import FormatError
from .retrieval import JointSubgraph


class SerializationVariant(Enum):
    DOT = "dot"
    NODE = "node"
    NODE_EDGE = "node_edge"

    @classmethod
    def parse(cls, name: str) -> "SerializationVariant":
        key = name.strip().lower().replace("&", "_").replace("-", "_").replace(" ", "")
        for variant in cls:
            if key == variant.value.replace("_", "") or key == variant.value:
                return variant
        valid = ", ".join(v.value for v in cls)
        raise FormatError(f"unknown serialization variant {name!r} (expected one of {valid})")


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def serialize(
    graph: JointSubgraph,
    variant: SerializationVariant = SerializationVariant.NODE_EDGE,
    include_relation_labels: bool = False,
) -> str:
    """Deterministic text for one graph; empty graphs yield "" (DOT: an
    empty digraph)."""
    nodes = graph.nodes
    text_of = {n.id: n.text for n in nodes}
    if variant is SerializationVariant.NODE:
        return "; ".join(n.text for n in nodes)
    if variant is SerializationVariant.NODE_EDGE:
        segments = []
        for e in graph.edges:
            arrow = f" --[{e.rel}]--> " if include_relation_labels else " --> "
            segments.append(f"{text_of[e.src]}{arrow}{text_of[e.dst]}")
        return "; ".join(segments)
    if variant is SerializationVariant.DOT:
        if not nodes and not graph.edges:
            return "digraph G { }"
        index = {n.id: k for k, n in enumerate(nodes)}
        lines = ["digraph G {"]
        for n in nodes:
            lines.append(f'  n{index[n.id]} [label="{_dot_escape(n.text)}"];')
        for e in graph.edges:
            lines.append(f'  n{index[e.src]} -> n{index[e.dst]} [label="{_dot_escape(e.rel)}"];')
        lines.append("}")
        return "\n".join(lines)
    raise FormatError(f"unknown serialization variant {variant!r}")


@dataclass(frozen=True)
class PromptSpec:
    """Question plus one serialized graph block per answer choice."""

    question: str
    choices: tuple[str, ...]


def choice_label(position: int) -> str:
    if not 0 <= position < len(string.ascii_uppercase):
        raise FormatError(f"no label for choice position {position} (A..Z supported)")
    return string.ascii_uppercase[position]


def build_prompt(spec: PromptSpec) -> str:
    if len(spec.choices) < 2:
        raise FormatError(f"a prompt needs at least 2 choices, got {len(spec.choices)}")
    if not spec.question:
        raise FormatError("prompt question must be non-empty")
    lines = [
        f"Event knowledge on narrative choice {choice_label(k)}: {block}"
        for k, block in enumerate(spec.choices)
    ]
    lines.append(f"Question:{spec.question}")
    lines.append("Answer:")
    return "\n".join(lines)
