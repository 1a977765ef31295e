"""Tests for graph-to-text rendering and prompt assembly."""

from __future__ import annotations

import re
from pathlib import Path

import pytest

from evkg.errors import FormatError
from evkg.retrieval import JointEdge, JointNode, JointSubgraph
from evkg.serialization import (
    PromptSpec,
    SerializationVariant,
    build_prompt,
    choice_label,
    serialize,
)

GOLDENS = Path(__file__).parent / "goldens"


def five_node_graph():
    return JointSubgraph(
        context_nodes=(
            JointNode("ctx:0", "[P0] study"),
            JointNode("ctx:1", "[P0] pass the test"),
        ),
        kg_nodes=(
            JointNode("kg:2", "it go well"),
            JointNode("kg:5", "[P0] celebrate"),
            JointNode("kg:8", '[P1] shout "hooray"'),
        ),
        edges=(
            JointEdge("ctx:0", "ctx:1", "context"),
            JointEdge("ctx:0", "kg:2", "grounding"),
            JointEdge("ctx:1", "kg:5", "grounding"),
            JointEdge("kg:2", "kg:5", "Conjunction"),
            JointEdge("kg:2", "kg:8", "Reason"),
        ),
    )


def read_golden(name):
    return (GOLDENS / name).read_text(encoding="utf-8")


_DOT_NODE_RE = re.compile(r'^  n(\d+) \[label="((?:[^"\\]|\\.)*)"\];$')
_DOT_EDGE_RE = re.compile(r'^  n(\d+) -> n(\d+) \[label="((?:[^"\\]|\\.)*)"\];$')


def parse_dot(text):
    """Minimal reader for the DOT dialect this package emits."""
    lines = text.split("\n")
    assert lines[0] == "digraph G {"
    assert lines[-1] == "}"
    nodes, edges = {}, []
    for line in lines[1:-1]:
        m = _DOT_NODE_RE.match(line)
        if m:
            nodes[int(m.group(1))] = m.group(2).replace('\\"', '"').replace("\\\\", "\\")
            continue
        m = _DOT_EDGE_RE.match(line)
        assert m, f"unparseable DOT line: {line!r}"
        edges.append((int(m.group(1)), int(m.group(2)), m.group(3)))
    return nodes, edges


def test_node_variant_matches_golden():
    assert serialize(five_node_graph(), SerializationVariant.NODE) == read_golden("five_node.node")


def test_node_edge_variant_matches_golden():
    assert serialize(five_node_graph(), SerializationVariant.NODE_EDGE) == read_golden("five_node.node_edge")


def test_labeled_node_edge_matches_golden():
    got = serialize(five_node_graph(), SerializationVariant.NODE_EDGE, include_relation_labels=True)
    assert got == read_golden("five_node_labeled.node_edge")


def test_dot_variant_matches_golden():
    assert serialize(five_node_graph(), SerializationVariant.DOT) == read_golden("five_node.dot")


def test_two_edge_boat_race_string():
    graph = JointSubgraph(
        context_nodes=(
            JointNode("ctx:0", "[P0] buy a boat"),
            JointNode("ctx:1", "[P2] prepare"),
        ),
        kg_nodes=(
            JointNode("kg:4", "[P0's] nearby marina have a race"),
            JointNode("kg:6", "[P2] go to sleep"),
        ),
        edges=(
            JointEdge("ctx:0", "kg:4", "grounding"),
            JointEdge("ctx:1", "kg:6", "grounding"),
        ),
    )
    got = serialize(graph, SerializationVariant.NODE_EDGE)
    assert got == "[P0] buy a boat --> [P0's] nearby marina have a race; [P2] prepare --> [P2] go to sleep"


def test_empty_graph_all_variants():
    empty = JointSubgraph((), (), ())
    assert serialize(empty, SerializationVariant.NODE) == ""
    assert serialize(empty, SerializationVariant.NODE_EDGE) == ""
    assert serialize(empty, SerializationVariant.DOT) == "digraph G { }"


def test_dot_round_trips_through_minimal_reader():
    graph = five_node_graph()
    nodes, edges = parse_dot(serialize(graph, SerializationVariant.DOT))
    assert len(nodes) == len(graph.nodes)
    assert [nodes[k] for k in sorted(nodes)] == [n.text for n in graph.nodes]
    assert len(edges) == len(graph.edges)
    index = {n.id: k for k, n in enumerate(graph.nodes)}
    assert edges == [(index[e.src], index[e.dst], e.rel) for e in graph.edges]


def test_dot_escapes_backslash_and_quote():
    graph = JointSubgraph(
        context_nodes=(JointNode("ctx:0", 'say "hi" \\ wave'),),
        kg_nodes=(),
        edges=(),
    )
    text = serialize(graph, SerializationVariant.DOT)
    assert '\\"hi\\"' in text
    assert "\\\\" in text
    nodes, _ = parse_dot(text)
    assert nodes[0] == 'say "hi" \\ wave'


def test_node_covers_node_edge_vocabulary():
    graph = five_node_graph()
    node_text = serialize(graph, SerializationVariant.NODE)
    vocabulary = set(node_text.split("; "))
    for segment in serialize(graph, SerializationVariant.NODE_EDGE).split("; "):
        src, dst = segment.split(" --> ")
        assert src in vocabulary
        assert dst in vocabulary


def test_serialize_deterministic():
    graph = five_node_graph()
    for variant in SerializationVariant:
        assert serialize(graph, variant) == serialize(graph, variant)


def test_variant_parse():
    assert SerializationVariant.parse("dot") is SerializationVariant.DOT
    assert SerializationVariant.parse("Node") is SerializationVariant.NODE
    assert SerializationVariant.parse("node_edge") is SerializationVariant.NODE_EDGE
    assert SerializationVariant.parse("Node & Edge") is SerializationVariant.NODE_EDGE
    assert SerializationVariant.parse("node-edge") is SerializationVariant.NODE_EDGE
    with pytest.raises(FormatError, match="variant"):
        SerializationVariant.parse("svg")


def test_prompt_matches_golden():
    graph = five_node_graph()
    prompt = build_prompt(
        PromptSpec(
            question="Which ending is more plausible?",
            choices=(
                serialize(graph, SerializationVariant.NODE_EDGE),
                "[P0] fail the test --> [P0] cry",
            ),
        )
    )
    assert prompt == read_golden("prompt.txt")


def test_prompt_template_exact():
    prompt = build_prompt(PromptSpec(question="Q", choices=("X", "Y")))
    assert prompt == (
        "Event knowledge on narrative choice A: X\n"
        "Event knowledge on narrative choice B: Y\n"
        "Question:Q\n"
        "Answer:"
    )


def test_prompt_five_choices_labeled_a_to_e():
    prompt = build_prompt(PromptSpec(question="Q", choices=tuple("vwxyz")))
    labels = re.findall(r"narrative choice ([A-Z]):", prompt)
    assert labels == ["A", "B", "C", "D", "E"]


def test_prompt_validation():
    with pytest.raises(FormatError, match="choices"):
        build_prompt(PromptSpec(question="Q", choices=("only",)))
    with pytest.raises(FormatError, match="question"):
        build_prompt(PromptSpec(question="", choices=("X", "Y")))
    assert choice_label(25) == "Z"
    with pytest.raises(FormatError, match="label"):
        choice_label(26)
