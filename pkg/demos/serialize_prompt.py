"""Render one joint graph in every text variant and assemble a prompt.

The same five-node graph prints as DOT, as a node list, and as
node-and-edge arrows; the arrow form then slots into a multiple-choice
question prompt together with a competing ending.
"""

from __future__ import annotations

from evkg import (
    JointEdge,
    JointNode,
    JointSubgraph,
    PromptSpec,
    SerializationVariant,
    build_prompt,
    serialize,
)


def example_graph() -> JointSubgraph:
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


def main() -> None:
    graph = example_graph()
    for variant in (SerializationVariant.DOT, SerializationVariant.NODE, SerializationVariant.NODE_EDGE):
        print(f"--- variant {variant.value} ---")
        print(serialize(graph, variant))
        print()

    print("--- variant node_edge with relation labels ---")
    print(serialize(graph, SerializationVariant.NODE_EDGE, include_relation_labels=True))
    print()

    prompt = build_prompt(
        PromptSpec(
            question="Which ending is more plausible?",
            choices=(
                serialize(graph, SerializationVariant.NODE_EDGE),
                "[P0] fail the test --> [P0] cry",
            ),
        )
    )
    print("--- assembled prompt ---")
    print(prompt)


if __name__ == "__main__":
    main()
