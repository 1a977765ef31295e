"""Build a small eventuality graph, snapshot it, and walk its edges.

Nodes are short normalized event texts; edges carry a discourse
relation and a weight.  The snapshot is a single binary file that
restores to an identical store, so a graph ingested once can be
memory-mapped into every later run.
"""

from __future__ import annotations

import os
import tempfile

from evkg import build_store, load_snapshot, save_snapshot


def main() -> None:
    store = build_store(
        nodes=[
            (0, "[P0] have some wine", 42),
            (1, "[P0] feel sleepy", 31),
            (2, "[P0] say goodbye", 17),
            (3, "[P0] go home", 58),
            (4, "[P0] fall asleep", 23),
        ],
        edges=[
            (0, "Precedence", 1, 3.0),
            (1, "Reason", 2, 1.0),
            (2, "Precedence", 3, 2.0),
            (3, "Precedence", 4, 5.0),
            (1, "Precedence", 4, 1.0),
            # duplicate edges merge by summing weight at build time
            (0, "Precedence", 1, 1.5),
        ],
    )
    print(f"built store: {store.node_count} nodes, {store.edge_count} edges")
    print(f"relations: {store.relations.names}")

    print("\nout-edges per node:")
    for node_id in range(store.node_count):
        for edge, neighbor in store.neighbors(node_id, "out"):
            rel = store.relations.name_of(edge.rel)
            print(
                f"  {store.text(node_id)!r} --{rel}({edge.weight:g})--> "
                f"{store.text(neighbor)!r}"
            )

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "graph.evgs")
        save_snapshot(store, path)
        size = os.path.getsize(path)
        restored = load_snapshot(path)
    print(f"\nsnapshot round-trip: {size} bytes, "
          f"{restored.node_count} nodes and {restored.edge_count} edges restored")
    assert [restored.text(i) for i in range(restored.node_count)] == [
        store.text(i) for i in range(store.node_count)
    ]
    print("restored texts match the original store")


if __name__ == "__main__":
    main()
