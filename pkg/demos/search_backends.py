"""Compare exact and approximate nearest-anchor search on random data.

The approximate backend clusters the node vectors and probes only the
closest cells per query, trading a little recall for less distance
work.  On clustered data the probe list almost always contains the
true nearest node.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from evkg import build_index


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=20000)
    parser.add_argument("--dim", type=int, default=32)
    parser.add_argument("--queries", type=int, default=200)
    parser.add_argument("--nlist", type=int, default=128, help="clustering cells")
    parser.add_argument("--nprobe", type=int, default=8, help="cells probed per query")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    centers = rng.normal(scale=4.0, size=(50, args.dim))
    assignment = rng.integers(0, len(centers), size=args.nodes)
    vectors = centers[assignment] + rng.normal(scale=0.5, size=(args.nodes, args.dim))
    queries = vectors[rng.integers(0, args.nodes, size=args.queries)] + rng.normal(
        scale=0.2, size=(args.queries, args.dim)
    )

    exact = build_index(vectors)
    t0 = time.perf_counter()
    approx = build_index(
        vectors, "approximate", nlist=args.nlist, nprobe=args.nprobe, seed=args.seed
    )
    build_time = time.perf_counter() - t0
    print(f"approximate index: {approx.metadata['nlist']} cells, "
          f"{approx.metadata['nprobe']} probed per query, built in {build_time:.2f}s")

    t0 = time.perf_counter()
    truth = [exact.nearest(q) for q in queries]
    exact_time = time.perf_counter() - t0
    t0 = time.perf_counter()
    found = [approx.nearest(q) for q in queries]
    approx_time = time.perf_counter() - t0

    agree = sum(a.node_id == b.node_id for a, b in zip(truth, found))
    print(f"exact scan:      {exact_time * 1000:.1f} ms for {args.queries} queries")
    print(f"approximate:     {approx_time * 1000:.1f} ms for {args.queries} queries")
    print(f"recall@1:        {agree}/{args.queries} = {agree / args.queries:.3f}")

    worst = max(
        (abs(a.distance - b.distance) for a, b in zip(truth, found)),
        default=0.0,
    )
    print(f"largest distance gap on disagreements: {worst:.4f}")


if __name__ == "__main__":
    main()
