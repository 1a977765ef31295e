"""Graph-convolution scorer tests against a dense normalized-adjacency
oracle, plus pooling, fusion, and parameter-file checks."""

from __future__ import annotations

import numpy as np
import pytest

from evkg.errors import DimensionMismatchError, FormatError, UnknownRelationError
from evkg.kg import build_store
from evkg.retrieval import JointEdge, JointNode, JointSubgraph
from evkg.rgcn import (
    ChoiceScores,
    GraphTensors,
    PooledGraph,
    RgcnLayer,
    RgcnParams,
    ScoreHead,
    forward,
    joint_tensors,
    load_params,
    params_blob,
    parse_params,
    pool,
    random_params,
    relation_vocabulary,
    rgcn_layer,
    save_params,
    score,
    score_choices,
)


def dense_layer_oracle(tensors: GraphTensors, feats: np.ndarray, layer: RgcnLayer, self_loop: bool) -> np.ndarray:
    """Materialize per-relation row-normalized adjacency matrices and
    compute the layer as plain dense matrix products."""
    n = tensors.num_nodes
    h = np.asarray(feats, dtype=np.float64)
    weights = layer.relation_weights()
    out = np.zeros((n, layer.d_out), dtype=np.float64)
    for r in range(layer.num_relations):
        adj = np.zeros((n, n), dtype=np.float64)
        for u, rr, v in zip(tensors.src, tensors.rel, tensors.dst):
            if rr == r:
                adj[v, u] += 1.0
        row_sums = adj.sum(axis=1)
        nz = row_sums > 0
        adj[nz] /= row_sums[nz, None]
        out += adj @ h @ weights[r].T
    if self_loop:
        out += h @ layer.self_weight.astype(np.float64).T
    out += layer.bias.astype(np.float64)
    return np.maximum(out, 0.0)


def random_tensors(rng: np.random.Generator, n_nodes: int, n_edges: int, n_rel: int) -> GraphTensors:
    return GraphTensors(
        src=rng.integers(0, n_nodes, size=n_edges),
        rel=rng.integers(0, n_rel, size=n_edges),
        dst=rng.integers(0, n_nodes, size=n_edges),
        num_nodes=n_nodes,
    )


def identity_layer(n_rel: int, dim: int) -> RgcnLayer:
    eye = np.stack([np.eye(dim, dtype=np.float32)] * n_rel)
    return RgcnLayer(weights=eye, bases=None, coeffs=None, self_weight=None,
                     bias=np.zeros(dim, dtype=np.float32))


# ------------------------------------------------------------ layer math


@pytest.mark.parametrize("self_loop", [False, True])
def test_layer_matches_dense_oracle(self_loop: bool) -> None:
    rng = np.random.default_rng(42)
    for trial in range(10):
        n = int(rng.integers(2, 51))
        tensors = random_tensors(rng, n, int(rng.integers(0, 4 * n)), 6)
        params = random_params(int(rng.integers(1 << 30)), [8, 6], 6, self_loop=self_loop)
        layer = params.layers[0]
        feats = rng.standard_normal((n, 8))
        got = rgcn_layer(tensors, feats, layer, self_loop=self_loop)
        want = dense_layer_oracle(tensors, feats, layer, self_loop)
        np.testing.assert_allclose(got, want, rtol=1e-5, atol=1e-12)


def test_two_layer_forward_matches_composed_oracle() -> None:
    rng = np.random.default_rng(7)
    for trial in range(5):
        n = int(rng.integers(2, 51))
        tensors = random_tensors(rng, n, int(rng.integers(1, 3 * n)), 4)
        params = random_params(int(rng.integers(1 << 30)), [5, 7, 3], 4, self_loop=True)
        feats = rng.standard_normal((n, 5))
        got = forward(tensors, feats, params)
        mid = dense_layer_oracle(tensors, feats, params.layers[0], True)
        want = dense_layer_oracle(tensors, mid, params.layers[1], True)
        np.testing.assert_allclose(got, want, rtol=1e-5, atol=1e-12)


def test_single_in_neighbor_copies_features() -> None:
    # With identity weights, no self-loop, zero bias, a node with exactly
    # one in-neighbor receives that neighbor's (rectified) features.
    tensors = GraphTensors(src=np.array([0]), rel=np.array([0]), dst=np.array([1]), num_nodes=3)
    feats = np.array([[2.0, -1.5], [9.0, 9.0], [4.0, 4.0]])
    out = rgcn_layer(tensors, feats, identity_layer(1, 2), self_loop=False)
    np.testing.assert_array_equal(out[0], [0.0, 0.0])  # no incoming edges
    np.testing.assert_array_equal(out[1], [2.0, 0.0])  # relu of row 0
    np.testing.assert_array_equal(out[2], [0.0, 0.0])


def test_same_relation_neighbors_are_averaged() -> None:
    tensors = GraphTensors(src=np.array([0, 1]), rel=np.array([0, 0]), dst=np.array([2, 2]), num_nodes=3)
    feats = np.array([[4.0], [8.0], [0.0]])
    out = rgcn_layer(tensors, feats, identity_layer(1, 1), self_loop=False)
    assert out[2, 0] == pytest.approx(6.0)  # mean of 4 and 8, not their sum


def test_distinct_relations_are_summed_after_averaging() -> None:
    tensors = GraphTensors(src=np.array([0, 1]), rel=np.array([0, 1]), dst=np.array([2, 2]), num_nodes=3)
    feats = np.array([[4.0], [8.0], [0.0]])
    out = rgcn_layer(tensors, feats, identity_layer(2, 1), self_loop=False)
    assert out[2, 0] == pytest.approx(12.0)  # one neighbor per relation


def test_isolated_nodes_stay_finite() -> None:
    tensors = GraphTensors(src=np.array([], dtype=np.int64), rel=np.array([], dtype=np.int64),
                           dst=np.array([], dtype=np.int64), num_nodes=4)
    params = random_params(3, [6, 5], 4, self_loop=False)
    out = rgcn_layer(tensors, np.ones((4, 6)), params.layers[0], self_loop=False)
    assert np.isfinite(out).all()
    # Every row reduces to relu(bias): no neighborhood term, no self term.
    want_row = np.maximum(params.layers[0].bias.astype(np.float64), 0.0)
    np.testing.assert_allclose(out, np.broadcast_to(want_row, out.shape))


def test_forward_output_is_rectified() -> None:
    rng = np.random.default_rng(11)
    tensors = random_tensors(rng, 20, 60, 4)
    params = random_params(5, [6, 6, 6], 4)
    out = forward(tensors, rng.standard_normal((20, 6)), params)
    assert (out >= 0.0).all()


def test_layer_rows_permute_with_the_nodes() -> None:
    rng = np.random.default_rng(13)
    n = 17
    tensors = random_tensors(rng, n, 40, 3)
    params = random_params(9, [4, 5], 3)
    feats = rng.standard_normal((n, 4))
    base = rgcn_layer(tensors, feats, params.layers[0], self_loop=True)
    perm = rng.permutation(n)
    permuted = GraphTensors(src=perm[tensors.src], rel=tensors.rel, dst=perm[tensors.dst], num_nodes=n)
    out = rgcn_layer(permuted, feats[np.argsort(perm)], params.layers[0], self_loop=True)
    np.testing.assert_allclose(out[perm], base, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("pooling", ["mean", "attention"])
def test_final_logit_invariant_under_relabeling(pooling: str) -> None:
    rng = np.random.default_rng(23)
    n = 24
    tensors = random_tensors(rng, n, 70, 4)
    params = random_params(17, [6, 5], 4, pooling=pooling, text_dim=9)
    feats = rng.standard_normal((n, 6))
    text = rng.standard_normal(9)
    base = score(text, pool(forward(tensors, feats, params), params), params.head)
    for trial in range(5):
        perm = rng.permutation(n)
        permuted = GraphTensors(src=perm[tensors.src], rel=tensors.rel, dst=perm[tensors.dst], num_nodes=n)
        logit = score(text, pool(forward(permuted, feats[np.argsort(perm)], params), params), params.head)
        assert logit == pytest.approx(base, rel=1e-9, abs=1e-12)


def test_one_hot_basis_reproduces_full_weights() -> None:
    rng = np.random.default_rng(31)
    n_rel, d_out, d_in = 5, 4, 3
    full = random_params(2, [d_in, d_out], n_rel)
    basis_layer = RgcnLayer(
        weights=None,
        bases=full.layers[0].weights.copy(),
        coeffs=np.eye(n_rel, dtype=np.float32),
        self_weight=full.layers[0].self_weight,
        bias=full.layers[0].bias,
    )
    np.testing.assert_array_equal(
        basis_layer.relation_weights(), full.layers[0].relation_weights()
    )
    tensors = random_tensors(rng, 12, 30, n_rel)
    feats = rng.standard_normal((12, d_in))
    np.testing.assert_array_equal(
        rgcn_layer(tensors, feats, basis_layer, self_loop=True),
        rgcn_layer(tensors, feats, full.layers[0], self_loop=True),
    )


def test_basis_params_run_end_to_end() -> None:
    rng = np.random.default_rng(37)
    tensors = random_tensors(rng, 15, 40, 4)
    params = random_params(8, [6, 5], 4, num_bases=2, pooling="attention")
    result = score_choices(
        [(rng.standard_normal(5), tensors, rng.standard_normal((15, 6))) for _ in range(2)],
        params,
    )
    assert np.isfinite(result.logits).all()


# ----------------------------------------------------------------- pooling


def test_mean_pool_matches_manual_mean() -> None:
    params = random_params(4, [3, 3], 2, pooling="mean")
    h = np.array([[1.0, 2.0, 3.0], [3.0, 4.0, 5.0]])
    pooled = pool(h, params)
    np.testing.assert_allclose(pooled.vector, [2.0, 3.0, 4.0])
    assert pooled.weights is None


def test_attention_weights_form_a_distribution() -> None:
    rng = np.random.default_rng(41)
    params = random_params(6, [4, 4], 2, pooling="attention")
    h = rng.standard_normal((9, 4))
    pooled = pool(h, params)
    assert pooled.weights.shape == (9,)
    assert (pooled.weights >= 0.0).all()
    assert abs(pooled.weights.sum() - 1.0) <= 1e-6
    np.testing.assert_allclose(pooled.vector, pooled.weights @ h)


def test_attention_uniform_on_identical_rows() -> None:
    params = random_params(6, [4, 4], 2, pooling="attention")
    pooled = pool(np.ones((5, 4)), params)
    np.testing.assert_allclose(pooled.weights, np.full(5, 0.2))


def test_attention_single_node_gets_weight_one() -> None:
    params = random_params(6, [4, 4], 2, pooling="attention")
    pooled = pool(np.array([[1.0, -2.0, 0.5, 3.0]]), params)
    np.testing.assert_allclose(pooled.weights, [1.0])


@pytest.mark.parametrize("pooling", ["mean", "attention"])
def test_empty_graph_pools_to_zero_vector(pooling: str) -> None:
    params = random_params(6, [4, 4], 2, pooling=pooling)
    empty = GraphTensors(src=np.array([], dtype=np.int64), rel=np.array([], dtype=np.int64),
                         dst=np.array([], dtype=np.int64), num_nodes=0)
    h = forward(empty, np.zeros((0, 4)), params)
    assert h.shape == (0, 4)
    pooled = pool(h, params)
    np.testing.assert_array_equal(pooled.vector, np.zeros(4))


def test_empty_graph_degrades_to_text_only_score() -> None:
    # With a zero pooled vector the logit is exactly MLP(s).
    params = random_params(19, [4, 4], 2)
    s = np.array([0.3, -1.2, 0.7, 2.0])
    x = s.copy()
    layers = params.head.mlp
    for k, (w, b) in enumerate(layers):
        x = w.astype(np.float64) @ x + b.astype(np.float64)
        if k != len(layers) - 1:
            x = np.maximum(x, 0.0)
    want = float(x[0])
    got = score(s, PooledGraph(vector=np.zeros(4), weights=None), params.head)
    assert got == pytest.approx(want, rel=1e-12)


# ---------------------------------------------------------- score fusion


def test_score_applies_projection_when_dims_differ() -> None:
    head = ScoreHead(
        projection=np.array([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]], dtype=np.float32),
        mlp=((np.array([[1.0, 1.0]], dtype=np.float32), np.array([0.5], dtype=np.float32)),),
    )
    pooled = PooledGraph(vector=np.array([3.0, 4.0, 99.0]), weights=None)
    # projected g = (3, 8); s + g = (4, 9); logit = 4 + 9 + 0.5
    assert score(np.array([1.0, 1.0]), pooled, head) == pytest.approx(13.5)


def test_score_rejects_dim_mismatch_without_projection() -> None:
    head = ScoreHead(projection=None,
                     mlp=((np.ones((1, 2), dtype=np.float32), np.zeros(1, dtype=np.float32)),))
    with pytest.raises(DimensionMismatchError):
        score(np.ones(2), PooledGraph(vector=np.ones(3), weights=None), head)


def test_score_choices_softmax_and_argmax() -> None:
    rng = np.random.default_rng(53)
    params = random_params(29, [5, 4], 3, pooling="attention")
    tensors = random_tensors(rng, 10, 25, 3)
    choices = [(rng.standard_normal(4), tensors, rng.standard_normal((10, 5))) for _ in range(3)]
    result = score_choices(choices, params)
    assert isinstance(result, ChoiceScores)
    shifted = result.logits - result.logits.max()
    want = np.exp(shifted) / np.exp(shifted).sum()
    np.testing.assert_allclose(result.probabilities, want, rtol=1e-12)
    assert result.probabilities.sum() == pytest.approx(1.0, abs=1e-9)
    assert result.argmax == int(np.argmax(result.logits))
    assert len(result.attention) == 3
    for weights in result.attention:
        assert weights.sum() == pytest.approx(1.0, abs=1e-6)


def test_identical_choices_score_uniformly() -> None:
    rng = np.random.default_rng(59)
    params = random_params(3, [4, 4], 2)
    tensors = random_tensors(rng, 6, 12, 2)
    s = rng.standard_normal(4)
    feats = rng.standard_normal((6, 4))
    result = score_choices([(s, tensors, feats), (s, tensors, feats)], params)
    np.testing.assert_allclose(result.probabilities, [0.5, 0.5], atol=1e-12)


def test_score_choices_requires_two_choices() -> None:
    rng = np.random.default_rng(61)
    params = random_params(3, [4, 4], 2)
    tensors = random_tensors(rng, 3, 4, 2)
    with pytest.raises(FormatError):
        score_choices([(np.zeros(4), tensors, np.zeros((3, 4)))], params)


# ----------------------------------------------------- joint graph tensors


def joint_fixture() -> JointSubgraph:
    return JointSubgraph(
        context_nodes=(JointNode("ctx:0", "a"), JointNode("ctx:1", "b")),
        kg_nodes=(JointNode("kg:4", "c"),),
        edges=(
            JointEdge("ctx:0", "ctx:1", "context"),
            JointEdge("ctx:0", "kg:4", "grounding"),
        ),
    )


def test_joint_tensors_double_every_edge_with_inverses() -> None:
    vocab = ["Precedence", "grounding", "context"]
    tensors = joint_tensors(joint_fixture(), vocab)
    assert tensors.num_nodes == 3
    triples = sorted(zip(tensors.src.tolist(), tensors.rel.tolist(), tensors.dst.tolist()))
    # Forward: ctx:0->ctx:1 rel 2, ctx:0->kg:4 rel 1; inverses use rel + 3.
    assert triples == sorted([(0, 2, 1), (1, 2 + 3, 0), (0, 1, 2), (2, 1 + 3, 0)])


def test_joint_tensors_reject_unknown_relation() -> None:
    with pytest.raises(UnknownRelationError):
        joint_tensors(joint_fixture(), ["Precedence"])


def test_relation_vocabulary_appends_joint_relations() -> None:
    store = build_store(
        nodes=[(0, "a", 1), (1, "b", 1)],
        edges=[(0, "Precedence", 1, 1.0), (1, "Reason", 0, 1.0)],
    )
    assert relation_vocabulary(store) == ["Precedence", "Reason", "grounding", "context"]


# ------------------------------------------------------------ parameter I/O


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(num_bases=-1, self_loop=True, pooling="mean"),
        dict(num_bases=2, self_loop=False, pooling="attention"),
        dict(num_bases=-1, self_loop=True, pooling="attention", text_dim=11),
    ],
)
def test_params_blob_round_trip(kwargs: dict) -> None:
    params = random_params(71, [6, 5, 4], 8, mlp_hidden=(7,), **kwargs)
    blob = params_blob(params)
    back = parse_params(blob)
    assert params_blob(back) == blob
    assert back.dims == params.dims
    assert back.num_relations == params.num_relations
    assert back.num_bases == params.num_bases
    assert back.self_loop == params.self_loop
    assert back.pooling == params.pooling


def test_params_round_trip_preserves_scores(tmp_path) -> None:
    rng = np.random.default_rng(73)
    params = random_params(79, [5, 4], 4, pooling="attention", text_dim=6)
    path = str(tmp_path / "weights.evgw")
    save_params(params, path)
    back = load_params(path)
    tensors = random_tensors(rng, 8, 20, 4)
    feats = rng.standard_normal((8, 5))
    s = rng.standard_normal(6)
    a = score(s, pool(forward(tensors, feats, params), params), params.head)
    b = score(s, pool(forward(tensors, feats, back), back), back.head)
    assert a == b


def test_params_reject_bad_magic() -> None:
    with pytest.raises(FormatError, match="magic"):
        parse_params(b"NOPE" + b"\x00" * 64)


def test_params_reject_bad_version() -> None:
    blob = bytearray(params_blob(random_params(1, [3, 3], 2)))
    blob[4] = 9
    with pytest.raises(FormatError, match="version"):
        parse_params(bytes(blob))


def test_params_reject_truncation_and_trailing() -> None:
    blob = params_blob(random_params(1, [3, 3], 2))
    with pytest.raises(FormatError, match="truncated"):
        parse_params(blob[: len(blob) - 3])
    with pytest.raises(FormatError, match="trailing"):
        parse_params(blob + b"\x00\x00\x00\x00")


def test_params_validation_rejects_zero_bases() -> None:
    good = random_params(1, [3, 3], 2)
    bad = RgcnParams(
        layers=good.layers,
        num_relations=good.num_relations,
        num_bases=0,
        self_loop=good.self_loop,
        pooling=good.pooling,
        attention=None,
        head=good.head,
    )
    with pytest.raises(FormatError, match="num_bases"):
        bad.validate()


def test_params_validation_rejects_missing_projection() -> None:
    good = random_params(1, [3, 3], 2)
    bad_head = ScoreHead(
        projection=None,
        mlp=((np.ones((1, 5), dtype=np.float32), np.zeros(1, dtype=np.float32)),),
    )
    bad = RgcnParams(
        layers=good.layers,
        num_relations=good.num_relations,
        num_bases=good.num_bases,
        self_loop=good.self_loop,
        pooling=good.pooling,
        attention=None,
        head=bad_head,
    )
    with pytest.raises(FormatError, match="projection"):
        bad.validate()


# ---------------------------------------------------------------- guards


def test_layer_rejects_unknown_relation_id() -> None:
    params = random_params(1, [3, 3], 2)
    tensors = GraphTensors(src=np.array([0]), rel=np.array([7]), dst=np.array([1]), num_nodes=2)
    with pytest.raises(UnknownRelationError):
        rgcn_layer(tensors, np.zeros((2, 3)), params.layers[0], self_loop=True)


def test_layer_rejects_feature_dim_mismatch() -> None:
    params = random_params(1, [3, 3], 2)
    tensors = GraphTensors(src=np.array([0]), rel=np.array([0]), dst=np.array([1]), num_nodes=2)
    with pytest.raises(DimensionMismatchError):
        rgcn_layer(tensors, np.zeros((2, 5)), params.layers[0], self_loop=True)
    with pytest.raises(DimensionMismatchError):
        rgcn_layer(tensors, np.zeros((4, 3)), params.layers[0], self_loop=True)
