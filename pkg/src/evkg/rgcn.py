"""Relational graph convolution over joint subgraphs, with pooling and
score fusion.

Per layer, each node averages messages from its in-neighbors separately
per relation (W_r h_j, normalized by 1/|N_r(i)|), optionally adds a
self-loop term, a bias, and a rectifier — applied after every layer,
including the last.  Every relation in the joint graph also gets an
inverse-direction counterpart (id r + R) so information flows both
ways over directed edges.

Pooling is mean or attention (softmax over a learned scoring vector,
weights exposed for interpretability); the pooled vector g is added to
the instance text embedding s — through a projection when dims differ —
and a small MLP turns s + g into a scalar logit.  Multiple-choice
scoring softmaxes per-choice logits.

Parameters load from a little-endian binary file (magic ``EVGW``):
header with layer dims, relation count (inverses included), basis
count, self-loop and pooling flags, and MLP dims; then float32 tensors
in declared order.  Computation runs in float64; storage is float32.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, FormatError, UnknownRelationError
from .kg import KgStore
from .retrieval import CONTEXT_RELATION, GROUNDING_RELATION, JointSubgraph

PARAMS_MAGIC = b"EVGW"
PARAMS_VERSION = 1

POOLING_MODES = ("mean", "attention")


@dataclass(frozen=True)
class GraphTensors:
    """Edge arrays of one joint graph, relations doubled with inverses."""

    src: np.ndarray  # (E,) int64
    rel: np.ndarray  # (E,) int64, in [0, 2R)
    dst: np.ndarray  # (E,) int64
    num_nodes: int


def relation_vocabulary(store: KgStore) -> list[str]:
    """Forward relation names scoring operates over: KG order, then the
    joint-graph relations."""
    return list(store.relations.names) + [GROUNDING_RELATION, CONTEXT_RELATION]


def joint_tensors(graph: JointSubgraph, relation_names: Sequence[str]) -> GraphTensors:
    """Index a joint graph against a relation vocabulary and double edges.

    Each edge (u, r, v) contributes a forward message u → v under r and
    an inverse message v → u under r + R, where R = len(relation_names).
    """
    rel_id = {name: k for k, name in enumerate(relation_names)}
    nodes = graph.nodes
    node_pos = {n.id: k for k, n in enumerate(nodes)}
    n_rel = len(relation_names)
    src, rel, dst = [], [], []
    for e in graph.edges:
        try:
            r = rel_id[e.rel]
        except KeyError:
            raise UnknownRelationError(f"joint edge relation {e.rel!r} not in the relation vocabulary") from None
        u, v = node_pos[e.src], node_pos[e.dst]
        src.append(u)
        rel.append(r)
        dst.append(v)
        src.append(v)
        rel.append(r + n_rel)
        dst.append(u)
    return GraphTensors(
        src=np.asarray(src, dtype=np.int64),
        rel=np.asarray(rel, dtype=np.int64),
        dst=np.asarray(dst, dtype=np.int64),
        num_nodes=len(nodes),
    )


@dataclass(frozen=True)
class RgcnLayer:
    """One layer's tensors; either full per-relation weights or a basis set."""

    weights: np.ndarray | None  # (R, d_out, d_in) when no basis decomposition
    bases: np.ndarray | None  # (B, d_out, d_in)
    coeffs: np.ndarray | None  # (R, B)
    self_weight: np.ndarray | None  # (d_out, d_in)
    bias: np.ndarray  # (d_out,)

    @property
    def d_out(self) -> int:
        return int(self.bias.shape[0])

    @property
    def d_in(self) -> int:
        source = self.weights if self.weights is not None else self.bases
        return int(source.shape[2])

    @property
    def num_relations(self) -> int:
        source = self.weights if self.weights is not None else self.coeffs
        return int(source.shape[0])

    def relation_weights(self) -> np.ndarray:
        """Materialized (R, d_out, d_in) float64 weights."""
        if self.weights is not None:
            return self.weights.astype(np.float64)
        return np.einsum("rb,boi->roi", self.coeffs.astype(np.float64), self.bases.astype(np.float64))


@dataclass(frozen=True)
class ScoreHead:
    projection: np.ndarray | None  # (text_dim, d_L) when graph dim != text dim
    mlp: tuple[tuple[np.ndarray, np.ndarray], ...]  # per layer: (W, b)

    @property
    def text_dim(self) -> int:
        return int(self.mlp[0][0].shape[1])


@dataclass(frozen=True)
class RgcnParams:
    layers: tuple[RgcnLayer, ...]
    num_relations: int  # total, inverse counterparts included
    num_bases: int  # -1 = full per-relation weights
    self_loop: bool
    pooling: str  # "mean" | "attention"
    attention: np.ndarray | None  # (d_L,) for attention pooling
    head: ScoreHead

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.layers[0].d_in,) + tuple(layer.d_out for layer in self.layers)

    def validate(self) -> None:
        if not self.layers:
            raise FormatError("at least one graph layer is required")
        if self.num_bases != -1 and self.num_bases < 1:
            raise FormatError(f"num_bases must be -1 or positive, got {self.num_bases}")
        for k, layer in enumerate(self.layers):
            full = layer.weights is not None
            if full != (self.num_bases == -1) or full == (layer.bases is not None):
                raise FormatError(f"layer {k} storage does not match num_bases={self.num_bases}")
            if layer.num_relations != self.num_relations:
                raise FormatError(f"layer {k} covers {layer.num_relations} relations, expected {self.num_relations}")
            if (layer.self_weight is not None) != self.self_loop:
                raise FormatError(f"layer {k} self-loop tensor does not match the self_loop flag")
            if self.self_loop and layer.self_weight.shape != (layer.d_out, layer.d_in):
                raise FormatError(f"layer {k} self-loop weight has wrong shape")
            if k and layer.d_in != self.layers[k - 1].d_out:
                raise FormatError(f"layer {k} input dim {layer.d_in} breaks the dimension chain")
        if self.pooling not in POOLING_MODES:
            raise FormatError(f"unknown pooling mode {self.pooling!r}")
        if (self.attention is not None) != (self.pooling == "attention"):
            raise FormatError("attention vector must be present exactly for attention pooling")
        d_last = self.layers[-1].d_out
        if self.attention is not None and self.attention.shape != (d_last,):
            raise FormatError("attention vector dim does not match the last layer")
        if not self.head.mlp:
            raise FormatError("score head needs at least one MLP layer")
        if self.head.mlp[-1][0].shape[0] != 1:
            raise FormatError("score head must end in a scalar output")
        expect = self.head.text_dim
        for k, (w, b) in enumerate(self.head.mlp):
            if w.shape[1] != expect or b.shape != (w.shape[0],):
                raise FormatError(f"MLP layer {k} has inconsistent shape")
            expect = w.shape[0]
        text_dim = self.head.text_dim
        if text_dim != d_last:
            if self.head.projection is None:
                raise FormatError(f"text dim {text_dim} != graph dim {d_last} but no projection is configured")
            if self.head.projection.shape != (text_dim, d_last):
                raise FormatError("projection has wrong shape")
        elif self.head.projection is not None:
            raise FormatError("projection configured although text and graph dims already match")


def rgcn_layer(
    tensors: GraphTensors,
    features: np.ndarray,
    layer: RgcnLayer,
    *,
    self_loop: bool,
    activation: bool = True,
) -> np.ndarray:
    """One message-passing step: per-relation mean aggregation + rectifier."""
    h = np.asarray(features, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] != tensors.num_nodes:
        raise DimensionMismatchError(
            f"feature matrix shape {h.shape} does not cover {tensors.num_nodes} nodes"
        )
    if h.shape[1] != layer.d_in:
        raise DimensionMismatchError(f"features have dim {h.shape[1]} but the layer expects {layer.d_in}")
    if tensors.rel.size and int(tensors.rel.max()) >= layer.num_relations:
        raise UnknownRelationError(
            f"edge relation id {int(tensors.rel.max())} outside the {layer.num_relations} known relations"
        )
    n = tensors.num_nodes
    weights = layer.relation_weights()
    out = np.zeros((n, layer.d_out), dtype=np.float64)
    for r in np.unique(tensors.rel):
        mask = tensors.rel == r
        src_r = tensors.src[mask]
        dst_r = tensors.dst[mask]
        messages = h[src_r] @ weights[r].T
        acc = np.zeros((n, layer.d_out), dtype=np.float64)
        np.add.at(acc, dst_r, messages)
        counts = np.bincount(dst_r, minlength=n).astype(np.float64)
        receivers = counts > 0
        out[receivers] += acc[receivers] / counts[receivers, None]
    if self_loop:
        out += h @ layer.self_weight.astype(np.float64).T
    out += layer.bias.astype(np.float64)
    if activation:
        np.maximum(out, 0.0, out=out)
    return out


def forward(tensors: GraphTensors, features: np.ndarray, params: RgcnParams) -> np.ndarray:
    """All layers in sequence; the rectifier fires after every layer."""
    h = np.asarray(features, dtype=np.float64)
    for layer in params.layers:
        h = rgcn_layer(tensors, h, layer, self_loop=params.self_loop)
    return h


@dataclass(frozen=True)
class PooledGraph:
    vector: np.ndarray  # (d_L,)
    weights: np.ndarray | None  # per-node attention weights, or None for mean


def pool(features: np.ndarray, params: RgcnParams) -> PooledGraph:
    h = np.asarray(features, dtype=np.float64)
    d = params.layers[-1].d_out
    if h.shape[0] == 0:
        empty = np.zeros(0, dtype=np.float64) if params.pooling == "attention" else None
        return PooledGraph(vector=np.zeros(d, dtype=np.float64), weights=empty)
    if params.pooling == "mean":
        return PooledGraph(vector=h.mean(axis=0), weights=None)
    scores = h @ params.attention.astype(np.float64)
    scores -= scores.max()
    exp = np.exp(scores)
    weights = exp / exp.sum()
    return PooledGraph(vector=weights @ h, weights=weights)


def score(text_vec: np.ndarray, pooled: PooledGraph, head: ScoreHead) -> float:
    """Scalar logit MLP(s + g), projecting g when graph and text dims differ."""
    s = np.asarray(text_vec, dtype=np.float64).reshape(-1)
    g = pooled.vector
    if head.projection is not None:
        g = head.projection.astype(np.float64) @ g
    if s.shape != g.shape:
        raise DimensionMismatchError(
            f"text dim {s.shape[0]} != pooled dim {g.shape[0]} and no projection is configured"
        )
    x = s + g
    last = len(head.mlp) - 1
    for k, (w, b) in enumerate(head.mlp):
        x = w.astype(np.float64) @ x + b.astype(np.float64)
        if k != last:
            np.maximum(x, 0.0, out=x)
    logit = float(x[0])
    if not np.isfinite(logit):
        raise FormatError("score is not finite")
    return logit


@dataclass(frozen=True)
class ChoiceScores:
    logits: np.ndarray
    probabilities: np.ndarray
    argmax: int
    attention: tuple[np.ndarray | None, ...]  # per-choice node weights


def score_choices(
    choices: Sequence[tuple[np.ndarray, GraphTensors, np.ndarray]],
    params: RgcnParams,
) -> ChoiceScores:
    """Score (text_vec, graph, node features) per choice; softmax the logits."""
    if len(choices) < 2:
        raise FormatError(f"need at least 2 choices to score, got {len(choices)}")
    logits = np.empty(len(choices), dtype=np.float64)
    attention = []
    for k, (text_vec, tensors, features) in enumerate(choices):
        pooled = pool(forward(tensors, features, params), params)
        logits[k] = score(text_vec, pooled, params.head)
        attention.append(pooled.weights)
    shifted = logits - logits.max()
    exp = np.exp(shifted)
    probabilities = exp / exp.sum()
    return ChoiceScores(
        logits=logits,
        probabilities=probabilities,
        argmax=int(np.argmax(logits)),
        attention=tuple(attention),
    )


# ------------------------------------------------------------- parameter I/O


def _pack_tensor(arr: np.ndarray) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f4").tobytes()


def params_blob(params: RgcnParams) -> bytes:
    params.validate()
    dims = params.dims
    mlp_dims = [w.shape[0] for w, _ in params.head.mlp]
    parts = [
        PARAMS_MAGIC,
        struct.pack("<II", PARAMS_VERSION, len(params.layers)),
        struct.pack("<I", dims[0]),
        struct.pack(f"<{len(params.layers)}I", *dims[1:]),
        struct.pack("<Ii", params.num_relations, params.num_bases),
        struct.pack("<BB", int(params.self_loop), POOLING_MODES.index(params.pooling)),
        struct.pack("<I", params.head.text_dim),
        struct.pack("<I", len(mlp_dims)),
        struct.pack(f"<{len(mlp_dims)}I", *mlp_dims),
    ]
    for layer in params.layers:
        if params.num_bases == -1:
            parts.append(_pack_tensor(layer.weights))
        else:
            parts.append(_pack_tensor(layer.bases))
            parts.append(_pack_tensor(layer.coeffs))
        if params.self_loop:
            parts.append(_pack_tensor(layer.self_weight))
        parts.append(_pack_tensor(layer.bias))
    if params.pooling == "attention":
        parts.append(_pack_tensor(params.attention))
    if params.head.projection is not None:
        parts.append(_pack_tensor(params.head.projection))
    for w, b in params.head.mlp:
        parts.append(_pack_tensor(w))
        parts.append(_pack_tensor(b))
    return b"".join(parts)


def parse_params(blob: bytes) -> RgcnParams:
    view = memoryview(blob)
    if len(view) < 4 or bytes(view[:4]) != PARAMS_MAGIC:
        raise FormatError("not a parameter file (bad magic bytes)")
    off = 4

    def unpack(fmt: str):
        nonlocal off
        size = struct.calcsize(fmt)
        if off + size > len(view):
            raise FormatError("truncated parameter file")
        values = struct.unpack_from(fmt, view, off)
        off += size
        return values

    def tensor(shape: tuple[int, ...]) -> np.ndarray:
        nonlocal off
        count = int(np.prod(shape)) if shape else 1
        size = 4 * count
        if off + size > len(view):
            raise FormatError("truncated parameter file")
        arr = np.frombuffer(view, dtype="<f4", count=count, offset=off).astype(np.float32).reshape(shape)
        off += size
        return arr

    version, n_layers = unpack("<II")
    if version != PARAMS_VERSION:
        raise FormatError(f"parameter file version {version} not supported (expected {PARAMS_VERSION})")
    if n_layers < 1:
        raise FormatError("parameter file declares zero layers")
    (d0,) = unpack("<I")
    out_dims = unpack(f"<{n_layers}I")
    num_relations, num_bases = unpack("<Ii")
    self_flag, pool_flag = unpack("<BB")
    if self_flag not in (0, 1):
        raise FormatError("invalid self-loop flag")
    if pool_flag >= len(POOLING_MODES):
        raise FormatError(f"unknown pooling flag {pool_flag}")
    (text_dim,) = unpack("<I")
    (n_mlp,) = unpack("<I")
    if n_mlp < 1:
        raise FormatError("parameter file declares an empty score head")
    mlp_dims = unpack(f"<{n_mlp}I")

    dims = (d0,) + tuple(out_dims)
    self_loop = bool(self_flag)
    pooling = POOLING_MODES[pool_flag]
    layers = []
    for k in range(n_layers):
        d_in, d_out = dims[k], dims[k + 1]
        if num_bases == -1:
            weights, bases, coeffs = tensor((num_relations, d_out, d_in)), None, None
        else:
            weights = None
            bases = tensor((num_bases, d_out, d_in))
            coeffs = tensor((num_relations, num_bases))
        self_weight = tensor((d_out, d_in)) if self_loop else None
        layers.append(RgcnLayer(weights, bases, coeffs, self_weight, tensor((d_out,))))
    attention = tensor((dims[-1],)) if pooling == "attention" else None
    projection = tensor((text_dim, dims[-1])) if text_dim != dims[-1] else None
    mlp = []
    prev = text_dim
    for d_out in mlp_dims:
        mlp.append((tensor((d_out, prev)), tensor((d_out,))))
        prev = d_out
    if off != len(view):
        raise FormatError(f"parameter file has {len(view) - off} trailing bytes")
    params = RgcnParams(
        layers=tuple(layers),
        num_relations=num_relations,
        num_bases=num_bases,
        self_loop=self_loop,
        pooling=pooling,
        attention=attention,
        head=ScoreHead(projection=projection, mlp=tuple(mlp)),
    )
    params.validate()
    return params


def save_params(params: RgcnParams, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(params_blob(params))


def load_params(path: str) -> RgcnParams:
    with open(path, "rb") as fh:
        return parse_params(fh.read())


def random_params(
    seed: int,
    dims: Sequence[int],
    num_relations: int,
    *,
    num_bases: int = -1,
    self_loop: bool = True,
    pooling: str = "mean",
    text_dim: int | None = None,
    mlp_hidden: Sequence[int] = (16,),
) -> RgcnParams:
    """Small random parameters for tests and demos; deterministic per seed."""
    rng = np.random.default_rng(seed)
    scale = 0.3

    def mat(*shape):
        return (rng.standard_normal(shape) * scale).astype(np.float32)

    layers = []
    for k in range(len(dims) - 1):
        d_in, d_out = dims[k], dims[k + 1]
        if num_bases == -1:
            weights, bases, coeffs = mat(num_relations, d_out, d_in), None, None
        else:
            weights = None
            bases = mat(num_bases, d_out, d_in)
            coeffs = mat(num_relations, num_bases)
        layers.append(
            RgcnLayer(weights, bases, coeffs, mat(d_out, d_in) if self_loop else None, mat(d_out))
        )
    d_last = dims[-1]
    text = text_dim if text_dim is not None else d_last
    projection = mat(text, d_last) if text != d_last else None
    mlp = []
    prev = text
    for hidden in list(mlp_hidden) + [1]:
        mlp.append((mat(hidden, prev), mat(hidden)))
        prev = hidden
    params = RgcnParams(
        layers=tuple(layers),
        num_relations=num_relations,
        num_bases=num_bases,
        self_loop=self_loop,
        pooling=pooling,
        attention=mat(d_last) if pooling == "attention" else None,
        head=ScoreHead(projection=projection, mlp=tuple(mlp)),
    )
    params.validate()
    return params
