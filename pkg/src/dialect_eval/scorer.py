"""Desk-scale dialect classifier head over precomputed embedding frames.

The upstream acoustic encoder is out of scope; utterances arrive as
T x D matrices of embedding frames. A pooling step (average, maximum,
or attentional with the query taken from average pooling) collapses the
frames to one vector, which a small fully-connected head with Swish
hidden activations and a sigmoid output maps to a dialect score in
(0, 1): 1 leans AAE, 0 leans non-AAE.

Training is full-batch gradient descent on binary cross-entropy with
hand-written backpropagation. When the pooling method is attentional,
its key/value projections are classifier parameters and are trained
together with the head; the (absent) encoder is the only frozen part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NonFiniteLoss,
    SingleClassDataset,
)

AVERAGE = "average"
MAXIMUM = "maximum"
ATTENTIONAL = "attentional"


def sigmoid(x):
    """Numerically stable logistic function, scalar or ndarray."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def swish(x):
    """x * sigmoid(x); scalar in, scalar out (ndarray passes through)."""
    return x * sigmoid(x)


def _swish_grad(x: np.ndarray) -> np.ndarray:
    s = sigmoid(x)
    return s * (1.0 + x * (1.0 - s))


@dataclass
class AttentionPooling:
    """Single-head attention pooling with the query from average pooling.

    pooled = softmax(q @ K.T / sqrt(D)) @ V with K = frames @ w_key and
    V = frames @ w_value; both projections are D x D.
    """

    w_key: np.ndarray
    w_value: np.ndarray

    @classmethod
    def initialize(cls, dim: int, rng: np.random.Generator) -> "AttentionPooling":
        bound = 1.0 / math.sqrt(dim)
        return cls(
            w_key=rng.uniform(-bound, bound, size=(dim, dim)),
            w_value=rng.uniform(-bound, bound, size=(dim, dim)),
        )

    def copy(self) -> "AttentionPooling":
        return AttentionPooling(self.w_key.copy(), self.w_value.copy())


PoolingMethod = str | AttentionPooling


@dataclass
class ScorerHead:
    """Fully-connected layers; Swish hiddens, scalar sigmoid output."""

    layers: list[tuple[np.ndarray, np.ndarray]]  # (weight out x in, bias out)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def input_dim(self) -> int:
        return self.layers[0][0].shape[1]

    def copy(self) -> "ScorerHead":
        return ScorerHead([(w.copy(), b.copy()) for w, b in self.layers])


def init_head(
    dim: int, depth: int = 2, hidden: int | None = None, rng: np.random.Generator | None = None
) -> ScorerHead:
    """Seeded uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) initialization."""
    if depth < 1:
        raise ValueError("head depth must be >= 1")
    if rng is None:
        rng = np.random.default_rng(0)
    hidden = dim if hidden is None else hidden
    layers = []
    fan_in = dim
    for i in range(depth):
        fan_out = 1 if i == depth - 1 else hidden
        bound = 1.0 / math.sqrt(fan_in)
        w = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        b = rng.uniform(-bound, bound, size=fan_out)
        layers.append((w, b))
        fan_in = fan_out
    return ScorerHead(layers)


def _check_frames(frames: np.ndarray) -> np.ndarray:
    frames = np.asarray(frames, dtype=float)
    if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
        raise DimensionMismatch(f"frames must be T x D with T >= 1, got {frames.shape}")
    if not np.all(np.isfinite(frames)):
        raise DimensionMismatch("frames contain non-finite values")
    return frames


def pool(frames: np.ndarray, method: PoolingMethod) -> np.ndarray:
    """Collapse T x D frames to one D vector."""
    frames = _check_frames(frames)
    if isinstance(method, AttentionPooling):
        pooled, _ = _attention_forward(frames, method)
        return pooled
    if method == AVERAGE:
        return frames.mean(axis=0)
    if method == MAXIMUM:
        return frames.max(axis=0)
    raise ValueError(f"unknown pooling method {method!r}")


def _attention_forward(frames: np.ndarray, attn: AttentionPooling):
    dim = frames.shape[1]
    if attn.w_key.shape != (dim, dim) or attn.w_value.shape != (dim, dim):
        raise DimensionMismatch(
            f"attention projections must be {dim} x {dim}, "
            f"got {attn.w_key.shape} and {attn.w_value.shape}"
        )
    query = frames.mean(axis=0)
    keys = frames @ attn.w_key
    values = frames @ attn.w_value
    logits = keys @ query / math.sqrt(dim)
    logits = logits - logits.max()
    weights = np.exp(logits)
    weights /= weights.sum()
    pooled = weights @ values
    return pooled, (frames, query, weights, values)


def _head_logit(pooled: np.ndarray, head: ScorerHead):
    """Forward through the head; returns (logit, per-layer (z, input))."""
    if head.layers[-1][0].shape[0] != 1:
        raise DimensionMismatch("output layer must have a single unit")
    h = pooled
    trace = []
    for idx, (w, b) in enumerate(head.layers):
        if w.shape[1] != h.shape[0]:
            raise DimensionMismatch(
                f"layer {idx} expects {w.shape[1]} inputs, got {h.shape[0]}"
            )
        z = w @ h + b
        trace.append((z, h))
        h = z if idx == head.depth - 1 else swish(z)
    return float(h[0]), trace


def score(frames: np.ndarray, method: PoolingMethod, head: ScorerHead) -> float:
    """Dialect score in (0, 1) for one utterance's embedding frames."""
    logit, _ = _head_logit(pool(frames, method), head)
    return float(sigmoid(logit))


def loss_and_gradients(
    dataset: list[tuple[np.ndarray, int]],
    method: PoolingMethod,
    head: ScorerHead,
):
    """Mean binary cross-entropy and its analytic gradients.

    Returns (loss, head_grads, attn_grads) where head_grads mirrors
    head.layers and attn_grads is (d_w_key, d_w_value) for attentional
    pooling, else None. Gradients cover every trainable parameter,
    including the attention projections.
    """
    if not dataset:
        raise ValueError("dataset is empty")
    count = len(dataset)
    head_grads = [(np.zeros_like(w), np.zeros_like(b)) for w, b in head.layers]
    attn = method if isinstance(method, AttentionPooling) else None
    attn_grads = (
        (np.zeros_like(attn.w_key), np.zeros_like(attn.w_value)) if attn else None
    )
    total = 0.0
    for frames, label in dataset:
        frames = _check_frames(frames)
        if attn is not None:
            pooled, ctx = _attention_forward(frames, attn)
        else:
            pooled = pool(frames, method)
            ctx = None
        logit, trace = _head_logit(pooled, head)
        # softplus(z) - y z == binary cross-entropy of sigmoid(z)
        total += float(np.logaddexp(0.0, logit)) - label * logit

        dz = np.array([sigmoid(logit) - label])
        for idx in range(head.depth - 1, -1, -1):
            w, _ = head.layers[idx]
            z, h_in = trace[idx]
            if idx < head.depth - 1:
                dz = dz * _swish_grad(z)
            gw, gb = head_grads[idx]
            gw += np.outer(dz, h_in)
            gb += dz
            dz = w.T @ dz
        if attn is not None:
            d_pooled = dz
            f, query, weights, values = ctx
            d_weights = values @ d_pooled
            d_logits = weights * (d_weights - weights @ d_weights)
            d_keys = np.outer(d_logits, query) / math.sqrt(f.shape[1])
            d_values = np.outer(weights, d_pooled)
            gk, gv = attn_grads
            gk += f.T @ d_keys
            gv += f.T @ d_values

    loss = total / count
    head_grads = [(gw / count, gb / count) for gw, gb in head_grads]
    if attn_grads is not None:
        attn_grads = (attn_grads[0] / count, attn_grads[1] / count)
    return loss, head_grads, attn_grads


@dataclass
class TrainResult:
    head: ScorerHead
    pooling: PoolingMethod
    losses: list[float]  # loss evaluated before each update


def train_head(
    dataset: list[tuple[np.ndarray, int]],
    method: PoolingMethod = AVERAGE,
    depth: int = 2,
    hidden: int | None = None,
    learning_rate: float = 0.5,
    epochs: int = 200,
    seed: int = 0,
) -> TrainResult:
    """Full-batch gradient descent on binary cross-entropy.

    Deterministic given the seed. ``method`` may be a pooling name or
    an AttentionPooling to start from; attention projections are
    trained alongside the head (the caller's object is never mutated).
    Zero epochs returns the seeded initialization unchanged.
    """
    labels = {label for _, label in dataset}
    if not labels <= {0, 1}:
        raise ValueError(f"labels must be 0 or 1, got {sorted(labels)}")
    if len(labels) < 2:
        raise SingleClassDataset("training data must contain both classes")
    dim = _check_frames(dataset[0][0]).shape[1]

    rng = np.random.default_rng(seed)
    if method == ATTENTIONAL:
        method = AttentionPooling.initialize(dim, rng)
    elif isinstance(method, AttentionPooling):
        method = method.copy()
    head = init_head(dim, depth=depth, hidden=hidden, rng=rng)

    losses: list[float] = []
    for _ in range(epochs):
        loss, head_grads, attn_grads = loss_and_gradients(dataset, method, head)
        if not math.isfinite(loss):
            raise NonFiniteLoss(f"training diverged (loss={loss})")
        losses.append(loss)
        for (w, b), (gw, gb) in zip(head.layers, head_grads):
            w -= learning_rate * gw
            b -= learning_rate * gb
        if attn_grads is not None:
            method.w_key -= learning_rate * attn_grads[0]
            method.w_value -= learning_rate * attn_grads[1]
    return TrainResult(head=head, pooling=method, losses=losses)


def training_accuracy(
    dataset: list[tuple[np.ndarray, int]],
    method: PoolingMethod,
    head: ScorerHead,
    threshold: float = 0.5,
) -> float:
    """Fraction classified correctly predicting positive at >= threshold."""
    hits = sum(
        1
        for frames, label in dataset
        if (score(frames, method, head) >= threshold) == bool(label)
    )
    return hits / len(dataset)


# --- serialization -------------------------------------------------------
#
# Versioned flat text format so trained scorers can be reused as
# fixtures and fed to the CLI `score` command:
#
#   dialect-scorer v1
#   pooling average            (or: pooling attentional <dim>)
#   [wk/wv rows for attentional, row-major, repr floats]
#   layers <depth>
#   layer <out> <in>
#   <out lines of <in> weight values>
#   <one line of <out> bias values>

FORMAT_HEADER = "dialect-scorer v1"


def save_scorer(path, head: ScorerHead, method: PoolingMethod) -> None:
    lines = [FORMAT_HEADER]
    if isinstance(method, AttentionPooling):
        dim = method.w_key.shape[0]
        lines.append(f"pooling {ATTENTIONAL} {dim}")
        for mat in (method.w_key, method.w_value):
            for row in mat:
                lines.append(" ".join(repr(v) for v in row))
    elif method in (AVERAGE, MAXIMUM):
        lines.append(f"pooling {method}")
    else:
        raise ValueError(f"unknown pooling method {method!r}")
    lines.append(f"layers {head.depth}")
    for w, b in head.layers:
        lines.append(f"layer {w.shape[0]} {w.shape[1]}")
        for row in w:
            lines.append(" ".join(repr(v) for v in row))
        lines.append(" ".join(repr(v) for v in b))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_scorer(path) -> tuple[ScorerHead, PoolingMethod]:
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    it = iter(lines)

    def next_line() -> str:
        try:
            return next(it)
        except StopIteration:
            raise ValueError(f"{path}: truncated scorer file") from None

    if next_line() != FORMAT_HEADER:
        raise ValueError(f"{path}: not a {FORMAT_HEADER!r} file")
    pooling_parts = next_line().split()
    if not pooling_parts or pooling_parts[0] != "pooling":
        raise ValueError(f"{path}: expected pooling line")
    if pooling_parts[1] == ATTENTIONAL:
        dim = int(pooling_parts[2])
        mats = []
        for _ in range(2):
            rows = [[float(v) for v in next_line().split()] for _ in range(dim)]
            mats.append(np.array(rows))
        method: PoolingMethod = AttentionPooling(*mats)
    else:
        method = pooling_parts[1]
        if method not in (AVERAGE, MAXIMUM):
            raise ValueError(f"{path}: unknown pooling {method!r}")
    layers_parts = next_line().split()
    if layers_parts[0] != "layers":
        raise ValueError(f"{path}: expected layers line")
    layers = []
    for _ in range(int(layers_parts[1])):
        tag, out_dim, in_dim = next_line().split()
        if tag != "layer":
            raise ValueError(f"{path}: expected layer line")
        out_dim, in_dim = int(out_dim), int(in_dim)
        w = np.array([[float(v) for v in next_line().split()] for _ in range(out_dim)])
        b = np.array([float(v) for v in next_line().split()])
        if w.shape != (out_dim, in_dim) or b.shape != (out_dim,):
            raise ValueError(f"{path}: layer dimensions do not match header")
        layers.append((w, b))
    return ScorerHead(layers), method
