"""Skip-gram-with-negative-sampling embeddings over walk corpora.

Every (center, context) pair inside the window is one SGD step: pull the
context output vector toward the center input vector, push k sampled
negatives away. Negatives come from an alias table over per-node visit
counts raised to `power`. The learning rate decays linearly over all
epochs down to `min_lr`.

With workers == 1 updates run in canonical order (walks ascending,
positions left to right, context offsets ascending) and the result is
deterministic for a given backend. workers > 1 uses the compiled backend's
lock-free parallel loop, which is fast but not run-to-run reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .kernels import get_kernels
from .walks import AliasTable, WalkCorpus, build_alias


@dataclass(frozen=True)
class SgnsParams:
    dim: int = 128
    window: int = 10
    negatives: int = 5
    lr: float = 0.025
    min_lr: float = 1e-4
    epochs: int = 5
    power: float = 0.75
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("embedder.dim: must be >= 1")
        if self.window < 1:
            raise ValueError("embedder.window: must be >= 1")
        if self.negatives < 0:
            raise ValueError("embedder.negatives: must be >= 0")
        if self.lr <= 0:
            raise ValueError("embedder.lr: must be > 0")
        if self.min_lr < 0 or self.min_lr > self.lr:
            raise ValueError("embedder.min_lr: must be in [0, lr]")
        if self.epochs < 1:
            raise ValueError("embedder.epochs: must be >= 1")
        if self.power < 0:
            raise ValueError("embedder.power: must be >= 0")
        if self.workers < 1:
            raise ValueError("embedder.workers: must be >= 1")


@dataclass
class NodeEmbeddings:
    """Input/output vector pairs per node index; `vectors` (the input side)
    is what downstream classifiers consume."""

    input_vectors: np.ndarray  # float64 (n, dim)
    output_vectors: np.ndarray  # float64 (n, dim)
    epoch_losses: np.ndarray  # float64 (epochs,)

    @property
    def vectors(self) -> np.ndarray:
        return self.input_vectors

    @property
    def dim(self) -> int:
        return int(self.input_vectors.shape[1])


def unigram_table(counts: np.ndarray, power: float = 0.75) -> AliasTable:
    """Alias table over counts**power; zero-count entries are never drawn."""
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim != 1 or counts.shape[0] == 0:
        raise ValueError("counts must be a non-empty 1-D array")
    if (counts < 0).any():
        raise ValueError("counts must be non-negative")
    return build_alias(np.power(counts, power))


def pair_counts(lengths: np.ndarray, window: int) -> np.ndarray:
    """Cumulative (center, context) pair counts per walk, length W+1.

    Entry w is the number of pairs in walks [0, w); the last entry is the
    corpus total. Shared by all backends so the lr schedule never depends
    on execution order.
    """
    out = np.zeros(lengths.shape[0] + 1, dtype=np.int64)
    per_len: dict[int, int] = {}
    for w, length in enumerate(np.asarray(lengths, dtype=np.int64)):
        length = int(length)
        cnt = per_len.get(length)
        if cnt is None:
            i = np.arange(length)
            cnt = int((np.minimum(i + window, length - 1) - np.maximum(i - window, 0)).sum())
            per_len[length] = cnt
        out[w + 1] = out[w] + cnt
    return out


def init_embeddings(n: int, dim: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Input side uniform in [-0.5/dim, 0.5/dim), output side zeros."""
    u = rng.stream_uniforms(rng.derive_stream(seed, 0x1817, 0), n * dim)
    emb_in = ((u - 0.5) / dim).reshape(n, dim)
    return emb_in, np.zeros((n, dim), dtype=np.float64)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sgns_loss(center_vec: np.ndarray, context_vec: np.ndarray,
              negative_vecs: np.ndarray) -> float:
    """-log sigma(ctx . v) - sum_neg log sigma(-neg . v), overflow safe."""
    loss = float(np.logaddexp(0.0, -float(context_vec @ center_vec)))
    negative_vecs = np.atleast_2d(np.asarray(negative_vecs, dtype=np.float64))
    if negative_vecs.size:
        loss += float(np.logaddexp(0.0, negative_vecs @ center_vec).sum())
    return loss


def sgns_step(emb_in: np.ndarray, emb_out: np.ndarray, center: int,
              context: int, negatives: np.ndarray, lr: float) -> float:
    """One pair update in place; returns the pair's loss.

    The full gradient is evaluated at the pre-update vectors, then applied.
    Duplicate negative indices accumulate. Callers are expected to have
    dropped negatives equal to `context`.
    """
    idxs = np.concatenate(([context], np.asarray(negatives, dtype=np.int64)))
    v = emb_in[center]
    U = emb_out[idxs].copy()
    dots = U @ v
    loss = float(np.logaddexp(0.0, -dots[0]))
    if idxs.shape[0] > 1:
        loss += float(np.logaddexp(0.0, dots[1:]).sum())
    coef = _sigmoid(dots)
    coef[0] -= 1.0
    grad_v = coef @ U
    np.subtract.at(emb_out, idxs, np.outer(coef, lr * v))
    v -= lr * grad_v
    return loss


def train_embeddings(corpus: WalkCorpus, params: SgnsParams,
                     backend: str | None = None) -> NodeEmbeddings:
    """Train node vectors on a walk corpus; deterministic iff workers == 1."""
    kern = get_kernels(backend)
    counts = corpus.node_counts()
    table = unigram_table(counts, params.power)
    pair_base = pair_counts(corpus.lengths, params.window)
    emb_in, emb_out = init_embeddings(corpus.n_nodes, params.dim, params.seed)
    losses = kern.sgns_kernel(
        corpus.walks,
        corpus.lengths,
        pair_base,
        emb_in,
        emb_out,
        table.prob,
        table.alias,
        params.window,
        params.negatives,
        params.lr,
        params.min_lr,
        params.epochs,
        params.seed,
        params.workers,
    )
    losses = np.asarray(losses)
    if not np.isfinite(losses).all():
        bad = int(np.flatnonzero(~np.isfinite(losses))[0])
        raise RuntimeError(
            f"embedding training diverged: non-finite loss at epoch {bad} "
            f"(lr={params.lr}, window={params.window}, negatives={params.negatives})"
        )
    return NodeEmbeddings(input_vectors=emb_in, output_vectors=emb_out,
                          epoch_losses=losses)
