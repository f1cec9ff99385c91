"""Second-order biased random walks with return parameter p and in-out
parameter q, sampled through alias tables in O(1) per step.

Walk i of start node s draws from its own counter-based stream, so the corpus
is byte-identical for a given (graph, params) no matter how many workers run
the kernel or which backend (native / pure Python) executes it. With p = q = 1
the bias vanishes and walks reduce to uniform first-order walks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from . import rng
from .graphs import Graph, Interner
from .kernels import get_kernels


@dataclass(frozen=True)
class WalkParams:
    p: float = 1.0
    q: float = 1.0
    walks_per_node: int = 10
    walk_length: int = 80
    seed: int = 0
    # "auto" precomputes all per-edge alias tables when they fit in
    # max_table_entries, otherwise steps through the lazy cached path.
    mode: str = "auto"
    workers: int = 1
    max_table_entries: int = 8_000_000
    lazy_cache_size: int = 100_000

    def __post_init__(self) -> None:
        if self.p <= 0:
            raise ValueError(f"walker.p: must be > 0, got {self.p}")
        if self.q <= 0:
            raise ValueError(f"walker.q: must be > 0, got {self.q}")
        if self.walks_per_node < 1:
            raise ValueError("walker.walks_per_node: must be >= 1")
        if self.walk_length < 2:
            raise ValueError("walker.walk_length: must be >= 2")
        if self.mode not in ("auto", "precompute", "lazy"):
            raise ValueError(f"walker.mode: unknown mode {self.mode!r}")
        if self.workers < 1:
            raise ValueError("walker.workers: must be >= 1")


@dataclass(frozen=True)
class AliasTable:
    """Vose alias table; sampling reproduces the normalized input weights."""

    prob: np.ndarray  # float64, in [0, 1]
    alias: np.ndarray  # int32

    def __len__(self) -> int:
        return int(self.prob.shape[0])

    def exact_distribution(self) -> np.ndarray:
        """The distribution the table actually encodes (for verification)."""
        k = len(self)
        dist = self.prob / k
        np.add.at(dist, self.alias, (1.0 - self.prob) / k)
        return dist


def build_alias(weights: np.ndarray) -> AliasTable:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.shape[0] == 0:
        raise ValueError("alias table needs a non-empty 1-D weight vector")
    if np.any(w < 0):
        raise ValueError("alias table weights must be non-negative")
    total = w.sum()
    if not total > 0:
        raise ValueError("alias table weights must not all be zero")
    k = w.shape[0]
    with np.errstate(over="ignore"):
        ratio = k / total
    # subnormal totals overflow the reciprocal; divide first in that regime
    scaled = w * ratio if np.isfinite(ratio) else (w / total) * k
    prob = np.ones(k, dtype=np.float64)
    alias = np.arange(k, dtype=np.int32)
    small = [i for i in range(k) if scaled[i] < 1.0]
    large = [i for i in range(k) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < 1.0:
            small.append(g)
        else:
            large.append(g)
    # leftovers keep prob 1 / self alias
    return AliasTable(prob=prob, alias=alias)


def alias_draw(table: AliasTable, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """Draw n indices from the table using substream (stream) of seed."""
    k = len(table)
    states = rng.derive_streams(seed, np.full(n, stream, dtype=np.uint64), np.arange(n, dtype=np.uint64))
    u1 = rng.next_uniforms(states)
    u2 = rng.next_uniforms(states)
    idx = np.minimum((u1 * k).astype(np.int64), k - 1)
    take_alias = u2 >= table.prob[idx]
    idx[take_alias] = table.alias[idx[take_alias]]
    return idx.astype(np.int32)


def transition_weights(g: Graph, t: int, v: int, p: float, q: float) -> np.ndarray:
    """Unnormalized second-order weights over neighbors(v) given that the
    walker arrived over edge (t -> v): 1/p for returning to t, 1 for
    neighbors of t, 1/q for everything else."""
    nt = g.neighbors(t)
    loc_v = np.searchsorted(nt, v)
    if loc_v >= nt.shape[0] or nt[loc_v] != v:
        raise ValueError(f"no edge from {t} to {v}")
    nv = g.neighbors(v)
    w = np.full(nv.shape[0], 1.0 / q, dtype=np.float64)
    loc = np.minimum(np.searchsorted(nt, nv), nt.shape[0] - 1)
    w[nt[loc] == nv] = 1.0
    pos = np.searchsorted(nv, t)
    if pos < nv.shape[0] and nv[pos] == t:
        w[pos] = 1.0 / p
    return w


@dataclass(frozen=True)
class TransitionTables:
    """Alias tables for every directed edge (t -> v), concatenated. The table
    for edge id e (position of v in t's adjacency) covers neighbors(v)."""

    pair_offsets: np.ndarray  # int64, len m+1
    prob: np.ndarray  # float64
    alias: np.ndarray  # int32

    @property
    def entries(self) -> int:
        return int(self.prob.shape[0])


def table_entry_count(g: Graph) -> int:
    """Total alias entries a full precompute would allocate: sum over directed
    edges (t -> v) of degree(v)."""
    deg = np.diff(g.offsets)
    return int(deg[g.targets].sum())


def build_transition_tables(g: Graph, p: float, q: float) -> TransitionTables:
    deg = np.diff(g.offsets)
    sizes = deg[g.targets]
    pair_offsets = np.zeros(g.num_directed_edges + 1, dtype=np.int64)
    np.cumsum(sizes, out=pair_offsets[1:])
    prob = np.empty(pair_offsets[-1], dtype=np.float64)
    alias = np.empty(pair_offsets[-1], dtype=np.int32)
    for t in range(g.n):
        for e in range(g.offsets[t], g.offsets[t + 1]):
            v = int(g.targets[e])
            if deg[v] == 0:
                continue  # sink: walks truncate, no table needed
            table = build_alias(transition_weights(g, t, v, p, q))
            prob[pair_offsets[e] : pair_offsets[e + 1]] = table.prob
            alias[pair_offsets[e] : pair_offsets[e + 1]] = table.alias
    return TransitionTables(pair_offsets=pair_offsets, prob=prob, alias=alias)


@dataclass
class WalkCorpus:
    """Fixed-width walk matrix; rows ordered by (start node, walk index) and
    padded with -1 past each walk's length."""

    walks: np.ndarray  # int32 (num_walks, walk_length)
    lengths: np.ndarray  # int32 (num_walks,)
    n_nodes: int

    def __len__(self) -> int:
        return int(self.walks.shape[0])

    def __iter__(self) -> Iterator[np.ndarray]:
        for i in range(len(self)):
            yield self.walks[i, : self.lengths[i]]

    def node_counts(self) -> np.ndarray:
        """Occurrence count per node index over all walks."""
        flat = self.walks.ravel()
        return np.bincount(flat[flat >= 0], minlength=self.n_nodes)


def generate_walks(g: Graph, params: WalkParams, backend: str | None = None) -> WalkCorpus:
    """r walks of up to walk_length nodes from every non-isolated node. A walk
    truncates early only at a node with zero out-neighbors."""
    if g.n == 0:
        raise ValueError("cannot walk an empty graph")
    starts = g.nonisolated()
    mode = params.mode
    if mode == "auto":
        mode = "precompute" if table_entry_count(g) <= params.max_table_entries else "lazy"
    if mode == "lazy":
        walks, lengths = _lazy_walk(g, params, starts)
    else:
        tables = build_transition_tables(g, params.p, params.q)
        kern = get_kernels(backend)
        walks, lengths = kern.walk_kernel(
            g.offsets,
            g.targets,
            tables.pair_offsets,
            tables.prob,
            tables.alias,
            starts,
            params.walks_per_node,
            params.walk_length,
            params.seed,
            params.workers,
        )
    return WalkCorpus(walks=walks, lengths=lengths, n_nodes=g.n)


def _lazy_walk(g: Graph, params: WalkParams, starts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scalar walker building alias tables on demand with a bounded cache.
    Draw-for-draw identical to the kernel path, just lighter on memory."""
    r, l = params.walks_per_node, params.walk_length
    n_walks = starts.shape[0] * r
    walks = np.full((n_walks, l), -1, dtype=np.int32)
    lengths = np.zeros(n_walks, dtype=np.int32)
    cache: dict[int, AliasTable] = {}
    offsets, targets = g.offsets, g.targets

    def table_for(eid: int, t: int, v: int) -> AliasTable:
        table = cache.get(eid)
        if table is None:
            table = build_alias(transition_weights(g, t, v, params.p, params.q))
            if len(cache) >= params.lazy_cache_size:
                cache.pop(next(iter(cache)))
            cache[eid] = table
        return table

    row = 0
    for s in starts.tolist():
        for w in range(r):
            state = rng.derive_stream(params.seed, s, w)
            walks[row, 0] = s
            prev = s
            state, u = rng.next_uniform(state)
            deg = int(offsets[s + 1] - offsets[s])
            cur = int(targets[offsets[s] + min(int(u * deg), deg - 1)])
            walks[row, 1] = cur
            length = 2
            while length < l:
                deg = int(offsets[cur + 1] - offsets[cur])
                if deg == 0:
                    break
                row_start = int(offsets[prev])
                eid = row_start + int(
                    np.searchsorted(targets[row_start : offsets[prev + 1]], cur)
                )
                table = table_for(eid, prev, cur)
                state, u1 = rng.next_uniform(state)
                state, u2 = rng.next_uniform(state)
                j = min(int(u1 * deg), deg - 1)
                if u2 >= table.prob[j]:
                    j = int(table.alias[j])
                prev, cur = cur, int(targets[offsets[cur] + j])
                walks[row, length] = cur
                length += 1
            lengths[row] = length
            row += 1
    return walks, lengths


def save_corpus(corpus: WalkCorpus, interner: Interner, path: str | Path) -> None:
    """One walk per line, space-separated external user ids."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for walk in corpus:
            fh.write(" ".join(interner.id_of(int(v)) for v in walk))
            fh.write("\n")
