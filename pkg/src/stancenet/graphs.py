"""Interned, compressed-sparse adjacency over external user ids.

One graph per relation (followers / friends / likes); all graphs of a bundle
share a single id interner so node indices are comparable across relations.
Graphs are immutable once built and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

RELATIONS = ("followers", "friends", "likes")


class EdgeFileError(ValueError):
    """Malformed edge-list file (message carries path and line number)."""


class Interner:
    """Bijective mapping between external id strings and dense 0-based indices."""

    def __init__(self) -> None:
        self._index: dict[str, int] = {}
        self._ids: list[str] = []

    def intern(self, user_id: str) -> int:
        idx = self._index.get(user_id)
        if idx is None:
            idx = len(self._ids)
            self._index[user_id] = idx
            self._ids.append(user_id)
        return idx

    def lookup(self, user_id: str) -> int | None:
        return self._index.get(user_id)

    def id_of(self, idx: int) -> str:
        return self._ids[idx]

    def ids(self) -> tuple[str, ...]:
        return tuple(self._ids)

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, user_id: str) -> bool:
        return user_id in self._index


@dataclass(frozen=True)
class Graph:
    """CSR adjacency. `offsets` has length n+1, `targets` holds sorted
    neighbor indices per row. Undirected graphs store both directions."""

    relation: str
    offsets: np.ndarray  # int64, len n+1
    targets: np.ndarray  # int32, len m
    n: int
    directed: bool = False

    @property
    def num_directed_edges(self) -> int:
        return int(self.targets.shape[0])

    def neighbors(self, v: int) -> np.ndarray:
        if not 0 <= v < self.n:
            raise IndexError(f"node index {v} out of range for graph with {self.n} nodes")
        return self.targets[self.offsets[v] : self.offsets[v + 1]]

    def degree(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise IndexError(f"node index {v} out of range for graph with {self.n} nodes")
        return int(self.offsets[v + 1] - self.offsets[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.shape[0] and row[i] == v)

    def nonisolated(self) -> np.ndarray:
        """Indices of nodes with at least one outgoing edge, ascending."""
        return np.nonzero(np.diff(self.offsets) > 0)[0].astype(np.int32)


def _normalize_edges(pairs: np.ndarray, undirected: bool) -> np.ndarray:
    """Drop self-loops, optionally mirror, and deduplicate (src, dst) rows."""
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    if undirected and pairs.shape[0]:
        pairs = np.concatenate([pairs, pairs[:, ::-1]], axis=0)
    if pairs.shape[0] == 0:
        return pairs.reshape(0, 2)
    # encode rows into one int64 key for a fast unique
    key = pairs[:, 0].astype(np.int64) << 32 | pairs[:, 1].astype(np.int64)
    key = np.unique(key)
    out = np.empty((key.shape[0], 2), dtype=np.int64)
    out[:, 0] = key >> 32
    out[:, 1] = key & 0xFFFFFFFF
    return out


def build_graph_from_indices(
    pairs: np.ndarray | Sequence[tuple[int, int]],
    n: int,
    relation: str = "followers",
    undirected: bool = True,
) -> Graph:
    """Build a CSR graph from integer index pairs; see `build_graph` for ids."""
    arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise ValueError(f"edge endpoint out of range for n={n}")
    arr = _normalize_edges(arr, undirected)
    order = np.lexsort((arr[:, 1], arr[:, 0]))
    arr = arr[order]
    counts = np.bincount(arr[:, 0], minlength=n)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return Graph(
        relation=relation,
        offsets=offsets,
        targets=np.ascontiguousarray(arr[:, 1], dtype=np.int32),
        n=n,
        directed=not undirected,
    )


def build_graph(
    interner: Interner,
    edges: Iterable[tuple[str, str]],
    relation: str = "followers",
    undirected: bool = True,
    n: int | None = None,
) -> Graph:
    """Intern id pairs and build the adjacency. `n` pins the node count when
    the interner already covers ids beyond this relation's endpoints."""
    idx_pairs = [(interner.intern(s), interner.intern(d)) for s, d in edges]
    return build_graph_from_indices(
        idx_pairs, n if n is not None else len(interner), relation, undirected
    )


def export_edges(g: Graph) -> np.ndarray:
    """Canonical deduplicated edge set: (src, dst) rows sorted ascending; for
    undirected graphs each edge appears once with src < dst."""
    src = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.offsets))
    dst = g.targets.astype(np.int64)
    if not g.directed:
        keep = src < dst
        src, dst = src[keep], dst[keep]
    return np.stack([src, dst], axis=1)


def load_edge_list(path: str | Path) -> list[tuple[str, str]]:
    """Read `src<TAB>dst` lines; `#` comments and blank lines are skipped."""
    edges: list[tuple[str, str]] = []
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise EdgeFileError(f"{path}:{lineno}: expected 'src_id<TAB>dst_id', got {line!r}")
            edges.append((parts[0], parts[1]))
    return edges


def save_edge_list(path: str | Path, edges: Iterable[tuple[str, str]]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for s, d in edges:
            fh.write(f"{s}\t{d}\n")


@dataclass
class GraphBundle:
    """Shared interner plus one graph per relation."""

    interner: Interner
    graphs: dict[str, Graph] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        post_user_ids: Iterable[str],
        edges_by_relation: dict[str, Sequence[tuple[str, str]]],
        undirected: bool = True,
    ) -> "GraphBundle":
        """Intern posting users first (so every poster has an index, possibly
        isolated), then all edge endpoints, then build each relation with the
        final shared node count."""
        interner = Interner()
        for uid in post_user_ids:
            interner.intern(uid)
        for relation in RELATIONS:
            for s, d in edges_by_relation.get(relation, ()):
                interner.intern(s)
                interner.intern(d)
        n = len(interner)
        graphs = {
            relation: build_graph(
                interner, edges_by_relation.get(relation, ()), relation, undirected, n=n
            )
            for relation in RELATIONS
        }
        return cls(interner=interner, graphs=graphs)

    def __iter__(self) -> Iterator[tuple[str, Graph]]:
        return iter(self.graphs.items())
