"""Few-shot cross-target splits.

Train = every source-target post plus n label-stratified shots from the
destination shot pool. Test = a fixed destination partition drawn at the
user level (a user's posts land entirely in test or entirely in the
pool), so shot users and test users never overlap and a classifier cannot
score by memorizing users seen at train time. The partition depends only
on partition_seed; shot sampling depends on the run seed, so shot sweeps
and seed averages share one test set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .data import PostTable

_TAG_PART = 0x50
_TAG_SHOT = 0x51

DEFAULT_PARTITION_SEED = 7
DEFAULT_HOLDOUT_FRAC = 0.5


def largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    """Integer allocation of `total` proportional to weights; exact sum.

    Largest fractional remainders win the leftover units, earlier index
    first on ties.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 1 or weights.shape[0] == 0:
        raise ValueError("weights must be a non-empty 1-D array")
    if (weights < 0).any() or weights.sum() == 0:
        raise ValueError("weights must be non-negative with a positive sum")
    if total < 0:
        raise ValueError("total must be >= 0")
    quota = weights * (total / weights.sum())
    base = np.floor(quota).astype(np.int64)
    left = total - int(base.sum())
    if left:
        frac = quota - base
        order = np.lexsort((np.arange(weights.shape[0]), -frac))
        base[order[:left]] += 1
    return base


def user_holdout(user_ids: list[str], frac: float, seed: int) -> np.ndarray:
    """Boolean held-out mask over posts, assigned user by user.

    Users are visited in a seed-derived order and taken whole until the
    held-out side reaches `frac` of the posts.
    """
    if not 0.0 < frac < 1.0:
        raise ValueError("holdout frac must be in (0, 1)")
    users = sorted(set(user_ids))
    order = np.argsort(rng.stream_uniforms(rng.derive_stream(seed, _TAG_PART, 0),
                                           len(users)), kind="stable")
    counts: dict[str, int] = {}
    for u in user_ids:
        counts[u] = counts.get(u, 0) + 1
    goal = round(frac * len(user_ids))
    held: set[str] = set()
    got = 0
    for pos in order:
        if got >= goal:
            break
        u = users[pos]
        held.add(u)
        got += counts[u]
    return np.array([u in held for u in user_ids], dtype=bool)


def stratified_shots(labels: np.ndarray, n_shots: int, seed: int) -> np.ndarray:
    """Positions of n_shots examples, label-stratified to the pool's mix
    by largest-remainder, sampled without replacement per class."""
    labels = np.asarray(labels, dtype=np.int64)
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    if n_shots > labels.shape[0]:
        raise ValueError(f"n_shots={n_shots} exceeds pool size {labels.shape[0]}")
    counts = np.bincount(labels, minlength=2)
    alloc = largest_remainder(counts.astype(np.float64), n_shots)
    picked = []
    for c in (0, 1):
        if alloc[c] == 0:
            continue
        pos = np.flatnonzero(labels == c)
        order = np.argsort(rng.stream_uniforms(rng.derive_stream(seed, _TAG_SHOT, c),
                                               pos.shape[0]), kind="stable")
        picked.append(pos[order[:alloc[c]]])
    out = np.concatenate(picked) if picked else np.empty(0, dtype=np.int64)
    return np.sort(out)


@dataclass(frozen=True)
class FewShotSplit:
    source: str
    dest: str
    n_shots: int
    seed: int
    partition_seed: int
    train_idx: np.ndarray  # source posts then shots, post-table indices
    shot_idx: np.ndarray
    pool_idx: np.ndarray  # destination posts available as shots
    test_idx: np.ndarray  # fixed destination held-out posts


def make_split(posts: PostTable, source: str, dest: str, n_shots: int,
               seed: int, partition_seed: int = DEFAULT_PARTITION_SEED,
               holdout_frac: float = DEFAULT_HOLDOUT_FRAC) -> FewShotSplit:
    if source == dest:
        raise ValueError("source and destination targets must differ")
    src_idx = posts.indices_for_target(source)
    dest_idx = posts.indices_for_target(dest)
    if src_idx.size == 0:
        raise ValueError(f"no posts for source target {source!r}")
    if dest_idx.size == 0:
        raise ValueError(f"no posts for destination target {dest!r}")
    dest_users = [posts.user_ids[i] for i in dest_idx]
    held = user_holdout(dest_users, holdout_frac, partition_seed)
    test_idx = dest_idx[held]
    pool_idx = dest_idx[~held]
    if test_idx.size == 0 or pool_idx.size == 0:
        raise ValueError(
            f"destination {dest!r} partition degenerate: "
            f"{test_idx.size} test / {pool_idx.size} pool posts")
    sel = stratified_shots(posts.stances[pool_idx], n_shots, seed)
    shot_idx = pool_idx[sel]
    return FewShotSplit(
        source=source, dest=dest, n_shots=n_shots, seed=seed,
        partition_seed=partition_seed,
        train_idx=np.concatenate((src_idx, shot_idx)),
        shot_idx=shot_idx, pool_idx=pool_idx, test_idx=test_idx)


def check_split(split: FewShotSplit, posts: PostTable) -> None:
    """Raise AssertionError when any soundness invariant fails."""
    train = set(split.train_idx.tolist())
    test = set(split.test_idx.tolist())
    assert not train & test, "train and test overlap"
    src = set(posts.indices_for_target(split.source).tolist())
    assert src <= train, "missing source posts in train"
    assert set(split.shot_idx.tolist()) == train - src, "train != source + shots"
    assert set(split.shot_idx.tolist()) <= set(split.pool_idx.tolist()), "shot outside pool"
    assert split.shot_idx.shape[0] == split.n_shots, "wrong shot count"
    for i in split.test_idx:
        assert posts.targets[i] == split.dest, "test post off destination target"
    shot_users = {posts.user_ids[i] for i in split.shot_idx}
    pool_users = {posts.user_ids[i] for i in split.pool_idx}
    test_users = {posts.user_ids[i] for i in split.test_idx}
    assert not shot_users & test_users, "shot and test users overlap"
    assert not pool_users & test_users, "pool and test users overlap"
    # stratification: shot mix within one unit of the pool mix allocation
    pool_counts = np.bincount(posts.stances[split.pool_idx], minlength=2)
    want = largest_remainder(pool_counts.astype(np.float64), split.n_shots)
    got = np.bincount(posts.stances[split.shot_idx], minlength=2)
    assert np.array_equal(want, got), f"shot stratification off: {got} vs {want}"
