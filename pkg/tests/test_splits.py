import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stancenet.data import PostTable
from stancenet.splits import (
    check_split, largest_remainder, make_split, stratified_shots, user_holdout,
)
from stancenet.synth import SynthParams, generate


def toy_posts():
    """Three targets, multiple posts per user so the user partition matters."""
    rows = []
    pid = 0
    for t_i, target in enumerate(("trump", "sanders", "biden")):
        for u in range(20):
            uid = f"u{t_i}_{u}"
            for k in range(3):
                rows.append((f"p{pid}", uid, target, (u + k) % 2))
                pid += 1
    return PostTable(
        post_ids=[r[0] for r in rows],
        user_ids=[r[1] for r in rows],
        targets=[r[2] for r in rows],
        stances=np.array([r[3] for r in rows], dtype=np.int64),
        texts=["x"] * len(rows),
    )


def test_largest_remainder_sums_and_rounds():
    w = np.array([1.0, 1.0, 1.0])
    assert largest_remainder(w, 10).tolist() == [4, 3, 3]
    w = np.array([5, 3, 2], dtype=float)
    assert largest_remainder(w, 10).tolist() == [5, 3, 2]
    assert largest_remainder(np.array([1.0]), 7).tolist() == [7]


@given(st.lists(st.floats(0.01, 100), min_size=1, max_size=12), st.integers(0, 500))
@settings(max_examples=300, deadline=None)
def test_largest_remainder_properties(ws, total):
    w = np.array(ws)
    alloc = largest_remainder(w, total)
    assert alloc.sum() == total
    assert (alloc >= 0).all()
    exact = w / w.sum() * total
    assert (np.abs(alloc - exact) < 1.0 + 1e-9).all()


def test_user_holdout_is_user_disjoint():
    users = [f"u{i % 7}" for i in range(35)]
    held = user_holdout(users, 0.5, seed=3)
    held_users = {u for u, h in zip(users, held) if h}
    kept_users = {u for u, h in zip(users, held) if not h}
    assert held_users.isdisjoint(kept_users)
    assert held.sum() > 0 and (~held).sum() > 0


def test_user_holdout_hits_requested_fraction():
    users = [f"u{i}" for i in range(200)]
    held = user_holdout(users, 0.3, seed=1)
    assert held.sum() == 60  # one post per user makes the target exact


def test_stratified_shots_exact_counts():
    labels = np.array([0] * 30 + [1] * 70)
    sel = stratified_shots(labels, 10, seed=4)
    assert sel.shape == (10,)
    assert len(set(sel.tolist())) == 10
    assert (labels[sel] == 0).sum() == 3
    assert (labels[sel] == 1).sum() == 7


def test_stratified_shots_requires_enough_posts():
    labels = np.array([0, 1, 1])
    with pytest.raises(ValueError):
        stratified_shots(labels, 4, seed=0)


def test_make_split_invariants_and_determinism():
    posts = toy_posts()
    s1 = make_split(posts, "trump", "sanders", 12, seed=5)
    s2 = make_split(posts, "trump", "sanders", 12, seed=5)
    check_split(s1, posts)
    assert np.array_equal(s1.train_idx, s2.train_idx)
    assert np.array_equal(s1.test_idx, s2.test_idx)
    s3 = make_split(posts, "trump", "sanders", 12, seed=6)
    assert not np.array_equal(s1.shot_idx, s3.shot_idx)


def test_test_partition_fixed_across_seeds_and_shots():
    posts = toy_posts()
    tests = {
        tuple(make_split(posts, "trump", "sanders", shots, seed).test_idx.tolist())
        for shots in (6, 12, 20) for seed in (1, 2, 3)
    }
    assert len(tests) == 1


def test_source_equals_dest_rejected():
    posts = toy_posts()
    with pytest.raises(ValueError):
        make_split(posts, "trump", "trump", 5, seed=0)


def test_unknown_target_rejected():
    posts = toy_posts()
    with pytest.raises(ValueError):
        make_split(posts, "trump", "warren", 5, seed=0)


def test_shot_users_never_in_test():
    posts = toy_posts()
    for seed in range(10):
        s = make_split(posts, "biden", "trump", 15, seed=seed)
        shot_users = {posts.user_ids[i] for i in s.shot_idx}
        test_users = {posts.user_ids[i] for i in s.test_idx}
        assert shot_users.isdisjoint(test_users)


def test_many_random_splits_on_synth_corpus():
    data = generate(SynthParams(n_users=120, n_posts=480, mean_degree=8, seed=3))
    posts = data.posts
    targets = ("trump", "sanders", "biden")
    r = np.random.default_rng(0)
    for _ in range(300):
        source, dest = r.choice(targets, size=2, replace=False)
        shots = int(r.integers(1, 40))
        split = make_split(posts, str(source), str(dest), shots, int(r.integers(0, 1000)))
        check_split(split, posts)
