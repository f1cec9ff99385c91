import numpy as np
import pytest

from stancenet.splits import largest_remainder
from stancenet.synth import DEFAULT_LABEL_MIX, SynthParams, edge_probabilities, generate


def test_default_mix_sets_post_count():
    p = SynthParams()
    assert p.n_posts == sum(sum(m) for m in DEFAULT_LABEL_MIX)


def test_generate_shapes_and_labels():
    p = SynthParams(n_users=60, n_posts=240, mean_degree=6, seed=1)
    data = generate(p)
    assert len(data.users) == 60
    assert len(data.posts.post_ids) == 240
    assert set(data.edges) == {"followers", "friends", "likes"}
    assert data.communities.shape == (60,)
    assert len(data.community_of) == 6


def test_community_sizes_follow_largest_remainder():
    p = SynthParams(n_users=60, n_posts=240, mean_degree=6, seed=2)
    data = generate(p)
    post_mix = np.array([c for pair in p.label_mix for c in pair], dtype=float)
    want = largest_remainder(post_mix, p.n_users)
    got = np.bincount(data.communities, minlength=6)
    assert np.array_equal(got, want)


def test_users_are_label_consistent():
    data = generate(SynthParams(n_users=90, n_posts=360, mean_degree=8, seed=4))
    seen = {}
    for uid, tgt, st in zip(data.posts.user_ids, data.posts.targets,
                            data.posts.stances):
        key = (uid,)
        if key in seen:
            assert seen[key] == (tgt, int(st))
        else:
            seen[key] = (tgt, int(st))


def test_mean_degree_calibration():
    p = SynthParams(n_users=400, n_posts=1600, mean_degree=14, seed=7)
    data = generate(p)
    for rel, e in data.edges.items():
        mean_deg = 2 * e.shape[0] / p.n_users
        assert abs(mean_deg - 14) < 1.5, rel


def test_homophily_shifts_edge_mix():
    def within_frac(h):
        data = generate(SynthParams(n_users=300, n_posts=1200, mean_degree=10,
                                    homophily=h, seed=9))
        e = data.edges["followers"]
        c = data.communities
        return (c[e[:, 0]] == c[e[:, 1]]).mean()
    assert within_frac(0.9) > within_frac(0.5) + 0.3


def test_uniform_mixing_at_half_homophily():
    p = SynthParams(n_users=240, n_posts=960, mean_degree=10, homophily=0.5, seed=3)
    p_in, p_out = edge_probabilities(p, np.full(6, 40))
    assert abs(p_in - p_out) < 1e-12


def test_infeasible_homophily_raises():
    # tiny graph, huge degree target: probabilities would exceed 1
    with pytest.raises(ValueError):
        generate(SynthParams(n_users=12, n_posts=48, mean_degree=50, seed=0))


def test_signal_rate_controls_text():
    p = SynthParams(n_users=120, n_posts=2000, mean_degree=6,
                    signal_rate=0.7, seed=5)
    data = generate(p)
    favor_words, against_words = set(), set()
    # opinion word is the middle token; fillers are drawn from a neutral pool
    hits = 0
    for text, st in zip(data.posts.texts, data.posts.stances):
        toks = text.split()
        assert len(toks) == p.fillers_per_post + 2  # fillers + opinion + target
        (favor_words if st == 0 else against_words).add(toks[3])
    # with flips at rate 0.3 both stances eventually use both word pools
    assert favor_words & against_words


def test_texts_mention_their_target():
    data = generate(SynthParams(n_users=60, n_posts=240, mean_degree=6, seed=6))
    for text, tgt in zip(data.posts.texts, data.posts.targets):
        assert tgt in text.split()


def test_generation_is_deterministic():
    p = SynthParams(n_users=80, n_posts=320, mean_degree=8, seed=11)
    a, b = generate(p), generate(p)
    assert a.posts.texts == b.posts.texts
    assert a.posts.user_ids == b.posts.user_ids
    for rel in a.edges:
        assert np.array_equal(a.edges[rel], b.edges[rel])
    c = generate(SynthParams(n_users=80, n_posts=320, mean_degree=8, seed=12))
    assert not np.array_equal(a.edges["likes"], c.edges["likes"])


def test_relations_get_distinct_graphs():
    data = generate(SynthParams(n_users=80, n_posts=320, mean_degree=8, seed=1))
    assert not np.array_equal(data.edges["followers"], data.edges["friends"])


def test_bundle_aligns_users():
    data = generate(SynthParams(n_users=50, n_posts=200, mean_degree=6, seed=2))
    bundle = data.bundle()
    assert len(bundle.interner) == 50
    for i, uid in enumerate(data.users):
        assert bundle.interner.lookup(uid) == i


def test_param_validation():
    with pytest.raises(ValueError):
        SynthParams(homophily=0.0)
    with pytest.raises(ValueError):
        SynthParams(signal_rate=1.5)
    with pytest.raises(ValueError):
        SynthParams(n_users=3)
    with pytest.raises(ValueError):
        SynthParams(label_mix=((1, 1),))
