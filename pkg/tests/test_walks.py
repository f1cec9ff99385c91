import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stancenet.graphs import build_graph_from_indices
from stancenet.kernels import HAVE_NATIVE
from stancenet.walks import (
    AliasTable, WalkParams, alias_draw, build_alias, build_transition_tables,
    generate_walks, table_entry_count, transition_weights,
)


def ring(n):
    return build_graph_from_indices([(i, (i + 1) % n) for i in range(n)], n)


def test_alias_encodes_exact_distribution():
    w = np.array([3.0, 1.0, 0.5, 5.5])
    t = build_alias(w)
    assert np.allclose(t.exact_distribution(), w / w.sum(), atol=1e-15)


def test_alias_single_entry():
    t = build_alias(np.array([2.0]))
    assert t.exact_distribution().tolist() == [1.0]
    assert alias_draw(t, 10, seed=0).tolist() == [0] * 10


def test_alias_rejects_bad_weights():
    with pytest.raises(ValueError):
        build_alias(np.array([1.0, -0.5]))
    with pytest.raises(ValueError):
        build_alias(np.array([0.0, 0.0]))
    with pytest.raises(ValueError):
        build_alias(np.zeros((2, 2)))


@given(st.lists(st.floats(0.0, 1e6), min_size=1, max_size=32))
@settings(max_examples=300, deadline=None)
def test_alias_distribution_property(ws):
    w = np.array(ws)
    if not w.sum() > 0:
        return
    t = build_alias(w)
    assert ((t.prob >= 0) & (t.prob <= 1 + 1e-12)).all()
    dist = t.exact_distribution()
    assert abs(dist.sum() - 1.0) < 1e-9
    assert np.allclose(dist, w / w.sum(), atol=1e-9)


def test_alias_draw_frequencies():
    w = np.array([1.0, 2.0, 3.0, 4.0, 10.0])
    t = build_alias(w)
    draws = alias_draw(t, 400_000, seed=3)
    freq = np.bincount(draws, minlength=5) / draws.size
    assert np.abs(freq - w / w.sum()).max() < 0.004


def test_second_order_weights_all_ones_when_unbiased():
    g = build_graph_from_indices([(0, 1), (1, 2), (2, 0), (1, 3)], 4)
    for v in range(4):
        for t in g.neighbors(v):
            w = transition_weights(g, int(t), v, 1.0, 1.0)
            assert (w == 1.0).all()


def test_second_order_weights_follow_bias_rules():
    # 0-1, 1-2, 0-2 triangle plus pendant 1-3; arrive 0 -> 1
    g = build_graph_from_indices([(0, 1), (1, 2), (0, 2), (1, 3)], 4)
    w = transition_weights(g, 0, 1, p=4.0, q=0.25)
    nbrs = list(g.neighbors(1))  # [0, 2, 3]
    assert w[nbrs.index(0)] == 1.0 / 4.0   # return to previous
    assert w[nbrs.index(2)] == 1.0         # shared neighbor of 0 and 1
    assert w[nbrs.index(3)] == 1.0 / 0.25  # out move


def test_return_weight_needs_back_edge():
    # directed: 0->1->2, no way back to 0 from 1
    g = build_graph_from_indices([(0, 1), (1, 2)], 3, undirected=False)
    w = transition_weights(g, 0, 1, p=0.1, q=1.0)
    assert w.tolist() == [1.0]  # neighbor 2 is an out move with q=1


def test_transition_weights_requires_arrival_edge():
    g = build_graph_from_indices([(0, 1), (2, 1)], 3, undirected=False)
    with pytest.raises(ValueError):
        transition_weights(g, 1, 0, 1.0, 1.0)  # no edge 1->0


def test_tables_cover_every_arrival_edge():
    g = build_graph_from_indices([(0, 1), (1, 2), (2, 0), (1, 3)], 4)
    tables = build_transition_tables(g, p=0.5, q=2.0)
    assert table_entry_count(g) == tables.entries
    for t in range(4):
        row = g.neighbors(t)
        for j, v in enumerate(row.tolist()):
            e = g.offsets[t] + j
            lo, hi = tables.pair_offsets[e], tables.pair_offsets[e + 1]
            assert hi - lo == g.degree(v)
            w = transition_weights(g, t, v, 0.5, 2.0)
            enc = AliasTable(prob=tables.prob[lo:hi], alias=tables.alias[lo:hi])
            assert np.allclose(enc.exact_distribution(), w / w.sum(), atol=1e-12)


def test_walk_shapes_and_padding():
    g = ring(6)
    corpus = generate_walks(g, WalkParams(walks_per_node=3, walk_length=10, seed=1))
    assert corpus.walks.shape == (18, 10)
    assert (corpus.lengths == 10).all()
    assert corpus.walks.dtype == np.int32
    # every consecutive pair is an edge
    W = corpus.walks
    for row in W:
        for a, b in zip(row[:-1], row[1:]):
            assert g.has_edge(int(a), int(b))


def test_walks_truncate_at_sinks():
    g = build_graph_from_indices([(0, 1), (1, 2)], 3, undirected=False)
    corpus = generate_walks(g, WalkParams(walks_per_node=2, walk_length=8, seed=0))
    # start node 0 reaches sink 2 after two hops
    assert (corpus.lengths <= 3).all()
    padded = corpus.walks[0, corpus.lengths[0]:]
    assert (padded == -1).all()


def test_same_seed_same_walks_different_seed_differs():
    g = ring(8)
    p = WalkParams(walks_per_node=5, walk_length=20, seed=42)
    a = generate_walks(g, p).walks
    b = generate_walks(g, p).walks
    c = generate_walks(g, WalkParams(walks_per_node=5, walk_length=20, seed=43)).walks
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_lazy_equals_precomputed():
    edges = [(a, b) for a, b in itertools.combinations(range(7), 2) if (a + b) % 3]
    g = build_graph_from_indices(edges, 7)
    pre = generate_walks(g, WalkParams(p=0.5, q=2.0, walks_per_node=4,
                                       walk_length=15, seed=9, mode="precompute"))
    lazy = generate_walks(g, WalkParams(p=0.5, q=2.0, walks_per_node=4,
                                        walk_length=15, seed=9, mode="lazy"))
    assert np.array_equal(pre.walks, lazy.walks)
    assert np.array_equal(pre.lengths, lazy.lengths)


@pytest.mark.skipif(not HAVE_NATIVE, reason="compiled kernel not built")
def test_worker_count_does_not_change_walks():
    g = ring(30)
    base = generate_walks(g, WalkParams(walks_per_node=6, walk_length=25, seed=5,
                                        workers=1), backend="native").walks
    par = generate_walks(g, WalkParams(walks_per_node=6, walk_length=25, seed=5,
                                       workers=4), backend="native").walks
    assert np.array_equal(base, par)


def test_node_counts_tally_visits():
    g = ring(5)
    corpus = generate_walks(g, WalkParams(walks_per_node=2, walk_length=12, seed=3))
    flat = corpus.walks[corpus.walks >= 0]
    assert np.array_equal(corpus.node_counts(), np.bincount(flat, minlength=5))


def test_triangle_walk_law_quick():
    """Second-order frequencies on a 4-node graph track the exact law."""
    g = build_graph_from_indices([(0, 1), (1, 2), (2, 0), (1, 3)], 4)
    params = WalkParams(p=0.5, q=2.0, walks_per_node=200, walk_length=500, seed=17)
    W = generate_walks(g, params).walks
    n = 4
    tri = (W[:, :-2].astype(np.int64) * n + W[:, 1:-1]) * n + W[:, 2:]
    counts = np.bincount(tri.ravel(), minlength=n**3).reshape(n, n, n)
    for v in range(n):
        for t in g.neighbors(v):
            w = transition_weights(g, int(t), v, 0.5, 2.0)
            emp = counts[t, v][g.neighbors(v)]
            tv = 0.5 * np.abs(emp / emp.sum() - w / w.sum()).sum()
            assert tv < 0.02
