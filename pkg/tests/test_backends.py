"""Cross-checks between the compiled kernels and the numpy fallback."""

import numpy as np
import pytest

from stancenet.graphs import build_graph_from_indices
from stancenet.kernels import HAVE_NATIVE, backend_name, get_kernels
from stancenet.sgns import SgnsParams, train_embeddings
from stancenet.walks import WalkParams, generate_walks

pytestmark = pytest.mark.skipif(not HAVE_NATIVE, reason="compiled kernel not built")


def rand_graph(n, m, seed, undirected=True):
    r = np.random.default_rng(seed)
    pairs = r.integers(0, n, size=(m, 2))
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    return build_graph_from_indices(pairs, n, undirected=undirected)


def test_backend_selection():
    assert get_kernels("native").NAME == "native"
    assert get_kernels("python").NAME == "python"
    assert backend_name() in ("native", "python")


@pytest.mark.parametrize("p,q,undirected", [
    (1.0, 1.0, True), (0.5, 2.0, True), (4.0, 0.25, False),
])
def test_walks_bitwise_identical(p, q, undirected):
    g = rand_graph(60, 400, seed=1, undirected=undirected)
    params = WalkParams(p=p, q=q, walks_per_node=5, walk_length=30, seed=7)
    a = generate_walks(g, params, backend="native")
    b = generate_walks(g, params, backend="python")
    assert np.array_equal(a.walks, b.walks)
    assert np.array_equal(a.lengths, b.lengths)


def test_walks_bitwise_identical_with_truncation():
    # directed graph with sinks exercises early termination
    g = build_graph_from_indices(
        [(0, 1), (1, 2), (2, 3), (0, 4), (4, 2), (5, 0)], 6, undirected=False)
    params = WalkParams(p=2.0, q=0.5, walks_per_node=20, walk_length=12, seed=3)
    a = generate_walks(g, params, backend="native")
    b = generate_walks(g, params, backend="python")
    assert np.array_equal(a.walks, b.walks)


def test_sgns_backends_numerically_close():
    g = rand_graph(50, 300, seed=2)
    corpus = generate_walks(g, WalkParams(walks_per_node=4, walk_length=20, seed=1))
    params = SgnsParams(dim=16, window=4, negatives=5, epochs=2, seed=9)
    nat = train_embeddings(corpus, params, backend="native")
    py = train_embeddings(corpus, params, backend="python")
    # same pair order and draws; only float summation order differs
    assert np.abs(nat.input_vectors - py.input_vectors).max() < 1e-12
    assert np.abs(nat.output_vectors - py.output_vectors).max() < 1e-12
    assert np.abs(nat.epoch_losses - py.epoch_losses).max() < 1e-12


def test_native_sgns_rerun_bitwise():
    g = rand_graph(40, 200, seed=5)
    corpus = generate_walks(g, WalkParams(walks_per_node=3, walk_length=15, seed=2))
    params = SgnsParams(dim=8, window=3, epochs=2, seed=4)
    a = train_embeddings(corpus, params, backend="native")
    b = train_embeddings(corpus, params, backend="native")
    assert np.array_equal(a.input_vectors, b.input_vectors)
    assert np.array_equal(a.epoch_losses, b.epoch_losses)


def test_parallel_walks_match_serial():
    g = rand_graph(80, 600, seed=8)
    base = WalkParams(p=0.5, q=2.0, walks_per_node=6, walk_length=25, seed=11)
    par = WalkParams(p=0.5, q=2.0, walks_per_node=6, walk_length=25, seed=11,
                     workers=4)
    a = generate_walks(g, base, backend="native")
    b = generate_walks(g, par, backend="native")
    assert np.array_equal(a.walks, b.walks)
