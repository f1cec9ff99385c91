import numpy as np
import pytest

from stancenet.vecio import (
    VectorFormatError, load_vectors, load_vectors_binary, load_vectors_text,
    save_vectors, save_vectors_binary, save_vectors_text,
)


def sample(n=5, d=3, seed=0):
    r = np.random.default_rng(seed)
    keys = [f"node{i}" for i in range(n)]
    return keys, r.normal(size=(n, d))


def test_text_round_trip(tmp_path):
    keys, vecs = sample()
    path = tmp_path / "v.vec"
    save_vectors_text(path, keys, vecs)
    k2, v2 = load_vectors_text(path)
    assert k2 == keys
    assert np.allclose(v2, vecs, atol=1e-9)  # %.10g text precision


def test_binary_round_trip_is_float32_exact(tmp_path):
    keys, vecs = sample(seed=1)
    path = tmp_path / "v.bin"
    save_vectors_binary(path, keys, vecs)
    k2, v2 = load_vectors_binary(path)
    assert k2 == keys
    assert np.array_equal(v2, vecs.astype(np.float32).astype(np.float64))


def test_dispatch_sniffs_magic(tmp_path):
    keys, vecs = sample(seed=2)
    tpath, bpath = tmp_path / "a.vec", tmp_path / "b.vec"
    save_vectors(tpath, keys, vecs, fmt="text")
    save_vectors(bpath, keys, vecs, fmt="binary")
    for path in (tpath, bpath):
        k2, v2 = load_vectors(path)
        assert k2 == keys
        assert np.allclose(v2, vecs, atol=1e-6)


def test_text_header_must_match_rows(tmp_path):
    path = tmp_path / "bad.vec"
    path.write_text("3 2\na 1 2\nb 3 4\n")
    with pytest.raises(VectorFormatError):
        load_vectors_text(path)


def test_text_row_width_checked(tmp_path):
    path = tmp_path / "bad.vec"
    path.write_text("1 3\na 1 2\n")
    with pytest.raises(VectorFormatError):
        load_vectors_text(path)


def test_binary_truncation_detected(tmp_path):
    keys, vecs = sample()
    path = tmp_path / "v.bin"
    save_vectors_binary(path, keys, vecs)
    raw = path.read_bytes()
    path.write_bytes(raw[:-3])
    with pytest.raises(VectorFormatError):
        load_vectors_binary(path)


def test_duplicate_keys_rejected(tmp_path):
    with pytest.raises(VectorFormatError):
        save_vectors_text(tmp_path / "v.vec", ["a", "a"], np.zeros((2, 2)))


def test_whitespace_keys_rejected(tmp_path):
    with pytest.raises(VectorFormatError):
        save_vectors_text(tmp_path / "v.vec", ["a b"], np.zeros((1, 2)))
    with pytest.raises(VectorFormatError):
        save_vectors_text(tmp_path / "v.vec", [""], np.zeros((1, 2)))
