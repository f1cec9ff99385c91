import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stancenet.textenc import (
    DEFAULT_TEXT_DIM, MIN_HASH_DIM, compose_input, doc_matrix, encode_posts,
    hash_encode,
)
from stancenet.vecio import save_vectors_text


def test_compose_input_layout():
    assert compose_input("sanders", "I agree") == "[CLS] sanders [SEP] I agree"


def test_hash_encode_unit_norm_and_deterministic():
    v1 = hash_encode("some stance text", 64)
    v2 = hash_encode("some stance text", 64)
    assert np.array_equal(v1, v2)
    assert abs(np.linalg.norm(v1) - 1.0) < 1e-12
    assert v1.shape == (64,)


def test_hash_encode_case_insensitive():
    assert np.array_equal(hash_encode("Hello World", 32), hash_encode("hello world", 32))


def test_hash_encode_empty_is_zero():
    assert (hash_encode("", 32) == 0).all()
    assert (hash_encode("   ", 32) == 0).all()


def test_hash_encode_dim_floor():
    with pytest.raises(ValueError):
        hash_encode("abc", MIN_HASH_DIM - 1)


def test_different_texts_usually_differ():
    a = hash_encode("food prices are rising", 128)
    b = hash_encode("the game went to overtime", 128)
    assert not np.array_equal(a, b)


@given(st.text(max_size=80), st.sampled_from([16, 64, 256]))
@settings(max_examples=150, deadline=None)
def test_hash_encode_norm_property(text, dim):
    v = hash_encode(text, dim)
    n = np.linalg.norm(v)
    assert n == 0.0 or abs(n - 1.0) < 1e-9


def test_encode_posts_composes_target():
    targets = ["trump", "sanders"]
    texts = ["tax cut", "tax cut"]
    M = encode_posts(targets, texts, 64)
    assert M.shape == (2, 64)
    # same text under a different target must hash differently
    assert not np.array_equal(M[0], M[1])


def test_encode_posts_default_dim():
    M = encode_posts(["a"], ["b"], DEFAULT_TEXT_DIM)
    assert M.shape == (1, DEFAULT_TEXT_DIM)


def test_doc_matrix_aligns_by_post_id(tmp_path):
    path = tmp_path / "docs.vec"
    keys = ["p3", "p1", "p2"]
    vecs = np.array([[3.0, 3.0], [1.0, 1.0], [2.0, 2.0]])
    save_vectors_text(path, keys, vecs)
    M = doc_matrix(["p1", "p2", "p3"], path)
    assert np.allclose(M, [[1, 1], [2, 2], [3, 3]])


def test_doc_matrix_missing_ids_listed(tmp_path):
    path = tmp_path / "docs.vec"
    save_vectors_text(path, ["p1"], np.array([[1.0]]))
    with pytest.raises(KeyError) as e:
        doc_matrix(["p1", "p9"], path)
    assert "p9" in str(e.value)
