"""Post text features for the text modality.

Inputs are composed as "[CLS] <target> [SEP] <text>" so the same post text
encodes differently per target. Two feature routes exist: precomputed
document vectors keyed by post id (the output of any external sentence
encoder, loaded from the keyed-vector formats), or a self-contained hashed
fallback with no model dependency: signed hashing of character 3-5 grams
and word unigrams into a fixed-width L2-normalized vector.
"""

from __future__ import annotations

from hashlib import blake2b
from pathlib import Path

import numpy as np

from . import vecio

DEFAULT_TEXT_DIM = 768
MIN_HASH_DIM = 16


def compose_input(target: str, text: str) -> str:
    """Target-conditioned encoder input for one post."""
    return f"[CLS] {target} [SEP] {text}"


def _feature_tokens(text: str) -> list[str]:
    words = text.lower().split()
    feats = ["w\x1f" + w for w in words]
    s = " ".join(words)  # collapse whitespace so the char grams see one form
    for n in (3, 4, 5):
        feats.extend("c\x1f" + s[i:i + n] for i in range(len(s) - n + 1))
    return feats


def hash_encode(text: str, dim: int = DEFAULT_TEXT_DIM) -> np.ndarray:
    """Signed-hash features of `text` into a unit L2 vector of width dim.

    Deterministic across runs and platforms (keyed blake2b). Returns the
    zero vector when the text yields no features.
    """
    if dim < MIN_HASH_DIM:
        raise ValueError(f"hash dim must be >= {MIN_HASH_DIM}, got {dim}")
    vec = np.zeros(dim, dtype=np.float64)
    for feat in _feature_tokens(text):
        h = int.from_bytes(blake2b(feat.encode("utf-8"), digest_size=8).digest(), "little")
        sign = -1.0 if h >> 63 else 1.0
        vec[h % dim] += sign
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec


def encode_posts(targets: list[str], texts: list[str],
                 dim: int = DEFAULT_TEXT_DIM) -> np.ndarray:
    """Hashed features for (target, text) pairs, one row per post."""
    if len(targets) != len(texts):
        raise ValueError(f"{len(targets)} targets for {len(texts)} texts")
    out = np.empty((len(texts), dim), dtype=np.float64)
    for i, (tgt, txt) in enumerate(zip(targets, texts)):
        out[i] = hash_encode(compose_input(tgt, txt), dim)
    return out


def doc_matrix(post_ids: list[str], path: str | Path) -> np.ndarray:
    """Load precomputed document vectors and align them to post_ids.

    Every post id must be present in the file; extra keys are ignored.
    """
    keys, vectors = vecio.load_vectors(path)
    pos = {k: i for i, k in enumerate(keys)}
    missing = [p for p in post_ids if p not in pos]
    if missing:
        shown = ", ".join(repr(m) for m in missing[:5])
        raise KeyError(f"{len(missing)} post ids missing from {path} (first: {shown})")
    idx = np.array([pos[p] for p in post_ids], dtype=np.int64)
    return vectors[idx]
