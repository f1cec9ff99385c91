"""Majority voting across modality heads.

A vote carries (label, confidence). The winner is the strict majority
label among the modalities present; on a tie the single vote with the
highest (confidence, modality priority) decides, where earlier entries of
MODALITIES outrank later ones. Voting with zero modalities is an error;
callers that can face an empty panel must substitute their own fallback.
"""

from __future__ import annotations

import numpy as np

MODALITIES = ("text", "likes", "friends", "followers")

_PRIORITY = {m: len(MODALITIES) - i for i, m in enumerate(MODALITIES)}


def vote(votes: dict[str, tuple[int, float]]) -> tuple[int, dict]:
    """Resolve one example. votes maps modality -> (label, confidence).

    Returns (label, trace); the trace records the counts and which rule
    fired ("majority" or "tiebreak").
    """
    if not votes:
        raise ValueError("cannot vote with zero modalities")
    unknown = set(votes) - set(MODALITIES)
    if unknown:
        raise ValueError(f"unknown modalities {sorted(unknown)}")
    counts = [0, 0]
    for label, _conf in votes.values():
        if label not in (0, 1):
            raise ValueError(f"labels must be 0 or 1, got {label!r}")
        counts[label] += 1
    if counts[0] != counts[1]:
        winner = int(counts[1] > counts[0])
        rule = "majority"
    else:
        best = max(votes.items(), key=lambda kv: (kv[1][1], _PRIORITY[kv[0]]))
        winner = int(best[1][0])
        rule = "tiebreak"
    return winner, {"counts": tuple(counts), "rule": rule}


def vote_batch(predictions: dict[str, np.ndarray],
               confidences: dict[str, np.ndarray]) -> np.ndarray:
    """Vectorized vote() over n examples for a fixed modality panel."""
    if not predictions:
        raise ValueError("cannot vote with zero modalities")
    if set(predictions) != set(confidences):
        raise ValueError("predictions and confidences cover different modalities")
    mods = [m for m in MODALITIES if m in predictions]
    unknown = set(predictions) - set(MODALITIES)
    if unknown:
        raise ValueError(f"unknown modalities {sorted(unknown)}")
    labels = np.stack([np.asarray(predictions[m], dtype=np.int64) for m in mods])
    confs = np.stack([np.asarray(confidences[m], dtype=np.float64) for m in mods])
    if ((labels != 0) & (labels != 1)).any():
        raise ValueError("labels must be 0 or 1")
    n_mod, n = labels.shape
    ones = labels.sum(axis=0)
    out = (2 * ones > n_mod).astype(np.int64)
    tied = 2 * ones == n_mod
    if tied.any():
        # highest (confidence, priority) vote decides; mods is already in
        # priority order so a stable argmax over -confidence keeps the
        # earlier modality on exact confidence ties
        ti = np.flatnonzero(tied)
        best = np.argmin(-confs[:, ti], axis=0)
        out[ti] = labels[best, ti]
    return out


def panel_predict(n: int, mods: tuple[str, ...],
                  predictions: dict[str, np.ndarray],
                  confidences: dict[str, np.ndarray],
                  present: dict[str, np.ndarray],
                  fallback_label: int) -> tuple[np.ndarray, np.ndarray]:
    """Vote over `mods` with per-example presence masks.

    An example votes only with modalities both trained (in predictions)
    and present for it. Examples with an empty panel take fallback_label;
    the returned mask marks them.
    """
    avail = [m for m in MODALITIES if m in mods and m in predictions]
    out = np.full(n, fallback_label, dtype=np.int64)
    fellback = np.ones(n, dtype=bool)
    if not avail:
        return out, fellback
    bits = np.zeros(n, dtype=np.int64)
    for i, m in enumerate(avail):
        mask = np.asarray(present[m], dtype=bool)
        if mask.shape != (n,):
            raise ValueError(f"presence mask for {m!r} has shape {mask.shape}, want ({n},)")
        bits |= mask.astype(np.int64) << i
    for pattern in np.unique(bits):
        idx = np.flatnonzero(bits == pattern)
        active = [m for i, m in enumerate(avail) if pattern >> i & 1]
        if not active:
            continue
        out[idx] = vote_batch({m: predictions[m][idx] for m in active},
                              {m: confidences[m][idx] for m in active})
        fellback[idx] = False
    return out, fellback


def ablation_grid() -> list[tuple[str, ...]]:
    """The nine modality panels reported by the ablation: each modality
    alone, each graph modality with text, graphs only, and all four."""
    singles = [(m,) for m in MODALITIES]
    pairs = [(m, "text") for m in ("likes", "friends", "followers")]
    return singles + pairs + [("likes", "friends", "followers"), MODALITIES]


def config_name(mods: tuple[str, ...]) -> str:
    """Stable row label for a modality panel, e.g. 'likes+text'."""
    ordered = [m for m in MODALITIES if m in mods]
    return "+".join(ordered)
