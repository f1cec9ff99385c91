"""Two-class stance metrics. Label encoding: 0 = favor, 1 = against."""

from __future__ import annotations

import numpy as np

FAVOR = 0
AGAINST = 1
STANCES = ("favor", "against")


def confusion(y_true: np.ndarray, y_pred: np.ndarray) -> np.ndarray:
    """2x2 counts, rows = true label, cols = predicted label."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError("y_true and y_pred must be 1-D and equal length")
    bad = ~np.isin(y_true, (0, 1)) | ~np.isin(y_pred, (0, 1))
    if bad.any():
        raise ValueError(f"labels must be 0 or 1; offending index {int(np.flatnonzero(bad)[0])}")
    m = np.zeros((2, 2), dtype=np.int64)
    np.add.at(m, (y_true, y_pred), 1)
    return m


def f1_from_confusion(m: np.ndarray) -> tuple[float, float, float]:
    """(macro_f1, f1_favor, f1_against) from a 2x2 confusion matrix.

    A class with zero precision+recall mass contributes F1 = 0; macro is
    always the mean over both classes.
    """
    m = np.asarray(m, dtype=np.int64)
    if m.shape != (2, 2):
        raise ValueError("confusion matrix must be 2x2")
    scores = []
    for c in (FAVOR, AGAINST):
        tp = m[c, c]
        fp = m[1 - c, c]
        fn = m[c, 1 - c]
        denom = 2 * tp + fp + fn
        scores.append(2.0 * tp / denom if denom else 0.0)
    return (scores[0] + scores[1]) / 2.0, scores[0], scores[1]


def f1_scores(y_true: np.ndarray, y_pred: np.ndarray) -> tuple[float, float, float]:
    """(macro_f1, f1_favor, f1_against) for label arrays."""
    return f1_from_confusion(confusion(y_true, y_pred))


def macro_f1(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    return f1_scores(y_true, y_pred)[0]
