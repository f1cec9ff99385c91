"""Per-modality stance classifiers: one hidden layer, trained by hand.

Architecture: input -> hidden(64, ReLU) -> dropout(0.2) -> softmax over
(favor, against). Training uses mini-batches of 128 with either plain SGD
or AdamW (decoupled weight decay on the weight matrices, never biases).
All randomness (init, epoch shuffles, dropout masks) is drawn from
counter-based streams of the seed, so training is deterministic.

An exact softmax tie predicts against; probability columns are ordered
(favor, against) to match the label encoding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng

N_CLASSES = 2

_TAG_W1 = 0x11
_TAG_W2 = 0x12
_TAG_PERM = 0x21
_TAG_DROP = 0x22


@dataclass(frozen=True)
class HeadParams:
    input_dim: int
    hidden: int = 64
    lr: float = 1e-2
    optimizer: str = "sgd"
    epochs: int = 100
    batch_size: int = 128
    dropout: float = 0.2
    weight_decay: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.input_dim < 1:
            raise ValueError("heads.input_dim: must be >= 1")
        if self.hidden < 1:
            raise ValueError("heads.hidden: must be >= 1")
        if self.lr <= 0:
            raise ValueError("heads.lr: must be > 0")
        if self.optimizer not in ("sgd", "adamw"):
            raise ValueError(f"heads.optimizer: unknown optimizer {self.optimizer!r}")
        if self.epochs < 1:
            raise ValueError("heads.epochs: must be >= 1")
        if self.batch_size < 1:
            raise ValueError("heads.batch_size: must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("heads.dropout: must be in [0, 1)")
        if self.weight_decay < 0:
            raise ValueError("heads.weight_decay: must be >= 0")


def text_head_params(input_dim: int, **overrides) -> HeadParams:
    """Text-modality defaults: AdamW, lr 3e-5, 40 epochs."""
    base = dict(input_dim=input_dim, lr=3e-5, optimizer="adamw", epochs=40)
    base.update(overrides)
    return HeadParams(**base)


def graph_head_params(input_dim: int, **overrides) -> HeadParams:
    """Graph-modality defaults: SGD, lr 1e-2, 100 epochs."""
    base = dict(input_dim=input_dim, lr=1e-2, optimizer="sgd", epochs=100)
    base.update(overrides)
    return HeadParams(**base)


def init_weights(params: HeadParams) -> dict[str, np.ndarray]:
    """Xavier-uniform weight matrices, zero biases."""
    d, h = params.input_dim, params.hidden
    lim1 = np.sqrt(6.0 / (d + h))
    lim2 = np.sqrt(6.0 / (h + N_CLASSES))
    u1 = rng.stream_uniforms(rng.derive_stream(params.seed, _TAG_W1, 0), d * h)
    u2 = rng.stream_uniforms(rng.derive_stream(params.seed, _TAG_W2, 0), h * N_CLASSES)
    return {
        "W1": ((u1 * 2.0 - 1.0) * lim1).reshape(d, h),
        "b1": np.zeros(h, dtype=np.float64),
        "W2": ((u2 * 2.0 - 1.0) * lim2).reshape(h, N_CLASSES),
        "b2": np.zeros(N_CLASSES, dtype=np.float64),
    }


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def forward(weights: dict[str, np.ndarray], X: np.ndarray,
            drop_mask: np.ndarray | None = None,
            dropout: float = 0.0) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Class probabilities plus the intermediates backward() needs.

    drop_mask is a 0/1 matrix over hidden units (training only); inverted
    scaling keeps eval activations unscaled.
    """
    Z1 = X @ weights["W1"] + weights["b1"]
    H = np.maximum(Z1, 0.0)
    if drop_mask is not None:
        Hd = H * drop_mask / (1.0 - dropout)
    else:
        Hd = H
    logits = Hd @ weights["W2"] + weights["b2"]
    probs = _softmax(logits)
    return probs, {"X": X, "Z1": Z1, "Hd": Hd}


def loss_and_grads(weights: dict[str, np.ndarray], X: np.ndarray, y: np.ndarray,
                   drop_mask: np.ndarray | None = None,
                   dropout: float = 0.0) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy over the batch and its exact gradients."""
    n = X.shape[0]
    probs, cache = forward(weights, X, drop_mask, dropout)
    loss = float(-np.log(probs[np.arange(n), y]).mean())
    dlogits = probs.copy()
    dlogits[np.arange(n), y] -= 1.0
    dlogits /= n
    grads = {
        "W2": cache["Hd"].T @ dlogits,
        "b2": dlogits.sum(axis=0),
    }
    dHd = dlogits @ weights["W2"].T
    if drop_mask is not None:
        dH = dHd * drop_mask / (1.0 - dropout)
    else:
        dH = dHd
    dZ1 = dH * (cache["Z1"] > 0.0)
    grads["W1"] = cache["X"].T @ dZ1
    grads["b1"] = dZ1.sum(axis=0)
    return loss, grads


@dataclass
class TrainedHead:
    weights: dict[str, np.ndarray]
    params: HeadParams
    epoch_losses: np.ndarray

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """(n, 2) probabilities ordered (favor, against); no dropout."""
        probs, _ = forward(self.weights, np.asarray(X, dtype=np.float64))
        return probs

    def predict(self, X: np.ndarray) -> np.ndarray:
        probs = self.predict_proba(X)
        return (probs[:, 1] >= probs[:, 0]).astype(np.int64)

    def confidence(self, X: np.ndarray) -> np.ndarray:
        return self.predict_proba(X).max(axis=1)


def train_head(X: np.ndarray, y: np.ndarray, params: HeadParams) -> TrainedHead:
    """Fit one classifier head; deterministic for a given (data, params)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    if n == 0:
        raise ValueError("cannot train a head on zero samples")
    if X.shape[1] != params.input_dim:
        raise ValueError(f"feature width {X.shape[1]} != heads.input_dim {params.input_dim}")
    if y.shape != (n,) or ((y != 0) & (y != 1)).any():
        raise ValueError("labels must be a 1-D array of 0/1")

    weights = init_weights(params)
    adam_m = {k: np.zeros_like(v) for k, v in weights.items()}
    adam_v = {k: np.zeros_like(v) for k, v in weights.items()}
    step = 0
    epoch_losses = np.zeros(params.epochs)
    use_adamw = params.optimizer == "adamw"

    for epoch in range(params.epochs):
        order = np.argsort(
            rng.stream_uniforms(rng.derive_stream(params.seed, _TAG_PERM, epoch), n),
            kind="stable")
        total = 0.0
        n_batches = 0
        for b, s in enumerate(range(0, n, params.batch_size)):
            idx = order[s:s + params.batch_size]
            mask = None
            if params.dropout > 0.0:
                u = rng.stream_uniforms(
                    rng.derive_stream3(params.seed, _TAG_DROP, epoch, b),
                    idx.shape[0] * params.hidden)
                mask = (u >= params.dropout).astype(np.float64).reshape(
                    idx.shape[0], params.hidden)
            loss, grads = loss_and_grads(weights, X[idx], y[idx], mask, params.dropout)
            total += loss
            n_batches += 1
            step += 1
            if use_adamw:
                bc1 = 1.0 - params.beta1 ** step
                bc2 = 1.0 - params.beta2 ** step
                for k, g in grads.items():
                    adam_m[k] = params.beta1 * adam_m[k] + (1.0 - params.beta1) * g
                    adam_v[k] = params.beta2 * adam_v[k] + (1.0 - params.beta2) * g * g
                    upd = (adam_m[k] / bc1) / (np.sqrt(adam_v[k] / bc2) + params.eps)
                    if k in ("W1", "W2"):
                        # decoupled decay, applied against the pre-step value
                        upd = upd + params.weight_decay * weights[k]
                    weights[k] -= params.lr * upd
            else:
                for k, g in grads.items():
                    weights[k] -= params.lr * g
        epoch_losses[epoch] = total / n_batches
    if not np.isfinite(epoch_losses).all():
        bad = int(np.flatnonzero(~np.isfinite(epoch_losses))[0])
        raise RuntimeError(f"head training diverged: non-finite loss at epoch {bad} (lr={params.lr})")
    return TrainedHead(weights=weights, params=params, epoch_losses=epoch_losses)
