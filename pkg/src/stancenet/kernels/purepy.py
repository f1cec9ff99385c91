"""Pure-NumPy fallback kernels.

Same draw-for-draw contracts as the compiled backend: the walk kernel is
bitwise identical to it, the embedding kernel matches up to libm/numpy
transcendental rounding.  `workers` is accepted for signature parity and
ignored; this backend always runs sequentially.
"""

from __future__ import annotations

import numpy as np

from .. import rng

NAME = "python"


def _lower_bound(values: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                 keys: np.ndarray) -> np.ndarray:
    # first index in [lo, hi) with values[idx] >= key, vectorized per row
    lo = lo.astype(np.int64).copy()
    hi = hi.astype(np.int64).copy()
    cap = np.int64(max(len(values) - 1, 0))
    while True:
        open_ = lo < hi
        if not open_.any():
            return lo
        mid = np.minimum((lo + hi) >> 1, cap)
        less = values[mid] < keys
        lo = np.where(open_ & less, mid + 1, lo)
        hi = np.where(open_ & ~less, mid, hi)


def walk_kernel(offsets: np.ndarray, targets: np.ndarray,
                pair_offsets: np.ndarray, pair_prob: np.ndarray,
                pair_alias: np.ndarray, starts: np.ndarray,
                r: int, l: int, seed: int,
                workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Generate r biased walks of length l from every start node.

    Row s*r + w is walk w from starts[s]; rows shorter than l (directed
    dead ends) are padded with -1.  Returns (walks int32[S*r, l],
    lengths int32[S*r]).
    """
    S = int(starts.shape[0])
    W = S * r
    walks = np.full((W, l), -1, dtype=np.int32)
    lengths = np.zeros(W, dtype=np.int32)
    if W == 0:
        return walks, lengths

    start = np.repeat(starts.astype(np.int64), r)
    widx = np.tile(np.arange(r, dtype=np.uint64), S)
    states = rng.derive_streams(seed, start.astype(np.uint64), widx)

    walks[:, 0] = start
    lengths[:] = 1
    if l == 1:
        return walks, lengths

    # first hop: uniform over the start node's neighbours
    deg = offsets[start + 1] - offsets[start]
    u = rng.next_uniforms(states)
    j = np.minimum((u * deg).astype(np.int64), deg - 1)
    cur = targets[offsets[start] + j].astype(np.int64)
    walks[:, 1] = cur
    lengths[:] = 2

    prev = start
    alive = np.arange(W, dtype=np.int64)
    for step in range(2, l):
        deg = offsets[cur + 1] - offsets[cur]
        keep = deg > 0
        if not keep.all():
            alive = alive[keep]
            prev = prev[keep]
            cur = cur[keep]
            deg = deg[keep]
            states = states[keep]
            if alive.size == 0:
                break
        # edge (prev -> cur) indexes the second-order alias table
        eid = _lower_bound(targets, offsets[prev], offsets[prev + 1], cur)
        states += rng._GAMMA_U64
        u1 = (rng.mix64_array(states) >> np.uint64(11)).astype(np.float64) \
            * rng._INV_2_53
        states += rng._GAMMA_U64
        u2 = (rng.mix64_array(states) >> np.uint64(11)).astype(np.float64) \
            * rng._INV_2_53
        j = np.minimum((u1 * deg).astype(np.int64), deg - 1)
        slot = pair_offsets[eid] + j
        take = u2 >= pair_prob[slot]
        j = np.where(take, pair_alias[slot].astype(np.int64), j)
        nxt = targets[offsets[cur] + j].astype(np.int64)
        walks[alive, step] = nxt
        lengths[alive] = step + 1
        prev = cur
        cur = nxt
    return walks, lengths


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # branch-free overflow-safe form; bit-for-bit equal to evaluating
    # 1/(1+exp(-x)) on the x >= 0 lanes and exp(x)/(1+exp(x)) on the rest
    ex = np.exp(-np.abs(x))
    denom = 1.0 + ex
    return np.where(x >= 0.0, 1.0 / denom, ex / denom)


def sgns_kernel(walks: np.ndarray, lengths: np.ndarray, pair_base: np.ndarray,
                emb_in: np.ndarray, emb_out: np.ndarray,
                uni_prob: np.ndarray, uni_alias: np.ndarray,
                window: int, k_neg: int, lr0: float, min_lr: float,
                epochs: int, seed: int, workers: int = 1) -> np.ndarray:
    """Skip-gram negative-sampling pass over a walk corpus, in place.

    Canonical order: epochs, then walks ascending, then center positions
    left to right, then context offsets ascending.  Negatives for one
    center position come from the substream (epoch, walk, position); a
    draw that hits the context token is dropped, not redrawn.  Each
    (center, context) pair applies the full gradient evaluated at the
    pre-update vectors.  Returns the mean loss per epoch.
    """
    W = int(walks.shape[0])
    total_pairs = int(pair_base[W])
    losses = np.zeros(epochs, dtype=np.float64)
    if total_pairs == 0:
        return losses
    n_table = int(uni_prob.shape[0])
    sched_span = float(epochs) * float(total_pairs)
    draws_per_pair = 2 * k_neg
    idx_buf = np.empty(k_neg + 1, dtype=np.int64)

    for epoch in range(epochs):
        total = 0.0
        t_base = epoch * total_pairs
        for w in range(W):
            length = int(lengths[w])
            row = walks[w]
            t = t_base + int(pair_base[w])
            for i in range(length):
                j_lo = i - window
                if j_lo < 0:
                    j_lo = 0
                j_hi = i + window + 1
                if j_hi > length:
                    j_hi = length
                n_ctx = j_hi - j_lo - 1
                if n_ctx <= 0:
                    continue
                if k_neg > 0:
                    # integer draws batched for the whole position: pair p
                    # sees lanes [p, :, 0] and [p, :, 1] of the stream, the
                    # same interleaving the per-pair form consumed
                    u = rng.stream_uniforms(
                        rng.derive_stream3(seed, epoch, w, i),
                        n_ctx * draws_per_pair).reshape(n_ctx, k_neg, 2)
                    cand_all = np.minimum(
                        (u[:, :, 0] * n_table).astype(np.int64), n_table - 1)
                    take = u[:, :, 1] >= uni_prob[cand_all]
                    cand_all[take] = uni_alias[cand_all[take]]
                center = int(row[i])
                v = emb_in[center]
                pair_no = 0
                for j in range(j_lo, j_hi):
                    if j == i:
                        continue
                    lr = lr0 * (1.0 - t / sched_span)
                    if lr < min_lr:
                        lr = min_lr
                    t += 1
                    ctx = int(row[j])
                    if k_neg > 0:
                        negs = cand_all[pair_no]
                        pair_no += 1
                        idx_buf[0] = ctx
                        if ctx in negs:
                            negs = negs[negs != ctx]
                        m = negs.shape[0] + 1
                        idx_buf[1:m] = negs
                        idxs = idx_buf[:m]
                    else:
                        idxs = idx_buf[:1]
                        idxs[0] = ctx
                    U = emb_out[idxs]
                    dots = U @ v
                    total += np.logaddexp(0.0, -dots[0])
                    if idxs.shape[0] > 1:
                        total += np.logaddexp(0.0, dots[1:]).sum()
                    coef = _sigmoid(dots)
                    coef[0] -= 1.0
                    grad_v = coef @ U
                    step_out = coef[:, None] * (lr * v)
                    if len(set(idxs.tolist())) == idxs.shape[0]:
                        emb_out[idxs] -= step_out
                    else:
                        np.subtract.at(emb_out, idxs, step_out)
                    v -= lr * grad_v
        losses[epoch] = total / total_pairs
    return losses
