# cython: language_level=3, boundscheck=False, wraparound=False
# cython: initializedcheck=False, cdivision=True
"""Compiled walk and embedding kernels.

Draw-for-draw compatible with the pure-NumPy backend: walk output is
bitwise identical, embedding updates agree up to float summation order.
"""

import numpy as np

from cython.parallel cimport prange, threadid
from libc.math cimport exp, log1p

NAME = "native"

cdef unsigned long long GAMMA = 0x9E3779B97F4A7C15ULL
cdef unsigned long long MUL1 = 0xBF58476D1CE4E5B9ULL
cdef unsigned long long MUL2 = 0x94D049BB133111EBULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline unsigned long long mix64(unsigned long long z) nogil:
    z = (z ^ (z >> 30)) * MUL1
    z = (z ^ (z >> 27)) * MUL2
    return z ^ (z >> 31)


cdef inline unsigned long long derive_stream(unsigned long long seed,
                                             unsigned long long a,
                                             unsigned long long b) nogil:
    cdef unsigned long long z = mix64(seed)
    z = mix64(z + (a + 1) * GAMMA)
    return mix64(z + (b + 1) * GAMMA)


cdef inline unsigned long long derive_stream3(unsigned long long seed,
                                              unsigned long long a,
                                              unsigned long long b,
                                              unsigned long long c) nogil:
    cdef unsigned long long z = derive_stream(seed, a, b)
    return mix64(z + (c + 1) * GAMMA)


cdef inline double sigmoid(double x) nogil:
    cdef double e
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


cdef inline double softplus(double x) nogil:
    # log(1 + e^x), overflow safe
    if x > 0.0:
        return x + log1p(exp(-x))
    return log1p(exp(x))


cdef void _one_walk(Py_ssize_t row, long long[::1] offsets, int[::1] targets,
                    long long[::1] pair_offsets, double[::1] pair_prob,
                    int[::1] pair_alias, int[::1] starts, int r, int l,
                    unsigned long long seed, int[:, ::1] walks,
                    int[::1] lengths) nogil:
    cdef long long start = starts[row // r]
    cdef unsigned long long state = derive_stream(
        seed, <unsigned long long>start, <unsigned long long>(row % r))
    cdef long long prev, cur, nxt, deg, j, lo, hi, mid, slot
    cdef double u1, u2
    cdef Py_ssize_t step

    walks[row, 0] = <int>start
    lengths[row] = 1
    if l == 1:
        return

    deg = offsets[start + 1] - offsets[start]
    state += GAMMA
    u1 = <double>(mix64(state) >> 11) * INV_2_53
    j = <long long>(u1 * deg)
    if j >= deg:
        j = deg - 1
    cur = targets[offsets[start] + j]
    walks[row, 1] = <int>cur
    lengths[row] = 2
    prev = start

    for step in range(2, l):
        deg = offsets[cur + 1] - offsets[cur]
        if deg == 0:
            return
        lo = offsets[prev]
        hi = offsets[prev + 1]
        while lo < hi:
            mid = (lo + hi) >> 1
            if targets[mid] < cur:
                lo = mid + 1
            else:
                hi = mid
        state += GAMMA
        u1 = <double>(mix64(state) >> 11) * INV_2_53
        state += GAMMA
        u2 = <double>(mix64(state) >> 11) * INV_2_53
        j = <long long>(u1 * deg)
        if j >= deg:
            j = deg - 1
        slot = pair_offsets[lo] + j
        if u2 >= pair_prob[slot]:
            j = pair_alias[slot]
        nxt = targets[offsets[cur] + j]
        walks[row, step] = <int>nxt
        lengths[row] = <int>(step + 1)
        prev = cur
        cur = nxt


def walk_kernel(long long[::1] offsets, int[::1] targets,
                long long[::1] pair_offsets, double[::1] pair_prob,
                int[::1] pair_alias, int[::1] starts, int r, int l,
                unsigned long long seed, int workers=1):
    """Generate r biased walks of length l from every start node.

    Rows are independent, so thread count never changes the output.
    Returns (walks int32[S*r, l] padded with -1, lengths int32[S*r]).
    """
    cdef Py_ssize_t S = starts.shape[0]
    cdef Py_ssize_t W = S * r
    walks_arr = np.full((W, l), -1, dtype=np.int32)
    lengths_arr = np.zeros(W, dtype=np.int32)
    cdef int[:, ::1] walks = walks_arr
    cdef int[::1] lengths = lengths_arr
    cdef Py_ssize_t row
    cdef int nt = workers if workers > 0 else 1

    if W == 0:
        return walks_arr, lengths_arr
    if nt == 1:
        for row in range(W):
            _one_walk(row, offsets, targets, pair_offsets, pair_prob,
                      pair_alias, starts, r, l, seed, walks, lengths)
    else:
        for row in prange(W, nogil=True, num_threads=nt, schedule='static'):
            _one_walk(row, offsets, targets, pair_offsets, pair_prob,
                      pair_alias, starts, r, l, seed, walks, lengths)
    return walks_arr, lengths_arr


cdef double _sgns_walk(Py_ssize_t w, Py_ssize_t epoch, int[:, ::1] walks,
                       int[::1] lengths, long long[::1] pair_base,
                       double[:, ::1] emb_in, double[:, ::1] emb_out,
                       double[::1] uni_prob, int[::1] uni_alias,
                       int window, int k_neg, double lr0, double min_lr,
                       double sched_span, long long t0,
                       unsigned long long seed, long long* idx_buf,
                       double* coef_buf, double* grad_buf) nogil:
    cdef Py_ssize_t length = lengths[w]
    cdef Py_ssize_t dim = emb_in.shape[1]
    cdef long long n_table = uni_prob.shape[0]
    cdef long long t = t0 + pair_base[w]
    cdef double total = 0.0
    cdef Py_ssize_t i, j, j_lo, j_hi, n, dd, cnt
    cdef long long center, ctx, cand, row
    cdef unsigned long long state
    cdef double u1, u2, lr, d, c

    for i in range(length):
        j_lo = i - window
        if j_lo < 0:
            j_lo = 0
        j_hi = i + window + 1
        if j_hi > length:
            j_hi = length
        if j_hi - j_lo <= 1:
            continue
        state = derive_stream3(seed, <unsigned long long>epoch,
                               <unsigned long long>w, <unsigned long long>i)
        center = walks[w, i]
        for j in range(j_lo, j_hi):
            if j == i:
                continue
            lr = lr0 * (1.0 - t / sched_span)
            if lr < min_lr:
                lr = min_lr
            t = t + 1
            ctx = walks[w, j]
            idx_buf[0] = ctx
            cnt = 1
            for n in range(k_neg):
                state += GAMMA
                u1 = <double>(mix64(state) >> 11) * INV_2_53
                state += GAMMA
                u2 = <double>(mix64(state) >> 11) * INV_2_53
                cand = <long long>(u1 * n_table)
                if cand >= n_table:
                    cand = n_table - 1
                if u2 >= uni_prob[cand]:
                    cand = uni_alias[cand]
                if cand != ctx:
                    idx_buf[cnt] = cand
                    cnt = cnt + 1
            for n in range(cnt):
                row = idx_buf[n]
                d = 0.0
                for dd in range(dim):
                    d = d + emb_out[row, dd] * emb_in[center, dd]
                if n == 0:
                    total = total + softplus(-d)
                    coef_buf[0] = sigmoid(d) - 1.0
                else:
                    total = total + softplus(d)
                    coef_buf[n] = sigmoid(d)
            for dd in range(dim):
                grad_buf[dd] = 0.0
            for n in range(cnt):
                row = idx_buf[n]
                c = coef_buf[n]
                for dd in range(dim):
                    grad_buf[dd] = grad_buf[dd] + c * emb_out[row, dd]
            for n in range(cnt):
                row = idx_buf[n]
                c = lr * coef_buf[n]
                for dd in range(dim):
                    emb_out[row, dd] = emb_out[row, dd] - c * emb_in[center, dd]
            for dd in range(dim):
                emb_in[center, dd] = emb_in[center, dd] - lr * grad_buf[dd]
    return total


def sgns_kernel(int[:, ::1] walks, int[::1] lengths, long long[::1] pair_base,
                double[:, ::1] emb_in, double[:, ::1] emb_out,
                double[::1] uni_prob, int[::1] uni_alias,
                int window, int k_neg, double lr0, double min_lr,
                int epochs, unsigned long long seed, int workers=1):
    """Skip-gram negative-sampling pass over a walk corpus, in place.

    workers == 1 runs the canonical sequential order and is fully
    deterministic; workers > 1 updates shared rows lock-free, so floats
    race and results vary run to run.  Returns mean loss per epoch.
    """
    cdef Py_ssize_t W = walks.shape[0]
    cdef long long total_pairs = pair_base[W]
    losses = np.zeros(epochs, dtype=np.float64)
    cdef double[::1] loss_v = losses
    if total_pairs == 0 or epochs == 0:
        return losses
    cdef int nt = workers if workers > 0 else 1
    cdef double sched_span = (<double>epochs) * (<double>total_pairs)

    idx_arr = np.zeros((nt, 1 + k_neg), dtype=np.int64)
    coef_arr = np.zeros((nt, 1 + k_neg), dtype=np.float64)
    grad_arr = np.zeros((nt, emb_in.shape[1]), dtype=np.float64)
    cdef long long[:, ::1] idx_mv = idx_arr
    cdef double[:, ::1] coef_mv = coef_arr
    cdef double[:, ::1] grad_mv = grad_arr

    cdef Py_ssize_t epoch, w
    cdef long long t0
    cdef double total
    cdef int tid
    for epoch in range(epochs):
        t0 = (<long long>epoch) * total_pairs
        total = 0.0
        if nt == 1:
            for w in range(W):
                total += _sgns_walk(w, epoch, walks, lengths, pair_base,
                                    emb_in, emb_out, uni_prob, uni_alias,
                                    window, k_neg, lr0, min_lr, sched_span,
                                    t0, seed, &idx_mv[0, 0], &coef_mv[0, 0],
                                    &grad_mv[0, 0])
        else:
            for w in prange(W, nogil=True, num_threads=nt,
                            schedule='static', chunksize=8):
                tid = threadid()
                total += _sgns_walk(w, epoch, walks, lengths, pair_base,
                                    emb_in, emb_out, uni_prob, uni_alias,
                                    window, k_neg, lr0, min_lr, sched_span,
                                    t0, seed, &idx_mv[tid, 0],
                                    &coef_mv[tid, 0], &grad_mv[tid, 0])
        loss_v[epoch] = total / total_pairs
    return losses
