"""Counter-based random streams (splitmix64).

Every walk and every embedding-training step draws from a stream derived from
(seed, index-a, index-b), so output never depends on scheduling or worker
count. The native kernels implement the same arithmetic on C uint64, which
keeps the two backends draw-for-draw identical.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB
_MASK = 0xFFFFFFFFFFFFFFFF
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(z: int) -> int:
    """splitmix64 finalizer on a Python int, wrapping at 64 bits."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MUL1) & _MASK
    z = ((z ^ (z >> 27)) * _MUL2) & _MASK
    return z ^ (z >> 31)


def derive_stream(seed: int, a: int, b: int) -> int:
    """Initial stream state for substream (a, b) of `seed`."""
    z = mix64(seed)
    z = mix64((z + (a + 1) * GAMMA) & _MASK)
    z = mix64((z + (b + 1) * GAMMA) & _MASK)
    return z


def derive_stream3(seed: int, a: int, b: int, c: int) -> int:
    """Initial stream state for substream (a, b, c) of `seed`."""
    z = derive_stream(seed, a, b)
    return mix64((z + (c + 1) * GAMMA) & _MASK)


def next_uniform(state: int) -> tuple[int, float]:
    """Advance one scalar stream; returns (new_state, uniform in [0, 1))."""
    state = (state + GAMMA) & _MASK
    return state, (mix64(state) >> 11) * _INV_2_53


# -- vectorized variants over uint64 state arrays --

_GAMMA_U64 = np.uint64(GAMMA)
_MUL1_U64 = np.uint64(_MUL1)
_MUL2_U64 = np.uint64(_MUL2)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MUL1_U64
    z = (z ^ (z >> np.uint64(27))) * _MUL2_U64
    return z ^ (z >> np.uint64(31))


def derive_streams(seed: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized derive_stream over index arrays a, b."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    z = np.uint64(mix64(seed))
    z = mix64_array(z + (a + np.uint64(1)) * _GAMMA_U64)
    z = mix64_array(z + (b + np.uint64(1)) * _GAMMA_U64)
    return z


def next_uniforms(states: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """Advance each stream in `states` in place; returns uniforms in [0, 1)."""
    states += _GAMMA_U64
    bits = mix64_array(states) >> np.uint64(11)
    res = bits.astype(np.float64) * _INV_2_53
    if out is not None:
        out[:] = res
        return out
    return res


def stream_uniforms(state: int, count: int) -> np.ndarray:
    """First `count` uniforms of the stream starting at `state`.

    Counter-based, so this equals `count` sequential next_uniform() calls.
    """
    ctr = (np.uint64(state) +
           (np.arange(1, count + 1, dtype=np.uint64)) * _GAMMA_U64)
    bits = mix64_array(ctr) >> np.uint64(11)
    return bits.astype(np.float64) * _INV_2_53
