"""Counter-based deterministic random words (Philox-4x64-10).

Every random draw in dataset generation and Monte Carlo sampling comes from
this module, keyed by (seed, stream index) with the block counter starting
at 0.  The word stream is part of the on-disk format contract (see
docs/format.md): the same seed must produce the same bytes forever, on any
machine and for any worker count, so the generator is implemented here
instead of going through numpy.random.

Word i of stream (seed, idx) is output i % 4 of the Philox block with
counter (i // 4, 0, 0, 0) and key (seed, idx).
"""

from __future__ import annotations

import numpy as np

_M0 = 0xD2E7470EE14C6C93
_M1 = 0xCA5A826395121157
_W0 = 0x9E3779B97F4A7C15
_W1 = 0xBB67AE8584CAA73B
_MASK64 = (1 << 64) - 1

PHILOX_ROUNDS = 10


def _mulhilo(const: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """128-bit product of a constant and a uint64 array, as (hi, lo)."""
    a = np.uint64(const)
    lo = a * x
    a0 = a & np.uint64(0xFFFFFFFF)
    a1 = a >> np.uint64(32)
    x0 = x & np.uint64(0xFFFFFFFF)
    x1 = x >> np.uint64(32)
    t = a0 * x0
    t = a1 * x0 + (t >> np.uint64(32))
    carry = t >> np.uint64(32)
    t = a0 * x1 + (t & np.uint64(0xFFFFFFFF))
    hi = a1 * x1 + carry + (t >> np.uint64(32))
    return hi, lo


def philox_blocks(counter0: np.ndarray, key0: np.ndarray, key1: np.ndarray) -> np.ndarray:
    """Philox-4x64-10 blocks for counters (c0, 0, 0, 0), vectorized.

    counter0/key0/key1 broadcast against each other; returns an array with
    one extra trailing axis of length 4 (the block outputs in order).
    """
    c0, k0, k1 = np.broadcast_arrays(
        np.asarray(counter0, dtype=np.uint64),
        np.asarray(key0, dtype=np.uint64),
        np.asarray(key1, dtype=np.uint64),
    )
    c0 = c0.copy()
    c1 = np.zeros_like(c0)
    c2 = np.zeros_like(c0)
    c3 = np.zeros_like(c0)
    k0 = k0.copy()
    k1 = k1.copy()
    for _ in range(PHILOX_ROUNDS):
        hi0, lo0 = _mulhilo(_M0, c0)
        hi1, lo1 = _mulhilo(_M1, c2)
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
        k0 = k0 + np.uint64(_W0)
        k1 = k1 + np.uint64(_W1)
    return np.stack([c0, c1, c2, c3], axis=-1)


def philox_block_scalar(counter: tuple[int, int, int, int], key: tuple[int, int]) -> list[int]:
    """One Philox-4x64-10 block on plain ints (reference path)."""
    c = [v & _MASK64 for v in counter]
    k = [key[0] & _MASK64, key[1] & _MASK64]
    for _ in range(PHILOX_ROUNDS):
        p0 = _M0 * c[0]
        p1 = _M1 * c[2]
        c = [
            ((p1 >> 64) & _MASK64) ^ c[1] ^ k[0],
            p1 & _MASK64,
            ((p0 >> 64) & _MASK64) ^ c[3] ^ k[1],
            p0 & _MASK64,
        ]
        k[0] = (k[0] + _W0) & _MASK64
        k[1] = (k[1] + _W1) & _MASK64
    return c


def stream_words(seed: int, indices: np.ndarray, count: int) -> np.ndarray:
    """First `count` words of each stream (seed, idx), shape (len(indices), count)."""
    idx = np.asarray(indices, dtype=np.uint64)
    nblocks = -(-count // 4)
    ctr = np.arange(nblocks, dtype=np.uint64)[None, :]
    blocks = philox_blocks(ctr, np.uint64(seed), idx[:, None])
    return blocks.reshape(len(idx), nblocks * 4)[:, :count]


def stream_words_scalar(seed: int, index: int, count: int) -> list[int]:
    """Same stream as stream_words, one index, plain ints."""
    out: list[int] = []
    for block in range(-(-count // 4)):
        out.extend(philox_block_scalar((block, 0, 0, 0), (seed, index)))
    return out[:count]
