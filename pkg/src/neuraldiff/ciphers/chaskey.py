"""Round-reduced Chaskey permutation, keyed Even-Mansour style.

The 128-bit state is four 32-bit words (v0, v1, v2, v3) with v0 in the
high 32 bits of the block int.  encrypt computes pi^r(p ^ k) ^ k where pi
is one round of the Chaskey ARX permutation; r=0 therefore returns p.
"""

from __future__ import annotations

import numpy as np

from ..errors import RoundRangeError, ShapeError

BLOCK_BITS = 128
KEY_BITS = 128
MAX_ROUNDS = 16

_M32 = 0xFFFFFFFF


def _rotl(x: int, r: int) -> int:
    return ((x << r) | (x >> (32 - r))) & _M32


def round_words(v0: int, v1: int, v2: int, v3: int) -> tuple[int, int, int, int]:
    """One permutation round on plain 32-bit ints."""
    v0 = (v0 + v1) & _M32
    v1 = _rotl(v1, 5) ^ v0
    v0 = _rotl(v0, 16)
    v2 = (v2 + v3) & _M32
    v3 = _rotl(v3, 8) ^ v2
    v0 = (v0 + v3) & _M32
    v3 = _rotl(v3, 13) ^ v0
    v2 = (v2 + v1) & _M32
    v1 = _rotl(v1, 7) ^ v2
    v2 = _rotl(v2, 16)
    return v0, v1, v2, v3


def _to_words(block: int) -> tuple[int, int, int, int]:
    return (block >> 96) & _M32, (block >> 64) & _M32, (block >> 32) & _M32, block & _M32


def _from_words(v0: int, v1: int, v2: int, v3: int) -> int:
    return (v0 << 96) | (v1 << 64) | (v2 << 32) | v3


def check_rounds(rounds: int) -> None:
    if not 0 <= rounds <= MAX_ROUNDS:
        raise RoundRangeError(f"Chaskey supports 0..{MAX_ROUNDS} rounds, got {rounds}")


def permute(block: int, rounds: int) -> int:
    """pi^rounds on a 128-bit state, unkeyed."""
    check_rounds(rounds)
    v = _to_words(block)
    for _ in range(rounds):
        v = round_words(*v)
    return _from_words(*v)


def encrypt(key: int, block: int, rounds: int) -> int:
    check_rounds(rounds)
    if not 0 <= block < 1 << 128:
        raise ShapeError("Chaskey block must be a 128-bit value")
    if not 0 <= key < 1 << 128:
        raise ShapeError("Chaskey key must be a 128-bit value")
    return permute(block ^ key, rounds) ^ key


def encrypt_from(key: int, state: int, done: int, extra: int) -> int:
    """Resume after `done` rounds; equals encrypt(key, p, done + extra)."""
    check_rounds(done + extra)
    return permute(state ^ key, extra) ^ key


# --- vectorized path -------------------------------------------------------

_U32 = np.uint32
_U64 = np.uint64


def _rotl_batch(x: np.ndarray, r: int) -> np.ndarray:
    return (x << _U32(r)) | (x >> _U32(32 - r))


def _round_batch(v0, v1, v2, v3):
    v0 = v0 + v1
    v1 = _rotl_batch(v1, 5) ^ v0
    v0 = _rotl_batch(v0, 16)
    v2 = v2 + v3
    v3 = _rotl_batch(v3, 8) ^ v2
    v0 = v0 + v3
    v3 = _rotl_batch(v3, 13) ^ v0
    v2 = v2 + v1
    v1 = _rotl_batch(v1, 7) ^ v2
    v2 = _rotl_batch(v2, 16)
    return v0, v1, v2, v3


def _limbs_to_words(limbs: np.ndarray):
    """(n, 2) little-endian uint64 limbs -> four (n,) uint32 word arrays."""
    lo, hi = limbs[:, 0], limbs[:, 1]
    return (
        (hi >> _U64(32)).astype(_U32),
        hi.astype(_U32),
        (lo >> _U64(32)).astype(_U32),
        lo.astype(_U32),
    )


def _words_to_limbs(v0, v1, v2, v3) -> np.ndarray:
    lo = (v2.astype(_U64) << _U64(32)) | v3.astype(_U64)
    hi = (v0.astype(_U64) << _U64(32)) | v1.astype(_U64)
    return np.stack([lo, hi], axis=1)


def encrypt_batch(keys: np.ndarray, blocks: np.ndarray, rounds: int) -> np.ndarray:
    """encrypt() over (n, 2) little-endian uint64 limb arrays."""
    check_rounds(rounds)
    keys = np.asarray(keys, dtype=_U64)
    blocks = np.asarray(blocks, dtype=_U64)
    v = _limbs_to_words(blocks ^ keys)
    for _ in range(rounds):
        v = _round_batch(*v)
    return _words_to_limbs(*v) ^ keys
