"""Round-reduced DES.

Blocks are 64-bit ints holding (L, R) with L in the high 32 bits.  There is
no initial or final permutation and no final half-swap: r rounds map
(L0, R0) to (Lr, Rr).  Full-cipher known-answer tests apply IP/FP wrappers
externally (see tests).  Keys are 64-bit ints; the 8 parity bits are
ignored by PC-1 and have no effect on the output.
"""

from __future__ import annotations

import numpy as np

from ..errors import RoundRangeError, ShapeError

BLOCK_BITS = 64
KEY_BITS = 64
MAX_ROUNDS = 16

# Bit positions below are 1-indexed from the MSB, as printed in the standard.

_E = (
    32, 1, 2, 3, 4, 5, 4, 5, 6, 7, 8, 9,
    8, 9, 10, 11, 12, 13, 12, 13, 14, 15, 16, 17,
    16, 17, 18, 19, 20, 21, 20, 21, 22, 23, 24, 25,
    24, 25, 26, 27, 28, 29, 28, 29, 30, 31, 32, 1,
)

_P = (
    16, 7, 20, 21, 29, 12, 28, 17,
    1, 15, 23, 26, 5, 18, 31, 10,
    2, 8, 24, 14, 32, 27, 3, 9,
    19, 13, 30, 6, 22, 11, 4, 25,
)

_PC1 = (
    57, 49, 41, 33, 25, 17, 9,
    1, 58, 50, 42, 34, 26, 18,
    10, 2, 59, 51, 43, 35, 27,
    19, 11, 3, 60, 52, 44, 36,
    63, 55, 47, 39, 31, 23, 15,
    7, 62, 54, 46, 38, 30, 22,
    14, 6, 61, 53, 45, 37, 29,
    21, 13, 5, 28, 20, 12, 4,
)

_PC2 = (
    14, 17, 11, 24, 1, 5,
    3, 28, 15, 6, 21, 10,
    23, 19, 12, 4, 26, 8,
    16, 7, 27, 20, 13, 2,
    41, 52, 31, 37, 47, 55,
    30, 40, 51, 45, 33, 48,
    44, 49, 39, 56, 34, 53,
    46, 42, 50, 36, 29, 32,
)

_SHIFTS = (1, 1, 2, 2, 2, 2, 2, 2, 1, 2, 2, 2, 2, 2, 2, 1)

# S-boxes in the standard row/column form: row = bits 1,6 of the 6-bit
# input, column = bits 2..5.
_SBOXES = (
    (14, 4, 13, 1, 2, 15, 11, 8, 3, 10, 6, 12, 5, 9, 0, 7,
     0, 15, 7, 4, 14, 2, 13, 1, 10, 6, 12, 11, 9, 5, 3, 8,
     4, 1, 14, 8, 13, 6, 2, 11, 15, 12, 9, 7, 3, 10, 5, 0,
     15, 12, 8, 2, 4, 9, 1, 7, 5, 11, 3, 14, 10, 0, 6, 13),
    (15, 1, 8, 14, 6, 11, 3, 4, 9, 7, 2, 13, 12, 0, 5, 10,
     3, 13, 4, 7, 15, 2, 8, 14, 12, 0, 1, 10, 6, 9, 11, 5,
     0, 14, 7, 11, 10, 4, 13, 1, 5, 8, 12, 6, 9, 3, 2, 15,
     13, 8, 10, 1, 3, 15, 4, 2, 11, 6, 7, 12, 0, 5, 14, 9),
    (10, 0, 9, 14, 6, 3, 15, 5, 1, 13, 12, 7, 11, 4, 2, 8,
     13, 7, 0, 9, 3, 4, 6, 10, 2, 8, 5, 14, 12, 11, 15, 1,
     13, 6, 4, 9, 8, 15, 3, 0, 11, 1, 2, 12, 5, 10, 14, 7,
     1, 10, 13, 0, 6, 9, 8, 7, 4, 15, 14, 3, 11, 5, 2, 12),
    (7, 13, 14, 3, 0, 6, 9, 10, 1, 2, 8, 5, 11, 12, 4, 15,
     13, 8, 11, 5, 6, 15, 0, 3, 4, 7, 2, 12, 1, 10, 14, 9,
     10, 6, 9, 0, 12, 11, 7, 13, 15, 1, 3, 14, 5, 2, 8, 4,
     3, 15, 0, 6, 10, 1, 13, 8, 9, 4, 5, 11, 12, 7, 2, 14),
    (2, 12, 4, 1, 7, 10, 11, 6, 8, 5, 3, 15, 13, 0, 14, 9,
     14, 11, 2, 12, 4, 7, 13, 1, 5, 0, 15, 10, 3, 9, 8, 6,
     4, 2, 1, 11, 10, 13, 7, 8, 15, 9, 12, 5, 6, 3, 0, 14,
     11, 8, 12, 7, 1, 14, 2, 13, 6, 15, 0, 9, 10, 4, 5, 3),
    (12, 1, 10, 15, 9, 2, 6, 8, 0, 13, 3, 4, 14, 7, 5, 11,
     10, 15, 4, 2, 7, 12, 9, 5, 6, 1, 13, 14, 0, 11, 3, 8,
     9, 14, 15, 5, 2, 8, 12, 3, 7, 0, 4, 10, 1, 13, 11, 6,
     4, 3, 2, 12, 9, 5, 15, 10, 11, 14, 1, 7, 6, 0, 8, 13),
    (4, 11, 2, 14, 15, 0, 8, 13, 3, 12, 9, 7, 5, 10, 6, 1,
     13, 0, 11, 7, 4, 9, 1, 10, 14, 3, 5, 12, 2, 15, 8, 6,
     1, 4, 11, 13, 12, 3, 7, 14, 10, 15, 6, 8, 0, 5, 9, 2,
     6, 11, 13, 8, 1, 4, 10, 7, 9, 5, 0, 15, 14, 2, 3, 12),
    (13, 2, 8, 4, 6, 15, 11, 1, 10, 9, 3, 14, 5, 0, 12, 7,
     1, 15, 13, 8, 10, 3, 7, 4, 12, 5, 6, 11, 0, 14, 9, 2,
     7, 11, 4, 1, 9, 12, 14, 2, 0, 6, 10, 13, 15, 3, 5, 8,
     2, 1, 14, 7, 4, 10, 8, 13, 15, 12, 9, 0, 3, 5, 6, 11),
)


def _permute(value: int, width: int, table: tuple[int, ...]) -> int:
    out = 0
    for pos in table:
        out = (out << 1) | ((value >> (width - pos)) & 1)
    return out


def _sbox_lookup(box: int, six: int) -> int:
    row = ((six >> 4) & 2) | (six & 1)
    col = (six >> 1) & 0xF
    return _SBOXES[box][16 * row + col]


# S-boxes re-indexed by the raw 6-bit input, for DDT building.
SBOX_FLAT = tuple(
    tuple(_sbox_lookup(i, x) for x in range(64)) for i in range(8)
)


def round_keys(key: int) -> list[int]:
    """The sixteen 48-bit round keys."""
    state = _permute(key, 64, _PC1)
    c, d = state >> 28, state & 0x0FFFFFFF
    keys = []
    for shift in _SHIFTS:
        c = ((c << shift) | (c >> (28 - shift))) & 0x0FFFFFFF
        d = ((d << shift) | (d >> (28 - shift))) & 0x0FFFFFFF
        keys.append(_permute((c << 28) | d, 56, _PC2))
    return keys


def _f(right: int, subkey: int) -> int:
    x = _permute(right, 32, _E) ^ subkey
    out = 0
    for i in range(8):
        out = (out << 4) | _sbox_lookup(i, (x >> (42 - 6 * i)) & 0x3F)
    return _permute(out, 32, _P)


def check_rounds(rounds: int) -> None:
    if not 0 <= rounds <= MAX_ROUNDS:
        raise RoundRangeError(f"DES supports 0..{MAX_ROUNDS} rounds, got {rounds}")


def encrypt(key: int, block: int, rounds: int) -> int:
    check_rounds(rounds)
    if not 0 <= block < 1 << 64:
        raise ShapeError("DES block must be a 64-bit value")
    if not 0 <= key < 1 << 64:
        raise ShapeError("DES key must be a 64-bit value")
    left, right = block >> 32, block & 0xFFFFFFFF
    for k in round_keys(key)[:rounds]:
        left, right = right, left ^ _f(right, k)
    return (left << 32) | right


def encrypt_from(key: int, state: int, done: int, extra: int) -> int:
    """Resume after `done` rounds; equals encrypt(key, p, done + extra)."""
    check_rounds(done + extra)
    left, right = state >> 32, state & 0xFFFFFFFF
    for k in round_keys(key)[done:done + extra]:
        left, right = right, left ^ _f(right, k)
    return (left << 32) | right


# --- vectorized path -------------------------------------------------------
#
# Per S-box i the six expansion-input bits are six consecutive bits of
# rotr(R, 1) starting at offset 4i, and the P permutation is folded into
# per-box output tables.

_SP = np.zeros((8, 64), dtype=np.uint32)
for _i in range(8):
    for _x in range(64):
        _SP[_i][_x] = _permute(_sbox_lookup(_i, _x) << (28 - 4 * _i), 32, _P)

_U32 = np.uint32
_U64 = np.uint64


def _f_batch(right: np.ndarray, subkey: np.ndarray) -> np.ndarray:
    t = (right >> _U32(1)) | (right << _U32(31))
    out = np.zeros_like(right)
    for i in range(8):
        if i == 0:
            six = t >> _U32(26)
        else:
            six = ((t << _U32(4 * i)) | (t >> _U32(32 - 4 * i))) >> _U32(26)
        six = six ^ ((subkey >> _U64(42 - 6 * i)) & _U64(0x3F)).astype(_U32)
        out ^= _SP[i][six]
    return out


def round_keys_batch(keys: np.ndarray, rounds: int) -> list[np.ndarray]:
    """Round keys 1..rounds for a (n,) uint64 key array, each (n,) uint64."""
    keys = np.asarray(keys, dtype=_U64)
    state = np.zeros_like(keys)
    for pos in _PC1:
        state = (state << _U64(1)) | ((keys >> _U64(64 - pos)) & _U64(1))
    c = (state >> _U64(28)).astype(_U64)
    d = state & _U64(0x0FFFFFFF)
    out = []
    for shift in _SHIFTS[:rounds]:
        c = ((c << _U64(shift)) | (c >> _U64(28 - shift))) & _U64(0x0FFFFFFF)
        d = ((d << _U64(shift)) | (d >> _U64(28 - shift))) & _U64(0x0FFFFFFF)
        cd = (c << _U64(28)) | d
        k = np.zeros_like(keys)
        for pos in _PC2:
            k = (k << _U64(1)) | ((cd >> _U64(56 - pos)) & _U64(1))
        out.append(k)
    return out


def encrypt_batch(keys: np.ndarray, blocks: np.ndarray, rounds: int) -> np.ndarray:
    """encrypt() over (n,) uint64 arrays of keys and blocks."""
    check_rounds(rounds)
    blocks = np.asarray(blocks, dtype=_U64)
    left = (blocks >> _U64(32)).astype(_U32)
    right = blocks.astype(_U32)
    for k in round_keys_batch(keys, rounds):
        left, right = right, left ^ _f_batch(right, k)
    return (left.astype(_U64) << _U64(32)) | right.astype(_U64)
