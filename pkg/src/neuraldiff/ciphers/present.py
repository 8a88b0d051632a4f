"""Round-reduced PRESENT-64/80.

r rounds apply addRoundKey(K_i), sBoxLayer, pLayer for i = 1..r and finish
with addRoundKey(K_{r+1}), so r=31 is the full published cipher and r=0
degenerates to p ^ K_1.  Keys are 80-bit ints.
"""

from __future__ import annotations

import numpy as np

from ..errors import RoundRangeError, ShapeError

BLOCK_BITS = 64
KEY_BITS = 80
MAX_ROUNDS = 31

SBOX = (0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD, 0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2)

# Bit i of the state moves to PLAYER[i] (LSB-0 indexing): 16*i mod 63.
PLAYER = tuple(16 * i % 63 if i < 63 else 63 for i in range(64))

_M64 = (1 << 64) - 1
_M80 = (1 << 80) - 1


def _sbox_layer(x: int) -> int:
    out = 0
    for i in range(0, 64, 4):
        out |= SBOX[(x >> i) & 0xF] << i
    return out


def _p_layer(x: int) -> int:
    out = 0
    for i in range(64):
        out |= ((x >> i) & 1) << PLAYER[i]
    return out


def round_keys(key: int, rounds: int) -> list[int]:
    """Round keys K_1 .. K_{rounds+1} from the 80-bit key register."""
    state = key
    keys = []
    for i in range(1, rounds + 2):
        keys.append(state >> 16)
        state = ((state << 61) | (state >> 19)) & _M80
        state = (SBOX[state >> 76] << 76) | (state & ((1 << 76) - 1))
        state ^= i << 15
    return keys


def check_rounds(rounds: int) -> None:
    if not 0 <= rounds <= MAX_ROUNDS:
        raise RoundRangeError(f"PRESENT supports 0..{MAX_ROUNDS} rounds, got {rounds}")


def encrypt(key: int, block: int, rounds: int) -> int:
    check_rounds(rounds)
    if not 0 <= block < 1 << 64:
        raise ShapeError("PRESENT block must be a 64-bit value")
    if not 0 <= key < 1 << 80:
        raise ShapeError("PRESENT key must be an 80-bit value")
    keys = round_keys(key, rounds)
    state = block
    for i in range(rounds):
        state = _p_layer(_sbox_layer(state ^ keys[i]))
    return state ^ keys[rounds]


def encrypt_from(key: int, state: int, done: int, extra: int) -> int:
    """Resume after `done` rounds; equals encrypt(key, p, done + extra)."""
    check_rounds(done + extra)
    keys = round_keys(key, done + extra)
    x = state ^ keys[done]  # strip the whitening applied after round `done`
    for i in range(done, done + extra):
        x = _p_layer(_sbox_layer(x ^ keys[i]))
    return x ^ keys[done + extra]


# --- vectorized path -------------------------------------------------------

_U64NP = np.uint64
_SBOX_NP = np.array(SBOX, dtype=np.uint64)


def _sbox_layer_batch(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    for i in range(0, 64, 4):
        out |= _SBOX_NP[((x >> _U64NP(i)) & _U64NP(0xF))] << _U64NP(i)
    return out


def _p_layer_batch(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    for i in range(64):
        out |= ((x >> _U64NP(i)) & _U64NP(1)) << _U64NP(PLAYER[i])
    return out


def round_keys_batch(keys: np.ndarray, rounds: int) -> list[np.ndarray]:
    """Round keys for (n, 2) little-endian uint64 limb keys (limb 1 = top 16 bits)."""
    keys = np.asarray(keys, dtype=_U64NP)
    lo = keys[:, 0].copy()
    hi = keys[:, 1] & _U64NP(0xFFFF)
    out = []
    for i in range(1, rounds + 2):
        out.append((hi << _U64NP(48)) | (lo >> _U64NP(16)))
        # rotate the 80-bit register left by 61
        new_lo = (hi << _U64NP(45)) | (lo >> _U64NP(19)) | ((lo & _U64NP(0x7)) << _U64NP(61))
        new_hi = (lo >> _U64NP(3)) & _U64NP(0xFFFF)
        hi = (_SBOX_NP[new_hi >> _U64NP(12)] << _U64NP(12)) | (new_hi & _U64NP(0x0FFF))
        lo = new_lo ^ _U64NP(i << 15)
    return out


def encrypt_batch(keys: np.ndarray, blocks: np.ndarray, rounds: int) -> np.ndarray:
    """encrypt() over (n, 2) key limbs and (n,) uint64 blocks."""
    check_rounds(rounds)
    state = np.asarray(blocks, dtype=_U64NP).copy()
    ks = round_keys_batch(keys, rounds)
    for i in range(rounds):
        state = _p_layer_batch(_sbox_layer_batch(state ^ ks[i]))
    return state ^ ks[rounds]
