"""Bit-exact round-reduced block ciphers: DES, Chaskey, PRESENT-64/80.

All operations are pure functions; scalar entry points take plain ints,
the batch entry points take numpy uint64 limb arrays (little-endian limbs,
limb 0 = low 64 bits) and are bit-identical to the scalar path.
"""

from __future__ import annotations

import enum

import numpy as np

from ..errors import ShapeError
from . import chaskey, des, present


class CipherId(enum.Enum):
    DES = "des"
    CHASKEY = "chaskey"
    PRESENT = "present"

    @classmethod
    def parse(cls, name: str) -> "CipherId":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ShapeError(f"unknown cipher {name!r}; expected one of "
                             f"{[c.value for c in cls]}") from None


_MODULES = {CipherId.DES: des, CipherId.CHASKEY: chaskey, CipherId.PRESENT: present}

BLOCK_BITS = {c: _MODULES[c].BLOCK_BITS for c in CipherId}
KEY_BITS = {c: _MODULES[c].KEY_BITS for c in CipherId}
MAX_ROUNDS = {c: _MODULES[c].MAX_ROUNDS for c in CipherId}

# Stable one-byte ids for the on-disk header.
WIRE_ID = {CipherId.DES: 1, CipherId.CHASKEY: 2, CipherId.PRESENT: 3}
FROM_WIRE = {v: k for k, v in WIRE_ID.items()}


def block_limbs(cipher: CipherId) -> int:
    return BLOCK_BITS[cipher] // 64


def key_limbs(cipher: CipherId) -> int:
    return -(-KEY_BITS[cipher] // 64)


def key_mask(cipher: CipherId) -> np.ndarray:
    """Per-limb AND mask truncating drawn words to the key width."""
    kw = key_limbs(cipher)
    top = KEY_BITS[cipher] - 64 * (kw - 1)
    mask = np.full(kw, 0xFFFFFFFFFFFFFFFF, dtype=np.uint64)
    mask[-1] = np.uint64((1 << top) - 1)
    return mask


def encrypt(cipher: CipherId, key: int, block: int, rounds: int) -> int:
    """Dispatch to the cipher-specific scalar encryption."""
    mod = _MODULES[cipher]
    if not 0 <= block < 1 << mod.BLOCK_BITS:
        raise ShapeError(f"{cipher.value} block must fit in {mod.BLOCK_BITS} bits")
    if not 0 <= key < 1 << mod.KEY_BITS:
        raise ShapeError(f"{cipher.value} key must fit in {mod.KEY_BITS} bits")
    return mod.encrypt(key, block, rounds)


def encrypt_resume(cipher: CipherId, key: int, state: int, done: int, extra: int) -> int:
    """Continue a partial encryption; encrypt(c,k,p,a+b) == resume of encrypt(c,k,p,a)."""
    return _MODULES[cipher].encrypt_from(key, state, done, extra)


def encrypt_batch(cipher: CipherId, keys: np.ndarray, blocks: np.ndarray,
                  rounds: int) -> np.ndarray:
    """Vectorized encryption on (n, limbs) uint64 arrays.

    keys: (n, key_limbs(cipher)); blocks: (n, block_limbs(cipher)); returns
    ciphertext limbs of the same shape as blocks.
    """
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    blocks = np.ascontiguousarray(blocks, dtype=np.uint64)
    if keys.ndim != 2 or keys.shape[1] != key_limbs(cipher):
        raise ShapeError(f"expected key limbs shape (n, {key_limbs(cipher)})")
    if blocks.ndim != 2 or blocks.shape[1] != block_limbs(cipher):
        raise ShapeError(f"expected block limbs shape (n, {block_limbs(cipher)})")
    if keys.shape[0] != blocks.shape[0]:
        raise ShapeError("key and block batches differ in length")
    if cipher is CipherId.DES:
        return des.encrypt_batch(keys[:, 0], blocks[:, 0], rounds)[:, None]
    if cipher is CipherId.CHASKEY:
        return chaskey.encrypt_batch(keys, blocks, rounds)
    return present.encrypt_batch(keys, blocks[:, 0], rounds)[:, None]


def int_to_limbs(value: int, bits: int) -> np.ndarray:
    """Little-endian uint64 limbs of an integer."""
    n = -(-bits // 64)
    return np.array([(value >> (64 * i)) & ((1 << 64) - 1) for i in range(n)],
                    dtype=np.uint64)


def limbs_to_int(limbs: np.ndarray) -> int:
    value = 0
    for i, limb in enumerate(np.asarray(limbs).tolist()):
        value |= int(limb) << (64 * i)
    return value
