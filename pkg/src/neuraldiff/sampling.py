"""Labeled multi-ciphertext-pair sample generation.

A group is m plaintext pairs under one key.  With label 1 the second
plaintext of every pair is P0 xor delta; with label 0 it is drawn fresh
and uniform (accidental collisions with delta are not filtered; they occur
with probability m * 2^-L per group and are tolerated).  Both plaintexts
are encrypted for the requested rounds and the m ciphertext pairs are
arranged into an (m, omega, 2L/omega) bit tensor.

Everything is a pure function of (seed, group index): the scalar path
(generate_group) and the vectorized path (generate_chunk) consume the
exact same Philox word stream and are bit-identical, which is what makes
order- and worker-count-independent parallel generation possible.  The
draw layout is frozen in docs/format.md.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import rng
from .ciphers import (BLOCK_BITS, MAX_ROUNDS, CipherId, block_limbs, encrypt,
                      encrypt_batch, int_to_limbs, key_limbs, key_mask,
                      limbs_to_int)
from .datafmt import DatasetHeader, DatasetWriter, LabeledGroup, pack_tensor
from .errors import RoundRangeError, ShapeError

GROUP_SIZES = (1, 2, 4, 8, 16)

DEFAULT_OMEGA = {CipherId.DES: 4, CipherId.CHASKEY: 32, CipherId.PRESENT: 4}

# Plaintext differences the distinguishers are trained against.
# DES: (L, R) halves; Chaskey: words (v0, v1, v2, v3); PRESENT: low nibble 9.
DEFAULT_DELTA = {
    CipherId.DES: (0x40080000 << 32) | 0x04000000,
    CipherId.CHASKEY: (0x8400 << 96) | (0x0400 << 64),
    CipherId.PRESENT: 0x9,
}

# Stream index reserved for the shared-key ablation (never a group index).
SHARED_KEY_INDEX = (1 << 64) - 1

_CHUNK = 4096


@dataclass(frozen=True)
class TensorLayout:
    m: int
    omega: int
    units: int


@dataclass(frozen=True)
class GenSpec:
    cipher: CipherId
    rounds: int
    m: int
    group_count: int
    seed: int
    delta: int | None = None
    omega: int | None = None
    fresh_key_per_group: bool = True

    def __post_init__(self):
        if self.m not in GROUP_SIZES:
            raise ShapeError(f"group size m must be one of {GROUP_SIZES}, got {self.m}")
        if not 0 <= self.rounds <= MAX_ROUNDS[self.cipher]:
            raise RoundRangeError(f"{self.cipher.value} supports 0.."
                                  f"{MAX_ROUNDS[self.cipher]} rounds, got {self.rounds}")
        if self.group_count < 1:
            raise ShapeError("group_count must be >= 1")
        if self.delta is None:
            object.__setattr__(self, "delta", DEFAULT_DELTA[self.cipher])
        if self.omega is None:
            object.__setattr__(self, "omega", DEFAULT_OMEGA[self.cipher])
        L = BLOCK_BITS[self.cipher]
        if not 0 < self.delta < 1 << L:
            raise ShapeError("delta must be a nonzero L-bit value")
        if (2 * L) % self.omega != 0:
            raise ShapeError(f"omega {self.omega} must divide {2 * L}")
        if not 0 <= self.seed < 1 << 64:
            raise ShapeError("seed must fit in 64 bits")
        if self.group_count > SHARED_KEY_INDEX:
            raise ShapeError("group_count exhausts the index space")

    @property
    def block_bits(self) -> int:
        return BLOCK_BITS[self.cipher]

    @property
    def layout(self) -> TensorLayout:
        return TensorLayout(self.m, self.omega, 2 * self.block_bits // self.omega)

    @property
    def words_per_group(self) -> int:
        # label word, key limbs, then (P0, P1) limbs per pair
        return 1 + key_limbs(self.cipher) + 2 * self.m * block_limbs(self.cipher)

    def header(self) -> DatasetHeader:
        return DatasetHeader(self.cipher, self.rounds, self.m, self.omega,
                             self.block_bits, self.group_count, self.seed, self.delta)


# --- tensor arrangement ----------------------------------------------------

def arrange_tensor(pairs: list[tuple[int, int]], layout: TensorLayout,
                   block_bits: int) -> np.ndarray:
    """Arrange m ciphertext pairs into an (m, omega, units) bit tensor.

    Per pair, the 2L-bit string C0 || C1 (MSB first) is split into `units`
    consecutive omega-bit units; tensor[g][b][u] is bit b (MSB first) of
    unit u.
    """
    if layout.omega * layout.units != 2 * block_bits:
        raise ShapeError("layout does not cover 2L bits")
    if len(pairs) != layout.m:
        raise ShapeError(f"expected {layout.m} pairs, got {len(pairs)}")
    out = np.empty((layout.m, layout.omega, layout.units), dtype=np.uint8)
    for g, (c0, c1) in enumerate(pairs):
        value = (c0 << block_bits) | c1
        bits = np.array([(value >> (2 * block_bits - 1 - i)) & 1
                         for i in range(2 * block_bits)], dtype=np.uint8)
        out[g] = bits.reshape(layout.units, layout.omega).T
    return out


def un_arrange(tensor: np.ndarray, block_bits: int) -> list[tuple[int, int]]:
    """Inverse of arrange_tensor."""
    m = tensor.shape[0]
    pairs = []
    for g in range(m):
        bits = tensor[g].T.reshape(-1)
        value = 0
        for b in bits.tolist():
            value = (value << 1) | int(b)
        pairs.append((value >> block_bits, value & ((1 << block_bits) - 1)))
    return pairs


def _limbs_to_bits(limbs: np.ndarray, bits: int) -> np.ndarray:
    """(n, limbs) little-endian uint64 -> (n, bits) MSB-first bit array."""
    n, nl = limbs.shape
    shifts = np.arange(56, -8, -8, dtype=np.uint64)
    by = ((limbs[:, ::-1, None] >> shifts) & np.uint64(0xFF)).astype(np.uint8)
    return np.unpackbits(by.reshape(n, nl * 8), axis=1)[:, -bits:]


def _arrange_batch(c0: np.ndarray, c1: np.ndarray, layout: TensorLayout,
                   block_bits: int) -> np.ndarray:
    """(n*m, limbs) ciphertext limb pairs -> (n, m, omega, units) bit tensor."""
    both = np.concatenate([_limbs_to_bits(c0, block_bits),
                           _limbs_to_bits(c1, block_bits)], axis=1)
    n = both.shape[0] // layout.m
    grid = both.reshape(n, layout.m, layout.units, layout.omega)
    return np.ascontiguousarray(grid.transpose(0, 1, 3, 2))


# --- draw layout -----------------------------------------------------------

def shared_key_limbs(spec: GenSpec) -> np.ndarray:
    kw = key_limbs(spec.cipher)
    words = rng.stream_words(spec.seed, np.array([SHARED_KEY_INDEX], dtype=np.uint64),
                             1 + kw)
    return words[0, 1:1 + kw] & key_mask(spec.cipher)


def generate_group(spec: GenSpec, index: int) -> LabeledGroup:
    """Scalar reference generation of one group (used by verify)."""
    if not 0 <= index < spec.group_count:
        raise ShapeError(f"group index {index} out of range")
    L = BLOCK_BITS[spec.cipher]
    kw, pw = key_limbs(spec.cipher), block_limbs(spec.cipher)
    words = rng.stream_words_scalar(spec.seed, index, spec.words_per_group)
    label = words[0] & 1
    if spec.fresh_key_per_group:
        key = limbs_to_int(np.array(words[1:1 + kw], dtype=np.uint64)
                           & key_mask(spec.cipher))
    else:
        key = limbs_to_int(shared_key_limbs(spec))
    pairs = []
    pos = 1 + kw
    for _ in range(spec.m):
        p0 = limbs_to_int(np.array(words[pos:pos + pw], dtype=np.uint64))
        p1 = limbs_to_int(np.array(words[pos + pw:pos + 2 * pw], dtype=np.uint64))
        pos += 2 * pw
        if label == 1:
            p1 = p0 ^ spec.delta
        pairs.append((encrypt(spec.cipher, key, p0, spec.rounds),
                      encrypt(spec.cipher, key, p1, spec.rounds)))
    return LabeledGroup(label, arrange_tensor(pairs, spec.layout, L))


def generate_chunk(spec: GenSpec, start: int, count: int) -> tuple[np.ndarray, bytes]:
    """Vectorized generation of groups [start, start+count) -> (labels, packed)."""
    kw, pw = key_limbs(spec.cipher), block_limbs(spec.cipher)
    idx = np.arange(start, start + count, dtype=np.uint64)
    words = rng.stream_words(spec.seed, idx, spec.words_per_group)
    labels = (words[:, 0] & np.uint64(1)).astype(np.uint8)
    if spec.fresh_key_per_group:
        keys = words[:, 1:1 + kw] & key_mask(spec.cipher)
    else:
        keys = np.broadcast_to(shared_key_limbs(spec), (count, kw))
    pair_words = words[:, 1 + kw:].reshape(count, spec.m, 2, pw)
    p0 = pair_words[:, :, 0, :]
    delta_limbs = int_to_limbs(spec.delta, BLOCK_BITS[spec.cipher])
    p1 = np.where((labels == 1)[:, None, None], p0 ^ delta_limbs,
                  pair_words[:, :, 1, :])
    keys_rep = np.repeat(keys, spec.m, axis=0)
    c0 = encrypt_batch(spec.cipher, keys_rep, p0.reshape(-1, pw), spec.rounds)
    c1 = encrypt_batch(spec.cipher, keys_rep, p1.reshape(-1, pw), spec.rounds)
    tensors = _arrange_batch(c0, c1, spec.layout, spec.block_bits)
    packed = np.packbits(tensors.reshape(count, -1), axis=1).tobytes()
    return labels, packed


def group_packed(spec: GenSpec, index: int) -> tuple[int, bytes]:
    """Label and packed bytes of one group via the scalar path."""
    g = generate_group(spec, index)
    return g.label, pack_tensor(g.tensor)


def generate_dataset(spec: GenSpec, path, threads: int = 1,
                     chunk_size: int = _CHUNK) -> dict:
    """Write the dataset for `spec` to `path`; returns a summary dict.

    Output bytes are a pure function of spec: chunk boundaries are fixed by
    chunk_size and each chunk depends only on (seed, group index), so any
    thread count yields the identical file.
    """
    header = spec.header()
    started = time.perf_counter()
    positives = 0
    lock = threading.Lock()
    with DatasetWriter(path, header) as writer:
        starts = range(0, spec.group_count, chunk_size)

        def run(start: int) -> None:
            nonlocal positives
            count = min(chunk_size, spec.group_count - start)
            labels, packed = generate_chunk(spec, start, count)
            writer.write_chunk(start, labels, packed)
            with lock:
                positives += int(labels.sum())

        if threads <= 1:
            for s in starts:
                run(s)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(run, starts))
    elapsed = time.perf_counter() - started
    return {
        "groups": spec.group_count,
        "pairs": spec.group_count * spec.m,
        "positives": positives,
        "positive_fraction": positives / spec.group_count,
        "seconds": elapsed,
        "groups_per_second": spec.group_count / elapsed if elapsed > 0 else float("inf"),
    }


def with_group_count(spec: GenSpec, group_count: int) -> GenSpec:
    return replace(spec, group_count=group_count)
