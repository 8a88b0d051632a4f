"""Classical differential tooling: S-box DDTs and Monte Carlo transition
probabilities, used as oracles for the sampled datasets.

Monte Carlo trials are partitioned into fixed-size chunks; chunk c draws
its keys and plaintexts from the Philox stream (seed, c), so estimates are
deterministic in (trials, seed) and independent of worker count.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import rng
from .ciphers import (BLOCK_BITS, CipherId, block_limbs, des, encrypt_batch,
                      int_to_limbs, key_limbs, key_mask)
from .errors import ShapeError

_TRIAL_CHUNK = 1 << 16


@dataclass(frozen=True)
class TransitionEstimate:
    p_hat: float
    trials: int
    hits: int

    @property
    def std_err(self) -> float:
        return math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.trials)


def sbox_ddt(sbox) -> np.ndarray:
    """Exact difference distribution table by brute force.

    Rows are input differences, columns output differences; table[0][0] is
    the full input-space size and every row sums to it.
    """
    box = list(sbox)
    n = len(box)
    if n < 2 or n & (n - 1):
        raise ShapeError(f"S-box length {n} is not a power of two")
    if any(not isinstance(v, int) or v < 0 for v in box):
        raise ShapeError("S-box entries must be nonnegative integers")
    out_bits = max(max(box).bit_length(), 1)
    table = np.zeros((n, 1 << out_bits), dtype=np.int64)
    for din in range(n):
        for x in range(n):
            table[din][box[x] ^ box[x ^ din]] += 1
    return table


@lru_cache(maxsize=None)
def des_sbox_ddts() -> tuple[np.ndarray, ...]:
    """DDTs of the eight DES S-boxes, indexed by raw 6-bit input."""
    return tuple(sbox_ddt(box) for box in des.SBOX_FLAT)


def _expand_diff(delta32: int) -> list[int]:
    """Per-S-box 6-bit input differences of a 32-bit difference through E."""
    return [des._permute(delta32, 32, des._E) >> (42 - 6 * i) & 0x3F for i in range(8)]


@lru_cache(maxsize=1)
def _inv_p() -> tuple[int, ...]:
    inv = [0] * 32
    for out_pos, in_pos in enumerate(des._P):
        inv[in_pos - 1] = out_pos + 1
    return tuple(inv)


def des_f_diff_prob(din32: int, dout32: int) -> float:
    """Probability the DES round function maps input diff din32 to dout32.

    Computed from the eight S-box DDTs under the per-box independence
    model; exact whenever at most one S-box is active (inactive boxes pass
    a zero difference with probability 1).
    """
    pre_p = des._permute(dout32, 32, _inv_p())
    ddts = des_sbox_ddts()
    prob = 1.0
    for i, din6 in enumerate(_expand_diff(din32)):
        dout4 = (pre_p >> (28 - 4 * i)) & 0xF
        prob *= ddts[i][din6][dout4] / 64.0
    return prob


def des_round_transition_prob(din: int, dout: int) -> float:
    """One full DES round (L,R) -> (L',R') transition probability from DDTs."""
    din_l, din_r = din >> 32, din & 0xFFFFFFFF
    dout_l, dout_r = dout >> 32, dout & 0xFFFFFFFF
    if dout_l != din_r:
        return 0.0
    return des_f_diff_prob(din_r, dout_r ^ din_l)


def _trial_chunks(trials: int):
    full, rem = divmod(trials, _TRIAL_CHUNK)
    for c in range(full):
        yield c, _TRIAL_CHUNK
    if rem:
        yield full, rem


def _sample_diffs(cipher: CipherId, din: int, rounds: int, seed: int,
                  chunk: int, count: int) -> np.ndarray:
    """Output differences for `count` trials of chunk index `chunk`, (n, limbs)."""
    kw, pw = key_limbs(cipher), block_limbs(cipher)
    words = rng.stream_words(seed, np.array([chunk], dtype=np.uint64),
                             _TRIAL_CHUNK * (kw + pw))
    words = words.reshape(_TRIAL_CHUNK, kw + pw)[:count]
    keys = words[:, :kw] & key_mask(cipher)
    p0 = words[:, kw:]
    p1 = p0 ^ int_to_limbs(din, BLOCK_BITS[cipher])
    c0 = encrypt_batch(cipher, keys, p0, rounds)
    c1 = encrypt_batch(cipher, keys, p1, rounds)
    return c0 ^ c1


def mc_transition_prob(cipher: CipherId, din: int, dout: int, rounds: int,
                       trials: int, seed: int, threads: int = 1) -> TransitionEstimate:
    """Monte Carlo estimate of P[diff(din) -> diff(dout)] after `rounds`."""
    if trials < 1:
        raise ShapeError("trials must be >= 1")
    target = int_to_limbs(dout, BLOCK_BITS[cipher])

    def run(args) -> int:
        chunk, count = args
        diffs = _sample_diffs(cipher, din, rounds, seed, chunk, count)
        return int(np.all(diffs == target, axis=1).sum())

    chunks = list(_trial_chunks(trials))
    if threads <= 1:
        hits = sum(run(a) for a in chunks)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(run, chunks))
    return TransitionEstimate(hits / trials, trials, hits)


def rank_output_diffs(cipher: CipherId, din: int, rounds: int, trials: int,
                      seed: int, top_k: int, threads: int = 1) -> list[tuple[int, int]]:
    """Top-k empirical output differences, ties broken by ascending value."""
    if trials < 1:
        raise ShapeError("trials must be >= 1")
    counter: Counter = Counter()
    lock_free_results = []

    def run(args):
        chunk, count = args
        diffs = _sample_diffs(cipher, din, rounds, seed, chunk, count)
        if diffs.shape[1] == 1:
            values, counts = np.unique(diffs[:, 0], return_counts=True)
            return [(int(v), int(c)) for v, c in zip(values, counts)]
        view = np.ascontiguousarray(diffs).view([("lo", np.uint64), ("hi", np.uint64)])
        values, counts = np.unique(view, return_counts=True)
        return [((int(v["hi"]) << 64) | int(v["lo"]), int(c))
                for v, c in zip(values, counts)]

    chunks = list(_trial_chunks(trials))
    if threads <= 1:
        lock_free_results = [run(a) for a in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            lock_free_results = list(pool.map(run, chunks))
    for part in lock_free_results:
        for value, count in part:
            counter[value] += count
    ranked = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:top_k]
