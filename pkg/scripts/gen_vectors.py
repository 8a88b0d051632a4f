#!/usr/bin/env python3
"""Regenerate the golden vector files under tests/vectors/.

Every expected value is produced by an oracle that is independent of the
package code paths it later checks:

  * full DES      - pyca/cryptography's TripleDES with K1=K2=K3 (plain DES),
                    plus the classic textbook key/plaintext/ciphertext.
  * PRESENT       - a from-scratch bit-list implementation written against
                    the published cipher description, cross-checked here
                    against the four published all-zero/all-one vectors
                    before anything is emitted.
  * Chaskey       - straight-line evaluation of the eight ARX half-steps
                    (no loops, no shared helpers).
  * PRESENT DDT   - exhaustive enumeration over all 16x16 input pairs.

Vector file format: one vector per line, "key plaintext rounds ciphertext",
key/plaintext/ciphertext in hex, rounds in decimal.  Lines starting with #
are comments.
"""

import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "vectors"


# --- full DES via an independent library ------------------------------------

def des_reference(key: int, pt: int) -> int:
    try:
        from cryptography.hazmat.decrepit.ciphers.algorithms import TripleDES
    except ImportError:  # older library layout
        from cryptography.hazmat.primitives.ciphers.algorithms import TripleDES
    from cryptography.hazmat.primitives.ciphers import Cipher, modes
    enc = Cipher(TripleDES(key.to_bytes(8, "big") * 3), modes.ECB()).encryptor()
    return int.from_bytes(enc.update(pt.to_bytes(8, "big")), "big")


def write_des() -> None:
    classic = (0x133457799BBCDFF1, 0x0123456789ABCDEF, 0x85E813540F0AB405)
    assert des_reference(classic[0], classic[1]) == classic[2]
    rnd = random.Random(20240101)
    rows = [classic]
    for _ in range(7):
        k, p = rnd.getrandbits(64), rnd.getrandbits(64)
        rows.append((k, p, des_reference(k, p)))
    lines = ["# full 16-round DES with IP/FP and final half-swap applied",
             "# key plaintext rounds ciphertext"]
    lines += [f"{k:016x} {p:016x} 16 {c:016x}" for k, p, c in rows]
    (OUT / "des_full.txt").write_text("\n".join(lines) + "\n")


# --- PRESENT via an independent bit-list implementation ----------------------

_SBOX = [0xC, 5, 6, 0xB, 9, 0, 0xA, 0xD, 3, 0xE, 0xF, 8, 4, 7, 1, 2]


def _to_bits(value: int, width: int) -> list[int]:
    return [(value >> i) & 1 for i in range(width)]  # published bit i = index i


def _from_bits(bits: list[int]) -> int:
    return sum(b << i for i, b in enumerate(bits))


def present_reference(key: int, pt: int, rounds: int = 31) -> int:
    kbits = _to_bits(key, 80)
    state = _to_bits(pt, 64)
    for counter in range(1, rounds + 1):
        rk = kbits[16:]  # leftmost 64 bits of the register
        state = [s ^ k for s, k in zip(state, rk)]
        state = _from_bits(state)
        state = _from_bits([b for nib in range(16)
                            for b in _to_bits(_SBOX[(state >> 4 * nib) & 0xF], 4)])
        bits = _to_bits(state, 64)
        permuted = [0] * 64
        for i in range(64):
            permuted[16 * i % 63 if i < 63 else 63] = bits[i]
        state = permuted
        # key register update: rotate left 61, S-box top nibble, xor counter
        kbits = kbits[19:] + kbits[:19]
        top = _from_bits(kbits[76:80])
        kbits[76:80] = _to_bits(_SBOX[top], 4)
        for j in range(5):
            kbits[15 + j] ^= (counter >> j) & 1
    rk = kbits[16:]
    state = [s ^ k for s, k in zip(state, rk)]
    return _from_bits(state)


def write_present() -> None:
    published = [
        (0x00000000000000000000, 0x0000000000000000, 0x5579C1387B228445),
        (0xFFFFFFFFFFFFFFFFFFFF, 0x0000000000000000, 0xE72C46C0F5945049),
        (0x00000000000000000000, 0xFFFFFFFFFFFFFFFF, 0xA112FFC72F68417B),
        (0xFFFFFFFFFFFFFFFFFFFF, 0xFFFFFFFFFFFFFFFF, 0x3333DCD3213210D2),
    ]
    for k, p, c in published:
        assert present_reference(k, p) == c, "independent PRESENT model is wrong"
    rnd = random.Random(20240102)
    rows = [(k, p, 31, c) for k, p, c in published]
    for _ in range(4):
        k, p = rnd.getrandbits(80), rnd.getrandbits(64)
        rows.append((k, p, 31, present_reference(k, p)))
    # the r=1 hand-derived value: S/P of zero state, whitened with K_2
    rows.append((0, 0, 1, present_reference(0, 0, rounds=1)))
    assert rows[-1][3] == 0x3FFFFFFF00000000
    lines = ["# PRESENT-80: r rounds of addRoundKey/sBoxLayer/pLayer plus final addRoundKey",
             "# key plaintext rounds ciphertext"]
    lines += [f"{k:020x} {p:016x} {r} {c:016x}" for k, p, r, c in rows]
    (OUT / "present_full.txt").write_text("\n".join(lines) + "\n")


# --- Chaskey permutation, straight-line --------------------------------------

def chaskey_pi_straightline(v0: int, v1: int, v2: int, v3: int):
    M = 0xFFFFFFFF
    v0 = (v0 + v1) & M
    v1 = ((v1 << 5) | (v1 >> 27)) & M
    v1 = v1 ^ v0
    v0 = ((v0 << 16) | (v0 >> 16)) & M
    v2 = (v2 + v3) & M
    v3 = ((v3 << 8) | (v3 >> 24)) & M
    v3 = v3 ^ v2
    v0 = (v0 + v3) & M
    v3 = ((v3 << 13) | (v3 >> 19)) & M
    v3 = v3 ^ v0
    v2 = (v2 + v1) & M
    v1 = ((v1 << 7) | (v1 >> 25)) & M
    v1 = v1 ^ v2
    v2 = ((v2 << 16) | (v2 >> 16)) & M
    return v0, v1, v2, v3


def write_chaskey() -> None:
    def pack(v):
        return (v[0] << 96) | (v[1] << 64) | (v[2] << 32) | v[3]

    rows = []
    # key 0: ciphertext is exactly one permutation round of the plaintext
    v = (1, 0, 0, 0)
    rows.append((0, pack(v), 1, pack(chaskey_pi_straightline(*v))))
    rnd = random.Random(20240103)
    for _ in range(4):
        v = tuple(rnd.getrandbits(32) for _ in range(4))
        rows.append((0, pack(v), 1, pack(chaskey_pi_straightline(*v))))
    # keyed: xor key in and out around the straight-line round
    for _ in range(3):
        key = rnd.getrandbits(128)
        p = rnd.getrandbits(128)
        x = p ^ key
        words = ((x >> 96) & 0xFFFFFFFF, (x >> 64) & 0xFFFFFFFF,
                 (x >> 32) & 0xFFFFFFFF, x & 0xFFFFFFFF)
        rows.append((key, p, 1, pack(chaskey_pi_straightline(*words)) ^ key))
    lines = ["# Chaskey Even-Mansour, one permutation round",
             "# key plaintext rounds ciphertext"]
    lines += [f"{k:032x} {p:032x} {r} {c:032x}" for k, p, r, c in rows]
    (OUT / "chaskey_round1.txt").write_text("\n".join(lines) + "\n")


# --- PRESENT S-box DDT by exhaustive enumeration -----------------------------

def write_present_ddt() -> None:
    table = [[0] * 16 for _ in range(16)]
    for x in range(16):
        for y in range(16):
            table[x ^ y][_SBOX[x] ^ _SBOX[y]] += 1
    lines = ["# PRESENT S-box difference distribution table, rows = input diff"]
    lines += [" ".join(str(v) for v in row) for row in table]
    (OUT / "present_sbox_ddt.txt").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    write_des()
    write_present()
    write_chaskey()
    write_present_ddt()
    print(f"wrote vectors to {OUT}")
