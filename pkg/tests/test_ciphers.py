import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neuraldiff.ciphers import (BLOCK_BITS, KEY_BITS, MAX_ROUNDS, CipherId,
                                chaskey, des, encrypt, encrypt_batch,
                                encrypt_resume, int_to_limbs, key_limbs,
                                limbs_to_int, present)
from neuraldiff.errors import RoundRangeError, ShapeError

from conftest import load_vectors
from full_des import full_des_encrypt

M64 = (1 << 64) - 1


# --- golden vectors ---------------------------------------------------------

@pytest.mark.parametrize("key,pt,rounds,ct", load_vectors("des_full.txt"))
def test_des_full_cipher_vectors(key, pt, rounds, ct):
    assert rounds == 16
    assert full_des_encrypt(key, pt) == ct


@pytest.mark.parametrize("key,pt,rounds,ct", load_vectors("present_full.txt"))
def test_present_vectors(key, pt, rounds, ct):
    assert present.encrypt(key, pt, rounds) == ct


@pytest.mark.parametrize("key,pt,rounds,ct", load_vectors("chaskey_round1.txt"))
def test_chaskey_vectors(key, pt, rounds, ct):
    assert chaskey.encrypt(key, pt, rounds) == ct


def test_present_round1_hand_value():
    # S/P of the zero state whitened with the second round key
    assert present.encrypt(0, 0, 1) == 0x3FFFFFFF00000000


# --- zero rounds ------------------------------------------------------------

@given(key=st.integers(0, M64), block=st.integers(0, M64))
def test_des_zero_rounds_is_identity(key, block):
    assert des.encrypt(key, block, 0) == block


@given(key=st.integers(0, (1 << 128) - 1), block=st.integers(0, (1 << 128) - 1))
def test_chaskey_zero_rounds_is_identity(key, block):
    assert chaskey.encrypt(key, block, 0) == block


@given(key=st.integers(0, (1 << 80) - 1), block=st.integers(0, M64))
def test_present_zero_rounds_is_first_whitening(key, block):
    assert present.encrypt(key, block, 0) == block ^ present.round_keys(key, 0)[0]


def test_dispatch_zero_rounds():
    assert encrypt(CipherId.DES, 5, 77, 0) == 77
    assert encrypt(CipherId.CHASKEY, 5, 77, 0) == 77


# --- structural properties --------------------------------------------------

@given(key=st.integers(0, M64), block=st.integers(0, M64), rounds=st.integers(1, 16))
@settings(max_examples=40)
def test_des_complementation(key, block, rounds):
    lhs = des.encrypt(key ^ M64, block ^ M64, rounds)
    assert lhs == des.encrypt(key, block, rounds) ^ M64


def test_des_parity_bits_ignored():
    key, block = 0x133457799BBCDFF1, 0x0123456789ABCDEF
    parity_mask = 0x0101010101010101
    for rounds in (1, 7, 16):
        assert des.encrypt(key, block, rounds) == \
            des.encrypt(key ^ parity_mask, block, rounds)


@pytest.mark.parametrize("cipher", list(CipherId))
def test_zero_difference_preserved(cipher):
    key = 0x1234 & ((1 << KEY_BITS[cipher]) - 1)
    block = 0x9876543210 & ((1 << BLOCK_BITS[cipher]) - 1)
    for rounds in (0, 1, MAX_ROUNDS[cipher]):
        assert encrypt(cipher, key, block, rounds) == encrypt(cipher, key, block, rounds)


@pytest.mark.parametrize("cipher", list(CipherId))
@given(data=st.data())
@settings(max_examples=30, deadline=None)
def test_round_composition(cipher, data):
    key = data.draw(st.integers(0, (1 << KEY_BITS[cipher]) - 1))
    block = data.draw(st.integers(0, (1 << BLOCK_BITS[cipher]) - 1))
    total = data.draw(st.integers(0, MAX_ROUNDS[cipher]))
    split = data.draw(st.integers(0, total))
    partial = encrypt(cipher, key, block, split)
    resumed = encrypt_resume(cipher, key, partial, split, total - split)
    assert resumed == encrypt(cipher, key, block, total)


# --- error contracts --------------------------------------------------------

@pytest.mark.parametrize("cipher,bad", [
    (CipherId.DES, 17), (CipherId.CHASKEY, 17), (CipherId.PRESENT, 32),
    (CipherId.DES, -1),
])
def test_round_range_rejected(cipher, bad):
    with pytest.raises(RoundRangeError):
        encrypt(cipher, 0, 0, bad)


def test_mismatched_widths_rejected():
    with pytest.raises(ShapeError):
        encrypt(CipherId.DES, 0, 1 << 64, 1)
    with pytest.raises(ShapeError):
        encrypt(CipherId.PRESENT, 1 << 80, 0, 1)
    with pytest.raises(ShapeError):
        encrypt(CipherId.CHASKEY, 0, 1 << 128, 1)
    with pytest.raises(ShapeError):
        CipherId.parse("speck")


# --- vectorized path --------------------------------------------------------

@pytest.mark.parametrize("cipher", list(CipherId))
def test_batch_matches_scalar(cipher):
    rng = np.random.default_rng(2024)
    n = 48
    kw = key_limbs(cipher)
    bw = BLOCK_BITS[cipher] // 64
    keys = rng.integers(0, M64, size=(n, kw), dtype=np.uint64, endpoint=True)
    keys[:, -1] &= np.uint64((1 << (KEY_BITS[cipher] - 64 * (kw - 1))) - 1)
    blocks = rng.integers(0, M64, size=(n, bw), dtype=np.uint64, endpoint=True)
    for rounds in (0, 1, 3, MAX_ROUNDS[cipher]):
        out = encrypt_batch(cipher, keys, blocks, rounds)
        for i in range(0, n, 7):
            expect = encrypt(cipher, limbs_to_int(keys[i]), limbs_to_int(blocks[i]),
                             rounds)
            assert limbs_to_int(out[i]) == expect


def test_batch_shape_validation():
    with pytest.raises(ShapeError):
        encrypt_batch(CipherId.DES, np.zeros((4, 2), dtype=np.uint64),
                      np.zeros((4, 1), dtype=np.uint64), 1)
    with pytest.raises(ShapeError):
        encrypt_batch(CipherId.CHASKEY, np.zeros((4, 2), dtype=np.uint64),
                      np.zeros((3, 2), dtype=np.uint64), 1)


def test_limb_conversion_roundtrip():
    value = 0x0123456789ABCDEF_FEDCBA9876543210
    assert limbs_to_int(int_to_limbs(value, 128)) == value
