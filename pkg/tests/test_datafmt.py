import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neuraldiff.ciphers import BLOCK_BITS, CipherId
from neuraldiff.datafmt import (DatasetHeader, DatasetReader, LabeledGroup,
                                check_alignment, pack_tensor, read_dataset,
                                read_predictions, unpack_tensor, write_dataset,
                                write_predictions)
from neuraldiff.errors import (AlignmentError, FormatError,
                               PredictionRangeError, TruncationError)


def _header(cipher=CipherId.DES, rounds=3, m=2, omega=4, groups=1, seed=1,
            delta=None):
    return DatasetHeader(cipher, rounds, m, omega, BLOCK_BITS[cipher], groups,
                         seed, delta if delta is not None else 0x9)


def _random_groups(header, n, seed=0):
    rng = np.random.default_rng(seed)
    return [LabeledGroup(int(rng.integers(0, 2)),
                         rng.integers(0, 2, size=(header.m, header.omega,
                                                  header.units)).astype(np.uint8))
            for _ in range(n)]


def test_single_zero_group_roundtrip(tmp_path):
    header = _header()
    zeros = LabeledGroup(0, np.zeros((2, 4, 32), dtype=np.uint8))
    path = tmp_path / "d.bin"
    write_dataset(path, header, [zeros])
    got_header, groups = read_dataset(path)
    got = next(iter(groups))
    assert got_header == header
    assert got.label == 0
    assert np.array_equal(got.tensor, zeros.tensor)


@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_random_roundtrip_property(data, tmp_path_factory):
    cipher = data.draw(st.sampled_from(list(CipherId)))
    m = data.draw(st.sampled_from([1, 2, 4, 8, 16]))
    omega = data.draw(st.sampled_from([d for d in (1, 2, 4, 8, 16, 32, 64)
                                       if (2 * BLOCK_BITS[cipher]) % d == 0]))
    n = data.draw(st.integers(1, 6))
    header = DatasetHeader(cipher, data.draw(st.integers(0, 16)), m, omega,
                           BLOCK_BITS[cipher], n,
                           data.draw(st.integers(0, (1 << 64) - 1)),
                           data.draw(st.integers(1, (1 << BLOCK_BITS[cipher]) - 1)))
    groups = _random_groups(header, n, seed=data.draw(st.integers(0, 999)))
    path = tmp_path_factory.mktemp("fmt") / "d.bin"
    write_dataset(path, header, groups)
    with DatasetReader(path) as reader:
        assert reader.header == header
        for want, got in zip(groups, reader.iter_groups()):
            assert got.label == want.label
            assert np.array_equal(got.tensor, want.tensor)


def test_pack_unpack_inverse():
    header = _header(m=4)
    rng = np.random.default_rng(5)
    tensor = rng.integers(0, 2, size=(4, 4, 32)).astype(np.uint8)
    assert np.array_equal(unpack_tensor(pack_tensor(tensor), _header(m=4)), tensor)


def test_bulk_roundtrip(tmp_path):
    header = _header(cipher=CipherId.CHASKEY, omega=32, m=8, groups=1000)
    groups = _random_groups(header, 1000, seed=3)
    path = tmp_path / "bulk.bin"
    write_dataset(path, header, groups)
    with DatasetReader(path) as reader:
        for i in (0, 499, 999):
            assert np.array_equal(reader.group(i).tensor, groups[i].tensor)


def test_omega_must_divide_2l():
    with pytest.raises(FormatError):
        _header(omega=3)


def test_bad_magic(tmp_path):
    header = _header()
    path = tmp_path / "d.bin"
    write_dataset(path, header, _random_groups(header, 1))
    raw = bytearray(path.read_bytes())
    raw[:4] = b"XXXX"
    path.write_bytes(raw)
    with pytest.raises(FormatError):
        DatasetReader(path)


def test_truncated_body(tmp_path):
    header = _header(groups=3)
    path = tmp_path / "d.bin"
    write_dataset(path, header, _random_groups(header, 3))
    raw = path.read_bytes()
    path.write_bytes(raw[:-5])
    with pytest.raises(TruncationError) as err:
        DatasetReader(path)
    assert str(len(raw) - 5) in str(err.value) and str(len(raw)) in str(err.value)


def test_trailing_garbage(tmp_path):
    header = _header()
    path = tmp_path / "d.bin"
    write_dataset(path, header, _random_groups(header, 1))
    path.write_bytes(path.read_bytes() + b"\0")
    with pytest.raises(FormatError):
        DatasetReader(path)


def test_short_stream(tmp_path):
    header = _header(groups=5)
    with pytest.raises(TruncationError):
        write_dataset(tmp_path / "d.bin", header, _random_groups(header, 3))


def test_bad_label_byte(tmp_path):
    header = _header()
    path = tmp_path / "d.bin"
    write_dataset(path, header, _random_groups(header, 1))
    raw = bytearray(path.read_bytes())
    raw[header.labels_offset()] = 2
    path.write_bytes(raw)
    with pytest.raises(FormatError):
        DatasetReader(path).labels()


def test_predictions_exact_values(tmp_path):
    path = tmp_path / "p.bin"
    write_predictions(path, np.array([0.0, 0.5, 1.0], dtype=np.float32))
    assert read_predictions(path).tolist() == [0.0, 0.5, 1.0]


def test_predictions_out_of_range(tmp_path):
    path = tmp_path / "p.bin"
    with pytest.raises(PredictionRangeError):
        write_predictions(path, np.array([0.2, 1.5]))
    # craft a file that lies about its range
    import struct
    path.write_bytes(b"NDP1" + struct.pack("<Q", 1) +
                     np.array([1.5], dtype="<f4").tobytes())
    with pytest.raises(PredictionRangeError):
        read_predictions(path)


def test_predictions_truncated(tmp_path):
    import struct
    path = tmp_path / "p.bin"
    path.write_bytes(b"NDP1" + struct.pack("<Q", 4) +
                     np.zeros(2, dtype="<f4").tobytes())
    with pytest.raises(TruncationError):
        read_predictions(path)


def test_alignment_check():
    header = _header(groups=3)
    with pytest.raises(AlignmentError):
        check_alignment(header, np.zeros(2, dtype=np.float32))
    check_alignment(header, np.zeros(3, dtype=np.float32))
