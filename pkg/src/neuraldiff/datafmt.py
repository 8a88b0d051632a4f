"""Bit-exact on-disk dataset and prediction formats.

This is the only contract between the generator and the trainer; byte
layouts are frozen in docs/format.md.  Dataset files are "NDW1": a fixed
header, then one label byte per group, then the packed group tensors.
Prediction files are "NDP1": a count, then float32 probabilities.
"""

from __future__ import annotations

import os
import struct
import threading
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .ciphers import BLOCK_BITS, FROM_WIRE, WIRE_ID, CipherId
from .errors import (AlignmentError, FormatError, PredictionRangeError,
                     TruncationError)

MAGIC_DATA = b"NDW1"
MAGIC_PRED = b"NDP1"

_FIXED = struct.Struct("<4sBBHHHQQ")  # magic, cipher, rounds, m, omega, L, groups, seed


@dataclass(frozen=True)
class DatasetHeader:
    cipher: CipherId
    rounds: int
    m: int
    omega: int
    block_bits: int
    group_count: int
    seed: int
    delta: int

    def __post_init__(self):
        if self.block_bits != BLOCK_BITS[self.cipher]:
            raise FormatError(f"block_bits {self.block_bits} does not match "
                              f"{self.cipher.value}")
        if self.omega <= 0 or (2 * self.block_bits) % self.omega != 0:
            raise FormatError(f"omega {self.omega} must divide 2L = {2 * self.block_bits}")
        if self.m < 1:
            raise FormatError("m must be >= 1")
        if self.group_count < 0:
            raise FormatError("group_count must be >= 0")
        if not 0 < self.delta < 1 << self.block_bits:
            raise FormatError("delta must be a nonzero L-bit value")
        if not 0 <= self.seed < 1 << 64:
            raise FormatError("seed must fit in 64 bits")
        if not 0 <= self.rounds < 256:
            raise FormatError("rounds must fit in one byte")

    @property
    def units(self) -> int:
        return 2 * self.block_bits // self.omega

    @property
    def group_bits(self) -> int:
        return self.m * 2 * self.block_bits

    @property
    def group_bytes(self) -> int:
        return (self.group_bits + 7) // 8

    @property
    def header_bytes(self) -> int:
        return _FIXED.size + self.block_bits // 8

    @property
    def body_bytes(self) -> int:
        return self.group_count * (1 + self.group_bytes)

    def labels_offset(self) -> int:
        return self.header_bytes

    def tensors_offset(self) -> int:
        return self.header_bytes + self.group_count

    def pack(self) -> bytes:
        fixed = _FIXED.pack(MAGIC_DATA, WIRE_ID[self.cipher], self.rounds,
                            self.m, self.omega, self.block_bits,
                            self.group_count, self.seed)
        return fixed + self.delta.to_bytes(self.block_bits // 8, "big")

    @classmethod
    def unpack(cls, raw: bytes) -> "DatasetHeader":
        if len(raw) < _FIXED.size:
            raise TruncationError(f"header needs {_FIXED.size} bytes, file has {len(raw)}")
        magic, wire, rounds, m, omega, bits, groups, seed = _FIXED.unpack_from(raw)
        if magic != MAGIC_DATA:
            raise FormatError(f"bad magic {magic!r}, expected {MAGIC_DATA!r}")
        if wire not in FROM_WIRE:
            raise FormatError(f"unknown cipher id {wire}")
        if len(raw) < _FIXED.size + bits // 8:
            raise TruncationError("header truncated inside delta field")
        delta = int.from_bytes(raw[_FIXED.size:_FIXED.size + bits // 8], "big")
        return cls(FROM_WIRE[wire], rounds, m, omega, bits, groups, seed, delta)


@dataclass
class LabeledGroup:
    label: int
    tensor: np.ndarray  # (m, omega, units) uint8 of 0/1


def pack_tensor(tensor: np.ndarray) -> bytes:
    """Pack a (m, omega, units) bit tensor MSB-first in iteration order."""
    return np.packbits(np.asarray(tensor, dtype=np.uint8).reshape(-1)).tobytes()


def unpack_tensor(raw: bytes, header: DatasetHeader) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), count=header.group_bits)
    return bits.reshape(header.m, header.omega, header.units)


class DatasetWriter:
    """Region-addressed writer; chunks may arrive in any order.

    The file layout is fixed by the header, so concurrent producers can
    write disjoint group ranges without coordination beyond the lock here.
    """

    def __init__(self, path: str | os.PathLike, header: DatasetHeader):
        self.header = header
        self._fh = open(path, "wb")
        self._fh.write(header.pack())
        # reserve the body so out-of-order chunk writes always fit
        if header.group_count:
            self._fh.seek(header.labels_offset() + header.body_bytes - 1)
            self._fh.write(b"\0")
        self._written = 0
        self._lock = threading.Lock()

    def write_chunk(self, start: int, labels: bytes | np.ndarray, packed: bytes) -> None:
        labels = np.asarray(bytearray(labels) if isinstance(labels, bytes) else labels,
                            dtype=np.uint8)
        count = len(labels)
        if start + count > self.header.group_count:
            raise FormatError("chunk exceeds declared group_count")
        if len(packed) != count * self.header.group_bytes:
            raise FormatError("packed chunk length does not match label count")
        tensor_off = self.header.tensors_offset() + start * self.header.group_bytes
        with self._lock:
            try:
                self._fh.seek(self.header.labels_offset() + start)
                self._fh.write(labels.tobytes())
                self._fh.seek(tensor_off)
                self._fh.write(packed)
            except OSError as exc:
                raise OSError(f"writing groups [{start}, {start + count}) near "
                              f"byte offset {tensor_off}: {exc}") from exc
            self._written += count

    def close(self) -> None:
        short = self.header.group_count - self._written
        self._fh.close()
        if short > 0:
            raise TruncationError(f"group stream ended {short} groups early "
                                  f"({self._written}/{self.header.group_count})")
        if short < 0:
            raise FormatError("more groups written than the header declares")

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.close()
        else:
            self._fh.close()


def write_dataset(path: str | os.PathLike, header: DatasetHeader,
                  groups: Iterable[LabeledGroup]) -> None:
    """Write groups sequentially; raises TruncationError on a short stream."""
    with DatasetWriter(path, header) as w:
        for i, group in enumerate(groups):
            if group.tensor.shape != (header.m, header.omega, header.units):
                raise FormatError(f"group {i} tensor shape {group.tensor.shape} does not "
                                  f"match header {(header.m, header.omega, header.units)}")
            w.write_chunk(i, bytes([group.label]), pack_tensor(group.tensor))


class DatasetReader:
    """Random access plus constant-memory streaming over a dataset file."""

    def __init__(self, path: str | os.PathLike):
        self.path = os.fspath(path)
        self._fh = open(path, "rb")
        probe = self._fh.read(_FIXED.size + 16)
        self.header = DatasetHeader.unpack(probe)
        expected = self.header.header_bytes + self.header.body_bytes
        actual = os.fstat(self._fh.fileno()).st_size
        if actual < expected:
            raise TruncationError(f"file has {actual} bytes, header declares {expected}")
        if actual > expected:
            raise FormatError(f"file has {actual} bytes, header declares {expected}; "
                              "trailing data")
        self._labels: np.ndarray | None = None

    def labels(self) -> np.ndarray:
        if self._labels is None:
            self._fh.seek(self.header.labels_offset())
            raw = self._fh.read(self.header.group_count)
            arr = np.frombuffer(raw, dtype=np.uint8)
            bad = np.flatnonzero(arr > 1)
            if bad.size:
                raise FormatError(f"label at group {int(bad[0])} is {int(arr[bad[0]])}, "
                                  "expected 0 or 1")
            self._labels = arr
        return self._labels

    def group_packed(self, index: int) -> bytes:
        if not 0 <= index < self.header.group_count:
            raise IndexError(index)
        self._fh.seek(self.header.tensors_offset() + index * self.header.group_bytes)
        return self._fh.read(self.header.group_bytes)

    def group(self, index: int) -> LabeledGroup:
        return LabeledGroup(int(self.labels()[index]),
                            unpack_tensor(self.group_packed(index), self.header))

    def iter_groups(self) -> Iterator[LabeledGroup]:
        for i in range(self.header.group_count):
            yield self.group(i)

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_dataset(path: str | os.PathLike) -> tuple[DatasetHeader, Iterator[LabeledGroup]]:
    reader = DatasetReader(path)
    return reader.header, reader.iter_groups()


def write_predictions(path: str | os.PathLike, values: np.ndarray) -> None:
    values = np.asarray(values, dtype=np.float32)
    if values.ndim != 1:
        raise FormatError("predictions must be a flat array")
    if values.size and (np.min(values) < 0.0 or np.max(values) > 1.0):
        raise PredictionRangeError("predictions must lie in [0, 1]")
    with open(path, "wb") as fh:
        fh.write(MAGIC_PRED)
        fh.write(struct.pack("<Q", values.size))
        fh.write(values.astype("<f4").tobytes())


def read_predictions(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(12)
        if len(head) < 12:
            raise TruncationError(f"prediction header needs 12 bytes, file has {len(head)}")
        if head[:4] != MAGIC_PRED:
            raise FormatError(f"bad magic {head[:4]!r}, expected {MAGIC_PRED!r}")
        (count,) = struct.unpack("<Q", head[4:])
        raw = fh.read()
    if len(raw) != 4 * count:
        raise TruncationError(f"prediction body has {len(raw)} bytes, "
                              f"header declares {4 * count}")
    values = np.frombuffer(raw, dtype="<f4")
    if values.size and (np.min(values) < 0.0 or np.max(values) > 1.0):
        raise PredictionRangeError("prediction outside [0, 1]")
    return values


def check_alignment(header: DatasetHeader, predictions: np.ndarray) -> None:
    if predictions.size != header.group_count:
        raise AlignmentError(f"dataset has {header.group_count} groups but "
                             f"{predictions.size} predictions were supplied")
