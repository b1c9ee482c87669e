"""Rank/select bit vectors: plain, sparse (Elias-Fano) and run-length (OZ).

Positions are 1-based.  ``rank1(i)`` counts ones in ``[1..i]`` for
``0 <= i <= u``; ``select1(j)`` returns the position of the j-th one.
Every scalar query has a ``*_many`` counterpart that takes an integer
array and answers through one kernel call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _io, kernels
from ._tables import BLOCK_BITS, WORDS_PER_BLOCK
from .errors import ConstructionError, FormatError, RangeError

DEFAULT_SAMPLE_RATE = 512


@dataclass(frozen=True)
class Space:
    """Bit counts of a structure: raw payload plus query directories."""

    payload: int
    directory: int = 0

    @property
    def total(self) -> int:
        return self.payload + self.directory

    def __add__(self, other: "Space") -> "Space":
        return Space(self.payload + other.payload, self.directory + other.directory)


def _width(u: int) -> int:
    return max(1, int(u).bit_length())


def _as_index(x) -> np.ndarray:
    a = np.asarray(x, dtype=np.int64)
    return a.reshape(-1) if a.ndim != 1 else a


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 array LSB-first into uint64 words, padded to whole blocks."""
    u = bits.shape[0]
    nwords = u // 64 + 1
    nwords = -(-nwords // WORDS_PER_BLOCK) * WORDS_PER_BLOCK
    raw = np.packbits(bits.astype(np.uint8), bitorder="little")
    buf = np.zeros(nwords * 8, dtype=np.uint8)
    buf[: raw.shape[0]] = raw
    return buf.view("<u8").astype(np.uint64)


class _BitVector:
    """Scalar query front end shared by all three flavors."""

    u: int
    ones: int

    def __len__(self) -> int:
        return self.u

    @property
    def zeros(self) -> int:
        return self.u - self.ones

    # -- range checks
    def _check_rank(self, idx: np.ndarray) -> None:
        if idx.size and (idx.min() < 0 or idx.max() > self.u):
            raise RangeError(f"rank position outside [0, {self.u}]")

    def _check_access(self, idx: np.ndarray) -> None:
        if idx.size and (idx.min() < 1 or idx.max() > self.u):
            raise RangeError(f"position outside [1, {self.u}]")

    def _check_select(self, js: np.ndarray, limit: int) -> None:
        if js.size and (js.min() < 1 or js.max() > limit):
            raise RangeError(f"select rank outside [1, {limit}]")

    # -- scalar wrappers
    def rank1(self, i: int) -> int:
        return int(self.rank1_many(np.array([i], dtype=np.int64))[0])

    def rank0(self, i: int) -> int:
        return int(i) - self.rank1(i)

    def select1(self, j: int) -> int:
        return int(self.select1_many(np.array([j], dtype=np.int64))[0])

    def access(self, i: int) -> int:
        return int(self.access_many(np.array([i], dtype=np.int64))[0])

    def __getitem__(self, i: int) -> int:
        return self.access(i)

    def rank0_many(self, idx) -> np.ndarray:
        idx = _as_index(idx)
        return idx - self.rank1_many(idx)

    def to_bits(self) -> np.ndarray:
        """Expanded 0/1 array (0-based), for tests and debugging."""
        if self.u == 0:
            return np.zeros(0, dtype=np.uint8)
        return self.access_many(np.arange(1, self.u + 1)).astype(np.uint8)

    def one_positions(self) -> np.ndarray:
        if self.ones == 0:
            return np.zeros(0, dtype=np.int64)
        return self.select1_many(np.arange(1, self.ones + 1))

    def serialized_bits(self) -> int:
        return 8 * len(self.to_bytes())


class PlainBitVector(_BitVector):
    """Uncompressed bit vector with a two-level rank directory.

    Blocks are 512 bits; each block stores the absolute count of ones
    before it, and (unless ``block_offsets`` is False) every 64-bit word
    stores a 9-bit count of ones preceding it inside its block.  Select
    uses position samples every ``sample_rate`` ones (and zeros) to bound
    a binary search over the block counts.
    """

    def __init__(self, words: np.ndarray, u: int, *, sample_rate: int = DEFAULT_SAMPLE_RATE,
                 block_offsets: bool = True):
        if sample_rate < 1:
            raise ConstructionError("sample_rate must be positive")
        self.u = int(u)
        self.sample_rate = int(sample_rate)
        self.block_offsets = bool(block_offsets)
        self.words = words
        pc = np.bitwise_count(words).astype(np.int64).reshape(-1, WORDS_PER_BLOCK)
        per_block = pc.sum(axis=1)
        self.sup = np.concatenate(([0], np.cumsum(per_block)[:-1])).astype(np.int64)
        if self.block_offsets:
            self.offs = (np.cumsum(pc, axis=1) - pc).reshape(-1).astype(np.uint16)
        else:
            self.offs = np.zeros(0, dtype=np.uint16)
        self.ones = int(per_block.sum())
        bits = self._unpacked()
        k = self.sample_rate
        self.samp1 = np.flatnonzero(bits)[::k].astype(np.int64)
        self.samp0 = np.flatnonzero(bits == 0)[::k].astype(np.int64)

    def _unpacked(self) -> np.ndarray:
        raw = self.words.astype("<u8").view(np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.u]

    @classmethod
    def from_bits(cls, bits, **kw) -> "PlainBitVector":
        if isinstance(bits, str):
            bits = [int(ch) for ch in bits if ch in "01"]
        arr = np.asarray(bits).astype(np.uint8).reshape(-1)
        if arr.size and arr.max() > 1:
            raise ConstructionError("bit values must be 0 or 1")
        return cls(_pack_bits(arr), arr.shape[0], **kw)

    @classmethod
    def from_ones(cls, positions, u: int, **kw) -> "PlainBitVector":
        pos = _as_index(positions)
        if pos.size and (pos.min() < 1 or pos.max() > u):
            raise ConstructionError("one-position outside [1, u]")
        bits = np.zeros(int(u), dtype=np.uint8)
        bits[pos - 1] = 1
        return cls(_pack_bits(bits), u, **kw)

    def rank1_many(self, idx) -> np.ndarray:
        idx = _as_index(idx)
        self._check_rank(idx)
        return kernels.bv_rank1(self.words, self.sup, self.offs, idx)

    def select1_many(self, js) -> np.ndarray:
        js = _as_index(js)
        self._check_select(js, self.ones)
        if js.size == 0:
            return js.copy()
        return kernels.bv_select1(self.words, self.sup, self.offs, self.samp1,
                                  self.sample_rate, js)

    def select0_many(self, js) -> np.ndarray:
        js = _as_index(js)
        self._check_select(js, self.zeros)
        if js.size == 0:
            return js.copy()
        return kernels.bv_select0(self.words, self.sup, self.offs, self.samp0,
                                  self.sample_rate, js)

    def select0(self, j: int) -> int:
        return int(self.select0_many(np.array([j], dtype=np.int64))[0])

    def access_many(self, idx) -> np.ndarray:
        idx = _as_index(idx)
        self._check_access(idx)
        return kernels.bv_access(self.words, idx)

    def to_bits(self) -> np.ndarray:
        return self._unpacked().copy()

    def space(self) -> Space:
        w = _width(self.u)
        directory = self.sup.shape[0] * w
        if self.block_offsets:
            # first word of each block always has offset 0 and is not stored
            directory += self.sup.shape[0] * (WORDS_PER_BLOCK - 1) * 9
        directory += (self.samp1.shape[0] + self.samp0.shape[0]) * w
        return Space(self.u, directory)

    def to_bytes(self) -> bytes:
        nbytes = -(-self.u // 8)
        body = self.words.astype("<u8").view(np.uint8)[:nbytes].tobytes()
        params = _io.ints(self.sample_rate, int(self.block_offsets))
        return _io.pack(_io.TAG_PLAIN, self.u, [params, body])

    @classmethod
    def from_bytes(cls, buf, offset: int = 0):
        _, u, secs, end = _io.unpack(buf, offset, _io.TAG_PLAIN)
        if len(secs) != 2:
            raise FormatError("plain bit vector expects 2 sections")
        k, flag = _io.read_ints(secs[0])
        nbytes = -(-u // 8)
        if len(secs[1]) != nbytes:
            raise FormatError("plain bit vector payload length mismatch")
        nwords = -(-(u // 64 + 1) // WORDS_PER_BLOCK) * WORDS_PER_BLOCK
        buf8 = np.zeros(nwords * 8, dtype=np.uint8)
        buf8[:nbytes] = np.frombuffer(secs[1], dtype=np.uint8)
        words = buf8.view("<u8").astype(np.uint64)
        return cls(words, u, sample_rate=k, block_offsets=bool(flag)), end


class IntVector:
    """Fixed-width packed unsigned integers."""

    def __init__(self, values, width: int | None = None):
        vals = np.asarray(values, dtype=np.int64).reshape(-1)
        if vals.size and vals.min() < 0:
            raise ConstructionError("IntVector stores non-negative values only")
        need = int(vals.max()).bit_length() if vals.size else 0
        self.width = need if width is None else int(width)
        if self.width < need or not 0 <= self.width < 64:
            raise ConstructionError(f"width {self.width} cannot hold values of {need} bits")
        self.size = int(vals.shape[0])
        self.words = self._pack(vals, self.width)

    @staticmethod
    def _pack(vals: np.ndarray, width: int) -> np.ndarray:
        nwords = -(-(vals.shape[0] * width) // 64) + 1
        words = np.zeros(nwords, dtype=np.uint64)
        if width == 0 or vals.shape[0] == 0:
            return words
        v = vals.astype(np.uint64)
        bp = np.arange(vals.shape[0], dtype=np.int64) * width
        wi = bp >> 6
        off = (bp & 63).astype(np.uint64)
        np.bitwise_or.at(words, wi, v << off)
        spill = (bp & 63) + width > 64
        if spill.any():
            np.bitwise_or.at(words, wi[spill] + 1, v[spill] >> (np.uint64(64) - off[spill]))
        return words

    def __len__(self) -> int:
        return self.size

    def __getitem__(self, k: int) -> int:
        if not 0 <= k < self.size:
            raise RangeError(f"index {k} outside [0, {self.size})")
        return int(kernels.iv_get(self.words, self.width, np.array([k], dtype=np.int64))[0])

    def get_many(self, idx) -> np.ndarray:
        idx = _as_index(idx)
        if idx.size and (idx.min() < 0 or idx.max() >= self.size):
            raise RangeError("IntVector index out of range")
        return kernels.iv_get(self.words, self.width, idx)

    def to_array(self) -> np.ndarray:
        return self.get_many(np.arange(self.size))

    def space(self) -> Space:
        return Space(self.size * self.width)

    def to_bytes(self) -> bytes:
        nbytes = -(-(self.size * self.width) // 8)
        body = self.words.astype("<u8").view(np.uint8)[:nbytes].tobytes()
        return _io.pack(_io.TAG_INTVEC, self.size, [_io.ints(self.width), body])

    @classmethod
    def from_bytes(cls, buf, offset: int = 0):
        _, size, secs, end = _io.unpack(buf, offset, _io.TAG_INTVEC)
        (width,) = _io.read_ints(secs[0])
        nbytes = -(-(size * width) // 8)
        if len(secs[1]) != nbytes:
            raise FormatError("IntVector payload length mismatch")
        obj = cls.__new__(cls)
        obj.width = int(width)
        obj.size = int(size)
        nwords = -(-(size * width) // 64) + 1
        buf8 = np.zeros(nwords * 8, dtype=np.uint8)
        buf8[:nbytes] = np.frombuffer(secs[1], dtype=np.uint8)
        obj.words = buf8.view("<u8").astype(np.uint64)
        return obj, end


class SparseBitVector(_BitVector):
    """Elias-Fano (SDarray) encoding of the one-positions.

    Each position ``x`` is stored as ``x - 1``, split into ``lw`` low bits
    kept in a packed array and a high part written in unary into a plain
    bit vector of ``m + ((u - 1) >> lw) + 1`` bits.  The low width is
    ``max(0, floor(lg(u/m)))``.
    """

    def __init__(self, positions, u: int, *, sample_rate: int = DEFAULT_SAMPLE_RATE):
        pos = _as_index(positions)
        u = int(u)
        if u < 0:
            raise ConstructionError("length must be non-negative")
        if pos.size:
            if pos[0] < 1 or pos[-1] > u:
                raise ConstructionError("one-position outside [1, u]")
            if pos.size > 1 and np.any(np.diff(pos) <= 0):
                raise ConstructionError("one-positions must be strictly increasing")
        self.u = u
        self.ones = m = int(pos.shape[0])
        self.sample_rate = sample_rate
        if m == 0:
            self.lw = 0
            self.low = IntVector([], 0)
            self.high = None
            self.hlen = 0
            return
        self.lw = (u // m).bit_length() - 1
        v = pos - 1
        self.low = IntVector(v & ((1 << self.lw) - 1), self.lw)
        self.hlen = m + ((u - 1) >> self.lw) + 1
        hbits = np.zeros(self.hlen, dtype=np.uint8)
        hbits[(v >> self.lw) + np.arange(m)] = 1
        self.high = PlainBitVector(_pack_bits(hbits), self.hlen, sample_rate=sample_rate,
                                   block_offsets=False)

    @classmethod
    def from_bits(cls, bits, **kw) -> "SparseBitVector":
        if isinstance(bits, str):
            bits = [int(ch) for ch in bits if ch in "01"]
        arr = np.asarray(bits).reshape(-1)
        return cls(np.flatnonzero(arr) + 1, arr.shape[0], **kw)

    def _high_args(self):
        h = self.high
        return h.words, h.sup, h.offs

    def rank1_many(self, idx) -> np.ndarray:
        idx = _as_index(idx)
        self._check_rank(idx)
        if self.ones == 0:
            return np.zeros(idx.shape[0], dtype=np.int64)
        w, s, o = self._high_args()
        return kernels.ef_rank1(w, s, o, self.high.samp0, self.sample_rate, self.hlen,
                                self.low.words, self.lw, self.ones, self.u, idx)

    def select1_many(self, js) -> np.ndarray:
        js = _as_index(js)
        self._check_select(js, self.ones)
        if js.size == 0:
            return js.copy()
        w, s, o = self._high_args()
        return kernels.ef_select1(w, s, o, self.high.samp1, self.sample_rate,
                                  self.low.words, self.lw, js)

    def access_many(self, idx) -> np.ndarray:
        idx = _as_index(idx)
        self._check_access(idx)
        if self.ones == 0:
            return np.zeros(idx.shape[0], dtype=np.int64)
        w, s, o = self._high_args()
        return kernels.ef_access(w, s, o, self.high.samp0, self.sample_rate, self.hlen,
                                 self.low.words, self.lw, self.ones, self.u, idx)

    def space(self) -> Space:
        if self.ones == 0:
            return Space(0)
        return self.low.space() + self.high.space()

    def payload_bound(self) -> int:
        """``m * ceil(lg(u/m)) + 2m``, the classic SDarray payload bound."""
        m = self.ones
        if m == 0:
            return 0
        ceil_lg = (-(-self.u // m) - 1).bit_length()
        return m * ceil_lg + 2 * m

    def to_bytes(self) -> bytes:
        secs = [_io.ints(self.ones, self.lw, self.sample_rate)]
        if self.ones:
            secs += [self.low.to_bytes(), self.high.to_bytes()]
        return _io.pack(_io.TAG_SPARSE, self.u, secs)

    @classmethod
    def from_bytes(cls, buf, offset: int = 0):
        _, u, secs, end = _io.unpack(buf, offset, _io.TAG_SPARSE)
        m, lw, k = _io.read_ints(secs[0])
        obj = cls.__new__(cls)
        obj.u, obj.ones, obj.lw, obj.sample_rate = u, m, lw, k
        if m == 0:
            obj.low, obj.high, obj.hlen = IntVector([], 0), None, 0
            return obj, end
        obj.low, _ = IntVector.from_bytes(secs[1])
        obj.high, _ = PlainBitVector.from_bytes(secs[2])
        obj.hlen = obj.high.u
        if obj.low.size != m or obj.high.ones != m:
            raise FormatError("Elias-Fano component sizes disagree")
        return obj, end


class RunBitVector(_BitVector):
    """Run-length bit vector in the OZ layout.

    ``Z`` marks, over ``[1..u]``, the first position of every 1-run (one
    plus the total length of all runs before it); ``O`` marks, over
    ``[1..ones]``, the cumulative length of the 1-runs.  Both are
    Elias-Fano vectors with one entry per 1-run.
    """

    def __init__(self, runs, *, sample_rate: int = DEFAULT_SAMPLE_RATE):
        bits_, lens = [], []
        for bit, length in runs:
            bits_.append(int(bit))
            lens.append(int(length))
        bit_arr = np.asarray(bits_, dtype=np.int64)
        len_arr = np.asarray(lens, dtype=np.int64)
        self._init_runs(bit_arr, len_arr, sample_rate)

    def _init_runs(self, bit_arr, len_arr, sample_rate):
        if len_arr.size:
            if len_arr.min() <= 0:
                raise ConstructionError("run lengths must be positive")
            if bit_arr.min() < 0 or bit_arr.max() > 1:
                raise ConstructionError("run values must be 0 or 1")
            if np.any(bit_arr[1:] == bit_arr[:-1]):
                raise ConstructionError("adjacent runs must alternate in value")
        self.u = int(len_arr.sum())
        self.first_bit = int(bit_arr[0]) if bit_arr.size else 0
        ends = np.cumsum(len_arr)
        starts = ends - len_arr + 1
        is_one = bit_arr == 1
        one_starts = starts[is_one]
        one_lens = len_arr[is_one]
        self.ones = int(one_lens.sum())
        self.nruns = int(len_arr.shape[0])
        self.Z = SparseBitVector(one_starts, self.u, sample_rate=sample_rate)
        self.O = SparseBitVector(np.cumsum(one_lens), self.ones, sample_rate=sample_rate)

    @classmethod
    def from_bits(cls, bits, **kw) -> "RunBitVector":
        if isinstance(bits, str):
            bits = [int(ch) for ch in bits if ch in "01"]
        arr = np.asarray(bits, dtype=np.int64).reshape(-1)
        if arr.size == 0:
            return cls([], **kw)
        cut = np.flatnonzero(np.diff(arr)) + 1
        starts = np.concatenate(([0], cut))
        lens = np.diff(np.concatenate((starts, [arr.shape[0]])))
        obj = cls.__new__(cls)
        obj._init_runs(arr[starts], lens, kw.get("sample_rate", DEFAULT_SAMPLE_RATE))
        return obj

    @classmethod
    def from_ones(cls, positions, u: int, **kw) -> "RunBitVector":
        """Build from strictly increasing 1-positions without expanding the bits."""
        pos = _as_index(positions)
        u = int(u)
        if pos.size and (pos[0] < 1 or pos[-1] > u or np.any(np.diff(pos) <= 0)):
            raise ConstructionError("one-positions must be increasing within [1, u]")
        cut = np.flatnonzero(np.diff(pos) > 1) + 1
        rs = pos[np.concatenate(([0], cut))] if pos.size else pos
        re = pos[np.concatenate((cut - 1, [pos.size - 1]))] if pos.size else pos
        # interleave gaps of zeros and runs of ones
        gap_lo = np.concatenate(([1], re + 1))
        gap_hi = np.concatenate((rs, [u + 1]))
        gaps = gap_hi - gap_lo
        bits = np.empty(2 * rs.size + 1, dtype=np.int64)
        lens = np.empty(2 * rs.size + 1, dtype=np.int64)
        bits[0::2], bits[1::2] = 0, 1
        lens[0::2], lens[1::2] = gaps, re - rs + 1
        keep = lens > 0
        obj = cls.__new__(cls)
        obj._init_runs(bits[keep], lens[keep], kw.get("sample_rate", DEFAULT_SAMPLE_RATE))
        return obj

    @property
    def one_runs(self) -> int:
        return self.Z.ones

    def _run_prefix(self, k: np.ndarray) -> np.ndarray:
        """Ones in the first ``k`` 1-runs (k may be 0)."""
        out = np.zeros(k.shape[0], dtype=np.int64)
        nz = k > 0
        if nz.any():
            out[nz] = self.O.select1_many(k[nz])
        return out

    def rank1_many(self, idx) -> np.ndarray:
        idx = _as_index(idx)
        self._check_rank(idx)
        out = np.zeros(idx.shape[0], dtype=np.int64)
        if self.ones == 0 or idx.size == 0:
            return out
        k = self.Z.rank1_many(idx)
        hit = np.flatnonzero(k > 0)
        if hit.size:
            kk = k[hit]
            start = self.Z.select1_many(kk)
            before = self._run_prefix(kk - 1)
            length = self.O.select1_many(kk) - before
            out[hit] = before + np.minimum(idx[hit] - start + 1, length)
        return out

    def select1_many(self, js) -> np.ndarray:
        js = _as_index(js)
        self._check_select(js, self.ones)
        if js.size == 0:
            return js.copy()
        k = self.O.rank1_many(js - 1) + 1
        start = self.Z.select1_many(k)
        return start + js - self._run_prefix(k - 1) - 1

    def access_many(self, idx) -> np.ndarray:
        idx = _as_index(idx)
        self._check_access(idx)
        return self.rank1_many(idx) - self.rank1_many(idx - 1)

    def space(self) -> Space:
        return self.Z.space() + self.O.space()

    def to_bytes(self) -> bytes:
        secs = [_io.ints(self.first_bit, self.nruns), self.Z.to_bytes(), self.O.to_bytes()]
        return _io.pack(_io.TAG_RUNBV, self.u, secs)

    @classmethod
    def from_bytes(cls, buf, offset: int = 0):
        _, u, secs, end = _io.unpack(buf, offset, _io.TAG_RUNBV)
        first_bit, nruns = _io.read_ints(secs[0])
        obj = cls.__new__(cls)
        obj.u, obj.first_bit, obj.nruns = u, first_bit, nruns
        obj.Z, _ = SparseBitVector.from_bytes(secs[1])
        obj.O, _ = SparseBitVector.from_bytes(secs[2])
        obj.ones = obj.O.u
        if obj.Z.u != u or obj.Z.ones != obj.O.ones:
            raise FormatError("run bit vector components disagree")
        return obj, end
