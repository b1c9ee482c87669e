"""Wavelet matrix over integer sequences."""

from __future__ import annotations

import numpy as np

from . import _io, kernels
from .bitvectors import PlainBitVector, Space, _as_index
from .errors import ConstructionError, FormatError, RangeError


class WaveletMatrix:
    """Level-wise bit decomposition of a sequence over ``[0, sigma)``.

    All ``ceil(lg sigma)`` levels are stored back to back in a single
    :class:`PlainBitVector` of ``n * levels`` bits; level ``l`` occupies
    bits ``[l*n + 1 .. (l+1)*n]``.  At each level the symbols are stably
    partitioned by the current bit, zeros first.  When ``sigma <= 1`` the
    sequence is constant and only ``(n, symbol)`` is kept.
    """

    def __init__(self, seq, sigma: int | None = None):
        seq = np.asarray(seq, dtype=np.int64).reshape(-1)
        if seq.size and seq.min() < 0:
            raise ConstructionError("symbols must be non-negative")
        top = int(seq.max()) + 1 if seq.size else 1
        sigma = top if sigma is None else int(sigma)
        if seq.size and top > sigma:
            raise ConstructionError(f"symbol {top - 1} outside alphabet of size {sigma}")
        self.n = int(seq.shape[0])
        self.sigma = max(sigma, 1)
        self.nlevels = (self.sigma - 1).bit_length()
        self.constant = int(seq[0]) if (self.nlevels == 0 and self.n) else 0
        if self.nlevels == 0:
            self.bits = None
            self.zeros = np.zeros(0, dtype=np.int64)
            self.base1 = np.zeros(0, dtype=np.int64)
            return
        n, nlev = self.n, self.nlevels
        planes = np.empty(n * nlev, dtype=np.uint8)
        zeros = np.empty(nlev, dtype=np.int64)
        cur = seq
        for lv in range(nlev):
            b = ((cur >> (nlev - 1 - lv)) & 1).astype(np.uint8)
            planes[lv * n:(lv + 1) * n] = b
            zeros[lv] = n - int(b.sum())
            cur = np.concatenate((cur[b == 0], cur[b == 1]))
        self.zeros = zeros
        self._attach(PlainBitVector.from_bits(planes, block_offsets=False))

    def _attach(self, bits: PlainBitVector) -> None:
        self.bits = bits
        starts = np.arange(self.nlevels, dtype=np.int64) * self.n
        self.base1 = bits.rank1_many(starts)

    def __len__(self) -> int:
        return self.n

    # -- validation
    def _check_symbols(self, cs: np.ndarray) -> None:
        if cs.size and (cs.min() < 0 or cs.max() >= self.sigma):
            raise RangeError(f"symbol outside [0, {self.sigma})")

    def _check_pos(self, idx: np.ndarray, lo: int) -> None:
        if idx.size and (idx.min() < lo or idx.max() > self.n):
            raise RangeError(f"position outside [{lo}, {self.n}]")

    def _kargs(self):
        b = self.bits
        return b.words, b.sup, b.offs

    # -- batch queries
    def access_many(self, idx) -> np.ndarray:
        idx = _as_index(idx)
        self._check_pos(idx, 1)
        if self.nlevels == 0:
            return np.full(idx.shape[0], self.constant, dtype=np.int64)
        return kernels.wm_access(*self._kargs(), self.n, self.nlevels, self.zeros,
                                 self.base1, idx)

    def rank_many(self, cs, idx) -> np.ndarray:
        idx = _as_index(idx)
        cs = np.broadcast_to(_as_index(cs), idx.shape).astype(np.int64)
        self._check_symbols(cs)
        self._check_pos(idx, 0)
        if self.nlevels == 0:
            return np.where(cs == self.constant, idx, 0).astype(np.int64)
        return kernels.wm_rank(*self._kargs(), self.n, self.nlevels, self.zeros,
                               self.base1, np.ascontiguousarray(cs), idx)

    def select_many(self, cs, js) -> np.ndarray:
        js = _as_index(js)
        cs = np.ascontiguousarray(np.broadcast_to(_as_index(cs), js.shape), dtype=np.int64)
        self._check_symbols(cs)
        if js.size == 0:
            return js.copy()
        total = self.rank_many(cs, np.full(js.shape[0], self.n, dtype=np.int64))
        if js.min() < 1 or np.any(js > total):
            raise RangeError("select rank outside [1, occurrences]")
        if self.nlevels == 0:
            return js.copy()
        b = self.bits
        return kernels.wm_select(b.words, b.sup, b.offs, b.samp1, b.samp0, b.sample_rate,
                                 self.n, self.nlevels, self.zeros, self.base1, cs, js)

    # -- scalar queries
    def access(self, i: int) -> int:
        return int(self.access_many([i])[0])

    def rank(self, c: int, i: int) -> int:
        return int(self.rank_many([c], [i])[0])

    def select(self, c: int, j: int) -> int:
        return int(self.select_many([c], [j])[0])

    def count(self, c: int) -> int:
        return self.rank(c, self.n)

    def to_array(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros(0, dtype=np.int64)
        return self.access_many(np.arange(1, self.n + 1))

    def space(self) -> Space:
        if self.nlevels == 0:
            return Space(2 * 64)
        return self.bits.space()

    def to_bytes(self) -> bytes:
        head = _io.ints(self.sigma, self.constant)
        secs = [head]
        if self.nlevels:
            secs += [_io.array(self.zeros, np.int64), self.bits.to_bytes()]
        return _io.pack(_io.TAG_WM, self.n, secs)

    @classmethod
    def from_bytes(cls, buf, offset: int = 0):
        _, n, secs, end = _io.unpack(buf, offset, _io.TAG_WM)
        sigma, constant = _io.read_ints(secs[0])
        obj = cls.__new__(cls)
        obj.n, obj.sigma, obj.constant = n, sigma, constant
        obj.nlevels = (sigma - 1).bit_length()
        if obj.nlevels == 0:
            obj.bits = None
            obj.zeros = np.zeros(0, dtype=np.int64)
            obj.base1 = np.zeros(0, dtype=np.int64)
            return obj, end
        if len(secs) != 3:
            raise FormatError("wavelet matrix expects 3 sections")
        obj.zeros = _io.read_array(secs[1], np.int64)
        bits, _ = PlainBitVector.from_bytes(secs[2])
        if bits.u != n * obj.nlevels:
            raise FormatError("wavelet matrix level size mismatch")
        obj._attach(bits)
        return obj, end
