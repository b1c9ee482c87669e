"""Run-length sequences and the run-length alphabet-partitioned string."""

from __future__ import annotations

import numpy as np

from . import _io
from .bitvectors import PlainBitVector, RunBitVector, Space, SparseBitVector, _as_index
from .errors import ConstructionError, FormatError, RangeError
from .partition import SymbolMap
from .sequences import WaveletMatrix


def _runs_of(x: np.ndarray) -> int:
    if x.size == 0:
        return 0
    return 1 + int(np.count_nonzero(x[1:] != x[:-1]))


class RunLengthSequence:
    """Sequence stored as run heads plus two bit vectors of run boundaries.

    ``H`` holds the head symbol of each run, ``Bstart`` marks run starts
    in text order, and ``Bsorted`` lays out the runs grouped by symbol
    (ascending, each symbol's runs in text order), one 1 per run start.
    ``K[c]`` counts the runs of symbols smaller than ``c``.
    """

    def __init__(self, seq, sigma: int | None = None):
        seq = np.asarray(seq, dtype=np.int64).reshape(-1)
        if seq.size and seq.min() < 0:
            raise ConstructionError("symbols must be non-negative")
        top = int(seq.max()) + 1 if seq.size else 1
        sigma = top if sigma is None else int(sigma)
        if top > sigma:
            raise ConstructionError(f"symbol {top - 1} outside alphabet of size {sigma}")
        self.n, self.sigma = int(seq.shape[0]), max(sigma, 1)
        if self.n == 0:
            starts = np.zeros(0, dtype=np.int64)
        else:
            starts = np.concatenate(([0], np.flatnonzero(seq[1:] != seq[:-1]) + 1))
        heads = seq[starts]
        lens = np.diff(np.concatenate((starts, [self.n])))
        self.r = int(starts.shape[0])
        self.H = WaveletMatrix(heads, self.sigma)
        self.Bstart = SparseBitVector(starts + 1, self.n)
        order = np.argsort(heads, kind="stable")
        sorted_starts = np.concatenate(([0], np.cumsum(lens[order])[:-1])) if self.r else starts
        self.Bsorted = PlainBitVector.from_ones(sorted_starts + 1, self.n)
        self.K = np.concatenate(([0], np.cumsum(np.bincount(heads, minlength=self.sigma))))
        self.K = self.K.astype(np.int64)

    def __len__(self) -> int:
        return self.n

    # S(j) = Bsorted.select1(j), with S(r+1) = n+1
    def _S(self, js: np.ndarray) -> np.ndarray:
        out = np.full(js.shape[0], self.n + 1, dtype=np.int64)
        ok = js <= self.r
        if ok.any():
            out[ok] = self.Bsorted.select1_many(js[ok])
        return out

    def _occ(self, cs: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Total length of the first ``t`` runs of symbol ``c``."""
        base = self.K[cs]
        return self._S(base + t + 1) - self._S(base + 1)

    def _check_pos(self, idx, lo):
        if idx.size and (idx.min() < lo or idx.max() > self.n):
            raise RangeError(f"position outside [{lo}, {self.n}]")

    def access_many(self, idx) -> np.ndarray:
        idx = _as_index(idx)
        self._check_pos(idx, 1)
        return self.H.access_many(self.Bstart.rank1_many(idx))

    def rank_many(self, cs, idx) -> np.ndarray:
        idx = _as_index(idx)
        cs = np.broadcast_to(_as_index(cs), idx.shape)
        self._check_pos(idx, 0)
        out = np.zeros(idx.shape[0], dtype=np.int64)
        sel = np.flatnonzero((idx > 0) & (cs >= 0) & (cs < self.sigma))
        if sel.size == 0:
            return out
        i, c = idx[sel], cs[sel]
        k = self.Bstart.rank1_many(i)
        t = self.H.rank_many(c, k)
        inside = self.H.access_many(k) == c
        res = self._occ(c, t)
        if inside.any():
            w = np.flatnonzero(inside)
            res[w] = (self._occ(c[w], t[w] - 1) + i[w]
                      - self.Bstart.select1_many(k[w]) + 1)
        out[sel] = res
        return out

    def select_many(self, cs, js) -> np.ndarray:
        js = _as_index(js)
        cs = np.broadcast_to(_as_index(cs), js.shape)
        if js.size == 0:
            return js.copy()
        if cs.min() < 0 or cs.max() >= self.sigma:
            raise RangeError("select on a symbol outside the alphabet")
        total = self.rank_many(cs, np.full(js.shape[0], self.n))
        if js.min() < 1 or np.any(js > total):
            raise RangeError("select rank outside [1, occurrences]")
        base = self.K[cs]
        t = self.Bsorted.rank1_many(self._S(base + 1) + js - 1) - base
        offset = js - self._occ(cs, t - 1)
        g = self.H.select_many(cs, t)
        return self.Bstart.select1_many(g) + offset - 1

    def access(self, i: int) -> int:
        return int(self.access_many([i])[0])

    def rank(self, c: int, i: int) -> int:
        return int(self.rank_many([c], [i])[0])

    def select(self, c: int, j: int) -> int:
        return int(self.select_many([c], [j])[0])

    def to_array(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros(0, dtype=np.int64)
        return self.access_many(np.arange(1, self.n + 1))

    def space(self) -> Space:
        return (self.H.space() + self.Bstart.space() + self.Bsorted.space()
                + Space(64 * (self.sigma + 1)))

    def to_bytes(self) -> bytes:
        secs = [_io.ints(self.sigma, self.r), self.H.to_bytes(), self.Bstart.to_bytes(),
                self.Bsorted.to_bytes(), _io.array(self.K, np.int64)]
        return _io.pack(_io.TAG_RLS, self.n, secs)

    @classmethod
    def from_bytes(cls, buf, offset: int = 0):
        _, n, secs, end = _io.unpack(buf, offset, _io.TAG_RLS)
        sigma, r = _io.read_ints(secs[0])
        obj = cls.__new__(cls)
        obj.n, obj.sigma, obj.r = n, sigma, r
        obj.H, _ = WaveletMatrix.from_bytes(secs[1])
        obj.Bstart, _ = SparseBitVector.from_bytes(secs[2])
        obj.Bsorted, _ = PlainBitVector.from_bytes(secs[3])
        obj.K = _io.read_array(secs[4], np.int64)
        if (obj.H.n != r or obj.Bstart.ones != r or obj.Bsorted.ones != r
                or obj.K.shape[0] != sigma + 1):
            raise FormatError("run-length sequence components disagree")
        return obj, end


def count_runs(seq, sigma: int | None = None) -> tuple[int, int, int]:
    """``(r, r_t, r_s)``: runs of ``seq``, of its partition ids, and summed over sub-sequences.

    Partitions follow the uniform scheme used by :class:`RunApString`.
    """
    seq = np.asarray(seq, dtype=np.int64).reshape(-1)
    if seq.size == 0:
        return 0, 0, 0
    sigma = int(seq.max()) + 1 if sigma is None else int(sigma)
    smap = SymbolMap.uniform(seq.shape[0], sigma)
    parts, codes = smap.map_many(seq)
    order = np.argsort(parts, kind="stable")
    ps, cs = parts[order], codes[order]
    r_s = 1 + int(np.count_nonzero((ps[1:] != ps[:-1]) | (cs[1:] != cs[:-1])))
    return _runs_of(seq), _runs_of(parts), r_s


class RunApString:
    """Alphabet partitioning tuned for repetitive sequences.

    The alphabet is cut into ``p = ceil(lg n)`` ranges of ``q`` symbols.
    The per-partition bit vectors are concatenated into one run-length
    bit vector ``B`` of ``n*p`` bits (segment ``l`` covers positions
    ``l*n+1 .. (l+1)*n``) and the sub-sequences into one run-length
    sequence ``sprime`` with segment boundaries ``off``.
    """

    def __init__(self, seq, sigma: int | None = None):
        seq = np.asarray(seq, dtype=np.int64).reshape(-1)
        if seq.size == 0:
            raise ConstructionError("cannot index an empty sequence")
        if seq.min() < 0:
            raise ConstructionError("symbols must be non-negative")
        top = int(seq.max()) + 1
        sigma = top if sigma is None else int(sigma)
        if top > sigma:
            raise ConstructionError(f"symbol {top - 1} outside alphabet of size {sigma}")
        self.n, self.sigma = int(seq.shape[0]), sigma
        self.map = SymbolMap.uniform(self.n, sigma)
        self.p, self.q = self.map.p, self.map.q
        parts, codes = self.map.map_many(seq)
        order = np.argsort(parts, kind="stable")
        self.off = np.concatenate(([0], np.cumsum(np.bincount(parts, minlength=self.p))))
        self.off = self.off.astype(np.int64)
        ones = parts[order] * self.n + order + 1
        self.B = RunBitVector.from_ones(ones, self.n * self.p)
        self.sprime = RunLengthSequence(codes[order], self.q)
        self.r, self.r_t, self.r_s = count_runs(seq, sigma)

    def __len__(self) -> int:
        return self.n

    @property
    def stats(self) -> dict:
        return {"r": self.r, "r_t": self.r_t, "r_s": self.r_s,
                "sprime_runs": self.sprime.r, "B_one_runs": self.B.one_runs}

    def _check_pos(self, idx, lo):
        if idx.size and (idx.min() < lo or idx.max() > self.n):
            raise RangeError(f"position outside [{lo}, {self.n}]")

    def rank_many(self, alphas, idx) -> np.ndarray:
        idx = _as_index(idx)
        alphas = np.broadcast_to(_as_index(alphas), idx.shape)
        self._check_pos(idx, 0)
        out = np.zeros(idx.shape[0], dtype=np.int64)
        parts, codes = self.map.map_many(alphas)
        sel = np.flatnonzero(parts >= 0)
        if sel.size == 0:
            return out
        ell, c = parts[sel], codes[sel]
        seg = ell * self.n
        r1 = self.B.rank1_many(seg + idx[sel]) - self.off[ell]
        lo = self.off[ell]
        out[sel] = self.sprime.rank_many(c, lo + r1) - self.sprime.rank_many(c, lo)
        return out

    def select_many(self, alphas, js) -> np.ndarray:
        js = _as_index(js)
        alphas = np.broadcast_to(_as_index(alphas), js.shape)
        if js.size == 0:
            return js.copy()
        parts, codes = self.map.map_many(alphas)
        if parts.min() < 0:
            raise RangeError("select on a symbol outside the alphabet")
        lo, hi = self.off[parts], self.off[parts + 1]
        before = self.sprime.rank_many(codes, lo)
        avail = self.sprime.rank_many(codes, hi) - before
        if js.min() < 1 or np.any(js > avail):
            raise RangeError("select rank outside [1, occurrences]")
        k = self.sprime.select_many(codes, before + js) - lo
        return self.B.select1_many(lo + k) - parts * self.n

    def access_many(self, idx, chunk: int = 1 << 16) -> np.ndarray:
        """Probe every non-empty segment of ``B`` at once; exactly one holds a 1."""
        idx = _as_index(idx)
        self._check_pos(idx, 1)
        out = np.empty(idx.shape[0], dtype=np.int64)
        live = np.flatnonzero(np.diff(self.off) > 0)
        for a in range(0, idx.shape[0], chunk):
            part = idx[a:a + chunk]
            pos = live[:, None] * self.n + part[None, :]
            hit = self.B.access_many(pos.reshape(-1)).reshape(pos.shape)
            row = np.argmax(hit, axis=0)
            j = self.B.rank1_many(pos[row, np.arange(part.shape[0])])
            out[a:a + chunk] = live[row] * self.q + self.sprime.access_many(j)
        return out

    def snippet(self, i: int, length: int) -> np.ndarray:
        """Per segment, the ones of ``B`` inside the window locate the symbols.

        The ``j``-th one of ``B`` overall is the ``j``-th symbol of ``sprime``,
        so each hit needs one select on ``B`` and one access on ``sprime``.
        """
        i, length = int(i), int(length)
        if length < 1 or i < 1 or i + length - 1 > self.n:
            raise RangeError(f"snippet [{i}, {i + length - 1}] outside [1, {self.n}]")
        live = np.flatnonzero(np.diff(self.off) > 0)
        seg = live * self.n
        ends = self.B.rank1_many(np.concatenate((seg + i - 1, seg + i + length - 1)))
        lo, hi = ends[:live.shape[0]], ends[live.shape[0]:]
        cnt = hi - lo
        js = np.repeat(lo - np.cumsum(cnt) + cnt, cnt) + np.arange(1, cnt.sum() + 1)
        ell = np.repeat(live, cnt)
        at = self.B.select1_many(js) - ell * self.n - i
        out = np.empty(length, dtype=np.int64)
        out[at] = ell * self.q + self.sprime.access_many(js)
        return out

    def rank(self, alpha: int, i: int) -> int:
        return int(self.rank_many([alpha], [i])[0])

    def select(self, alpha: int, j: int) -> int:
        return int(self.select_many([alpha], [j])[0])

    def access(self, i: int) -> int:
        return int(self.access_many([i])[0])

    def count(self, alpha: int) -> int:
        return self.rank(alpha, self.n)

    def to_array(self) -> np.ndarray:
        return self.access_many(np.arange(1, self.n + 1))

    def space(self) -> Space:
        return self.B.space() + self.sprime.space() + Space(64 * (self.p + 4))

    def to_bytes(self) -> bytes:
        secs = [_io.ints(self.sigma, self.p, self.q, self.r, self.r_t, self.r_s),
                _io.array(self.off, np.int64), self.B.to_bytes(), self.sprime.to_bytes()]
        return _io.pack(_io.TAG_RAPS, self.n, secs)

    @classmethod
    def from_bytes(cls, buf, offset: int = 0):
        _, n, secs, end = _io.unpack(buf, offset, _io.TAG_RAPS)
        sigma, p, q, r, r_t, r_s = _io.read_ints(secs[0])
        obj = cls.__new__(cls)
        obj.n, obj.sigma, obj.r, obj.r_t, obj.r_s = n, sigma, r, r_t, r_s
        obj.map = SymbolMap.uniform(n, sigma)
        obj.p, obj.q = obj.map.p, obj.map.q
        if (obj.p, obj.q) != (p, q):
            raise FormatError("stored partition parameters disagree with n and sigma")
        obj.off = _io.read_array(secs[1], np.int64)
        obj.B, _ = RunBitVector.from_bytes(secs[2])
        obj.sprime, _ = RunLengthSequence.from_bytes(secs[3])
        if obj.B.u != n * p or obj.B.ones != n or obj.sprime.n != n or obj.off[-1] != n:
            raise FormatError("run-length partitioned string components disagree")
        return obj, end

    def __repr__(self) -> str:
        return f"RunApString(n={self.n}, sigma={self.sigma}, p={self.p}, r={self.r})"
