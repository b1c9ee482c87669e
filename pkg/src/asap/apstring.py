"""Alphabet-partitioned sequences with bit vectors in place of the id string."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _io, kernels
from ._ensemble import flatten
from .bitvectors import Space, SparseBitVector, _as_index
from .errors import ConstructionError, FormatError, RangeError, SymbolNotFound
from .partition import SymbolMap, SymbolStats, build_map, entropy_h0
from .sequences import WaveletMatrix


@dataclass
class SizeReport:
    n: int
    p: int
    B: list = field(default_factory=list)
    S: list = field(default_factory=list)
    map: Space = Space(0)

    @property
    def b_payload(self) -> int:
        return sum(b.payload for b in self.B)

    @property
    def b_directory(self) -> int:
        return sum(b.directory for b in self.B)

    @property
    def b_bits(self) -> int:
        return self.b_payload + self.b_directory

    @property
    def s_bits(self) -> int:
        return sum(s.total for s in self.S)

    @property
    def map_bits(self) -> int:
        return self.map.total

    @property
    def total(self) -> int:
        return self.b_bits + self.s_bits + self.map_bits

    def as_dict(self) -> dict:
        return {
            "n": self.n, "p": self.p,
            "b_payload": self.b_payload, "b_directory": self.b_directory,
            "s_bits": self.s_bits, "map_bits": self.map_bits, "total": self.total,
            "bits_per_symbol": self.total / self.n if self.n else 0.0,
        }


class ApString:
    """Sequence split into ``p`` sub-alphabet sequences ``s_l``.

    ``B[l]`` marks the positions of ``s`` holding a symbol of partition
    ``l`` and ``S[l]`` holds their local codes in order.  So
    ``rank_a(i) = S[l].rank_c(B[l].rank1(i))`` and
    ``select_a(j) = B[l].select1(S[l].select_c(j))`` for ``a -> (l, c)``.
    """

    def __init__(self, n: int, sigma: int, smap: SymbolMap, B: list, S: list):
        self.n, self.sigma, self.map, self.B, self.S = n, sigma, smap, B, S
        self._E, self._W = flatten(B, S, n)

    @classmethod
    def build(cls, seq, scheme="sparse", sigma: int | None = None) -> "ApString":
        seq = np.asarray(seq, dtype=np.int64).reshape(-1)
        if seq.size == 0:
            raise ConstructionError("cannot index an empty sequence")
        smap = build_map(seq, scheme, sigma)
        if smap.sigma <= int(seq.max()):
            raise ConstructionError("symbol outside the map's alphabet")
        n = int(seq.shape[0])
        parts, codes = smap.map_many(seq)
        if parts.min() < 0:
            raise ConstructionError("sequence holds a symbol the partition does not cover")
        order = np.argsort(parts, kind="stable")
        bounds = np.concatenate(([0], np.cumsum(np.bincount(parts, minlength=smap.p))))
        B, S = [], []
        for ell in range(smap.p):
            sel = order[bounds[ell]:bounds[ell + 1]]
            B.append(SparseBitVector(sel + 1, n))
            S.append(WaveletMatrix(codes[sel], max(1, int(smap.sizes[ell]))))
        return cls(n, smap.sigma, smap, B, S)

    @property
    def p(self) -> int:
        return self.map.p

    def __len__(self) -> int:
        return self.n

    def _check_pos(self, idx, lo):
        if idx.size and (idx.min() < lo or idx.max() > self.n):
            raise RangeError(f"position outside [{lo}, {self.n}]")

    # -------------------------------------------------------- batch queries
    def rank_many(self, alphas, idx) -> np.ndarray:
        idx = _as_index(idx)
        alphas = np.broadcast_to(_as_index(alphas), idx.shape)
        self._check_pos(idx, 0)
        out = np.zeros(idx.shape[0], dtype=np.int64)
        parts, codes = self.map.map_many(alphas)
        sel = np.flatnonzero(parts >= 0)
        if sel.size:
            out[sel] = kernels.ens_rank(self._E, self._W, parts[sel], codes[sel], idx[sel])
        return out

    def select_many(self, alphas, js) -> np.ndarray:
        js = _as_index(js)
        alphas = np.broadcast_to(_as_index(alphas), js.shape)
        if js.size == 0:
            return js.copy()
        parts, codes = self.map.map_many(alphas)
        if parts.min() < 0:
            bad = int(alphas[np.argmin(parts)])
            raise RangeError(f"select on symbol {bad}, which does not occur")
        total = kernels.ens_rank(self._E, self._W, parts, codes, np.full(js.shape[0], self.n))
        if js.min() < 1 or np.any(js > total):
            raise RangeError("select rank outside [1, occurrences]")
        return kernels.ens_select(self._E, self._W, parts, codes, js)

    def access_many(self, idx) -> np.ndarray:
        """Probe partitions in ascending order until each position is claimed."""
        idx = _as_index(idx)
        self._check_pos(idx, 1)
        if idx.size == 0:
            return idx.copy()
        parts, codes = kernels.ens_access(self._E, self._W, self.p, idx)
        return self.map.unmap_many(parts, codes)

    def snippet(self, i: int, length: int) -> np.ndarray:
        """``s[i .. i+length-1]``, gathered partition by partition."""
        i, length = int(i), int(length)
        if length < 1 or i < 1 or i + length - 1 > self.n:
            raise RangeError(f"snippet [{i}, {i + length - 1}] outside [1, {self.n}]")
        parts, codes = kernels.ens_snippet(self._E, self._W, self.p, i, length)
        return self.map.unmap_many(parts, codes)

    # ------------------------------------------------------- scalar queries
    def rank(self, alpha: int, i: int) -> int:
        return int(self.rank_many([alpha], [i])[0])

    def select(self, alpha: int, j: int) -> int:
        return int(self.select_many([alpha], [j])[0])

    def access(self, i: int) -> int:
        return int(self.access_many([i])[0])

    def count(self, alpha: int) -> int:
        return self.rank(alpha, self.n)

    def __getitem__(self, i: int) -> int:
        return self.access(i)

    def to_array(self) -> np.ndarray:
        return self.snippet(1, self.n)

    def batch(self, op: str, *args, workers: int = 1, chunk: int = 4096) -> np.ndarray:
        """Run ``rank``/``select``/``access`` over arrays, split across threads."""
        fn = {"rank": self.rank_many, "select": self.select_many,
              "access": self.access_many}[op]
        cols = [_as_index(a) for a in args]
        m = cols[-1].shape[0]
        cols = [np.broadcast_to(c, (m,)) for c in cols]
        if workers <= 1 or m <= chunk:
            return fn(*cols)
        spans = [(a, min(a + chunk, m)) for a in range(0, m, chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: fn(*(c[s[0]:s[1]] for c in cols)), spans))
        return np.concatenate(parts)

    # --------------------------------------------------------------- space
    def size_report(self) -> SizeReport:
        return SizeReport(self.n, self.p, [b.space() for b in self.B],
                          [s.space() for s in self.S], self.map.space())

    def partition_ids(self) -> np.ndarray:
        """The partition-id string ``t`` (0-based ids)."""
        t = np.empty(self.n, dtype=np.int64)
        for ell, b in enumerate(self.B):
            t[b.one_positions() - 1] = ell
        return t

    def h0_of_ids(self) -> float:
        return entropy_h0(SymbolStats.from_sequence(self.partition_ids(), self.p))

    # ------------------------------------------------------- serialization
    def to_bytes(self) -> bytes:
        secs = [_io.ints(self.sigma, self.p), self.map.to_bytes()]
        for b, s in zip(self.B, self.S):
            secs += [b.to_bytes(), s.to_bytes()]
        return _io.pack(_io.TAG_APS, self.n, secs)

    @classmethod
    def from_bytes(cls, buf, offset: int = 0):
        _, n, secs, end = _io.unpack(buf, offset, _io.TAG_APS)
        sigma, p = _io.read_ints(secs[0])
        smap, _ = SymbolMap.from_bytes(secs[1])
        if smap.p != p or len(secs) != 2 + 2 * p:
            raise FormatError("partition count disagrees with stored components")
        B = [SparseBitVector.from_bytes(secs[2 + 2 * k])[0] for k in range(p)]
        S = [WaveletMatrix.from_bytes(secs[3 + 2 * k])[0] for k in range(p)]
        for b, s in zip(B, S):
            if b.u != n or b.ones != s.n:
                raise FormatError("bit vector and sub-sequence sizes disagree")
        return cls(n, sigma, smap, B, S), end

    def __repr__(self) -> str:
        return f"ApString(n={self.n}, sigma={self.sigma}, {self.map.describe()}, p={self.p})"


__all__ = ["ApString", "SizeReport", "SymbolNotFound"]
