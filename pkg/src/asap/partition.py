"""Alphabet partitions and the symbol map between global and local codes.

A partition scheme assigns every occurring symbol ``a`` a partition id
``l`` and a local code ``c`` equal to the number of smaller symbols in
the same partition.  Table-backed schemes (sparse, dense, explicit) keep
the partition id of each occurring symbol in a wavelet matrix, so the
local code is a rank and the inverse map a select on it.  The uniform
scheme is pure arithmetic and stores nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _io
from .bitvectors import Space, SparseBitVector, _as_index
from .errors import ConstructionError, FormatError, RangeError, SymbolNotFound
from .sequences import WaveletMatrix

SCHEMES = ("sparse", "dense", "uniform", "explicit")


@dataclass(frozen=True)
class SymbolStats:
    n: int
    sigma: int
    counts: np.ndarray

    @classmethod
    def from_sequence(cls, seq, sigma: int | None = None) -> "SymbolStats":
        seq = np.asarray(seq, dtype=np.int64).reshape(-1)
        if seq.size and seq.min() < 0:
            raise ConstructionError("symbols must be non-negative")
        top = int(seq.max()) + 1 if seq.size else 0
        sigma = top if sigma is None else int(sigma)
        if top > sigma:
            raise ConstructionError(f"symbol {top - 1} outside alphabet of size {sigma}")
        counts = np.bincount(seq, minlength=sigma).astype(np.int64)
        return cls(int(seq.shape[0]), sigma, counts)

    @property
    def occurring(self) -> np.ndarray:
        return np.flatnonzero(self.counts)


def entropy_h0(stats: SymbolStats) -> float:
    """Zero-order empirical entropy in bits per symbol."""
    if stats.n < 1:
        raise ConstructionError("entropy of an empty sequence is undefined")
    nc = stats.counts[stats.counts > 0].astype(np.float64)
    return float(np.sum(nc / stats.n * np.log2(stats.n / nc)))


def entropy_of(seq) -> float:
    return entropy_h0(SymbolStats.from_sequence(seq))


class SymbolMap:
    """Invertible map ``a -> (l, c)`` for one partition scheme."""

    scheme: str
    sigma: int
    p: int

    # ------------------------------------------------------------ builders
    @classmethod
    def _from_table(cls, scheme: str, sigma: int, symbols: np.ndarray, part: np.ndarray,
                    p: int, params: tuple = ()) -> "SymbolMap":
        obj = cls.__new__(cls)
        obj.scheme, obj.sigma, obj.p, obj.params = scheme, int(sigma), int(p), tuple(params)
        obj.q = 0
        if symbols.shape[0] == sigma:
            obj.present = None
        else:
            obj.present = SparseBitVector(symbols + 1, sigma)
        obj.part_of = WaveletMatrix(part, max(p, 1))
        obj._finish()
        return obj

    @classmethod
    def uniform(cls, n: int, sigma: int) -> "SymbolMap":
        if sigma < 1:
            raise ConstructionError("alphabet must be non-empty")
        obj = cls.__new__(cls)
        obj.scheme, obj.sigma = "uniform", int(sigma)
        obj.p = max(1, (int(n) - 1).bit_length())
        obj.q = -(-obj.sigma // obj.p)
        obj.params = (int(n),)
        obj.present = obj.part_of = None
        obj._finish()
        return obj

    def _finish(self) -> None:
        if self.scheme == "uniform":
            sizes = np.zeros(self.p, dtype=np.int64)
            full, rest = divmod(self.sigma, self.q)
            sizes[:full] = self.q
            if rest:
                sizes[full] = rest
            self.sizes = sizes
        else:
            nocc = self.part_of.n
            self.sizes = self.part_of.rank_many(np.arange(self.p), np.full(self.p, nocc))

    # ------------------------------------------------------------- queries
    @property
    def n_occurring(self) -> int:
        return self.sigma if self.part_of is None else self.part_of.n

    def map_many(self, alphas):
        """Return ``(parts, codes)``; ``parts`` is -1 for unmapped symbols."""
        a = _as_index(alphas)
        parts = np.full(a.shape[0], -1, dtype=np.int64)
        codes = np.zeros(a.shape[0], dtype=np.int64)
        valid = (a >= 0) & (a < self.sigma)
        if self.scheme == "uniform":
            parts[valid] = a[valid] // self.q
            codes[valid] = a[valid] % self.q
            return parts, codes
        sel = np.flatnonzero(valid)
        if self.present is not None and sel.size:
            sel = sel[self.present.access_many(a[sel] + 1) == 1]
        if sel.size == 0:
            return parts, codes
        if self.present is None:
            idx = a[sel] + 1
        else:
            idx = self.present.rank1_many(a[sel] + 1)
        ell = self.part_of.access_many(idx)
        parts[sel] = ell
        codes[sel] = self.part_of.rank_many(ell, idx) - 1
        return parts, codes

    def unmap_many(self, parts, codes) -> np.ndarray:
        parts = _as_index(parts)
        codes = np.broadcast_to(_as_index(codes), parts.shape)
        if parts.size == 0:
            return parts.copy()
        if parts.min() < 0 or parts.max() >= self.p:
            raise RangeError(f"partition outside [0, {self.p})")
        if codes.min() < 0 or np.any(codes >= self.sizes[parts]):
            raise RangeError("local code outside its partition")
        if self.scheme == "uniform":
            return parts * self.q + codes
        idx = self.part_of.select_many(parts, codes + 1)
        if self.present is None:
            return idx - 1
        return self.present.select1_many(idx) - 1

    def map_symbol(self, alpha: int) -> tuple[int, int]:
        parts, codes = self.map_many([alpha])
        if parts[0] < 0:
            raise SymbolNotFound(alpha)
        return int(parts[0]), int(codes[0])

    def unmap_symbol(self, part: int, code: int) -> int:
        return int(self.unmap_many([part], [code])[0])

    def sub_sigma(self, part: int) -> int:
        return int(self.sizes[part])

    def members(self, part: int) -> list[int]:
        size = self.sub_sigma(part)
        if size == 0:
            return []
        return [int(x) for x in self.unmap_many(np.full(size, part), np.arange(size))]

    def partitions(self) -> list[list[int]]:
        return [self.members(ell) for ell in range(self.p)]

    # ------------------------------------------------------------ storage
    def space(self) -> Space:
        sp = Space(64 * 4)
        if self.present is not None:
            sp = sp + self.present.space()
        if self.part_of is not None:
            sp = sp + self.part_of.space()
        return sp

    def to_bytes(self) -> bytes:
        code = SCHEMES.index(self.scheme)
        params = list(self.params) + [0] * (2 - len(self.params))
        secs = [_io.ints(code, self.p, self.q, *params[:2])]
        if self.scheme != "uniform":
            secs.append(self.present.to_bytes() if self.present is not None else b"")
            secs.append(self.part_of.to_bytes())
        return _io.pack(_io.TAG_SYMMAP, self.sigma, secs)

    @classmethod
    def from_bytes(cls, buf, offset: int = 0):
        _, sigma, secs, end = _io.unpack(buf, offset, _io.TAG_SYMMAP)
        code, p, q, a, b = _io.read_ints(secs[0])
        if not 0 <= code < len(SCHEMES):
            raise FormatError(f"unknown partition scheme code {code}")
        scheme = SCHEMES[code]
        obj = cls.__new__(cls)
        obj.scheme, obj.sigma, obj.p, obj.q = scheme, sigma, p, q
        obj.params = {"sparse": (), "explicit": (), "dense": (a,), "uniform": (a,)}[scheme]
        if scheme == "uniform":
            obj.present = obj.part_of = None
        else:
            obj.present = SparseBitVector.from_bytes(secs[1])[0] if secs[1] else None
            obj.part_of, _ = WaveletMatrix.from_bytes(secs[2])
        obj._finish()
        return obj, end

    def describe(self) -> str:
        if self.scheme == "dense":
            return f"dense:{self.params[0]}"
        return self.scheme

    def __repr__(self) -> str:
        return f"SymbolMap({self.describe()}, sigma={self.sigma}, p={self.p})"


def sparse_raw_ids(stats: SymbolStats) -> np.ndarray:
    """Undensified partition id ``ceil(lg(n/n_a) * lg n)`` of each occurring symbol."""
    if stats.n < 1:
        raise ConstructionError("sparse partitioning needs a non-empty sequence")
    occ = stats.occurring
    nc = stats.counts[occ].astype(np.float64)
    return np.ceil(np.log2(stats.n / nc) * math.log2(stats.n)).astype(np.int64)


def assign_sparse(stats: SymbolStats) -> SymbolMap:
    raw = sparse_raw_ids(stats)
    distinct, part = np.unique(raw, return_inverse=True)
    return SymbolMap._from_table("sparse", stats.sigma, stats.occurring, part.astype(np.int64),
                                 distinct.shape[0])


def frequency_ranks(stats: SymbolStats) -> tuple[np.ndarray, np.ndarray]:
    """Occurring symbols and their 1-based frequency rank (ties: smaller code first)."""
    occ = stats.occurring
    order = np.lexsort((occ, -stats.counts[occ]))
    ranks = np.empty(occ.shape[0], dtype=np.int64)
    ranks[order] = np.arange(1, occ.shape[0] + 1)
    return occ, ranks


def assign_dense(stats: SymbolStats, l_min: int = 1) -> SymbolMap:
    """Partition ``floor(lg r)`` by frequency rank ``r``.

    Symbols whose class ``floor(lg r)`` is below ``l_min`` (the top
    ``2**l_min - 1`` ranks) each get a singleton partition; the remaining
    classes follow in order.  ``l_min = 1`` is the plain dense scheme.
    """
    if l_min < 1:
        raise ConstructionError("l_min must be at least 1")
    occ, ranks = frequency_ranks(stats)
    if occ.size == 0:
        raise ConstructionError("dense partitioning needs at least one occurring symbol")
    nsingle = (1 << l_min) - 1
    klass = np.frexp(ranks.astype(np.float64))[1].astype(np.int64) - 1  # floor(lg r), exact
    part = np.where(ranks <= nsingle, ranks - 1, klass - l_min + nsingle)
    distinct, part = np.unique(part, return_inverse=True)
    return SymbolMap._from_table("dense", stats.sigma, occ, part.astype(np.int64),
                                 distinct.shape[0], (int(l_min),))


def assign_uniform(n: int, sigma: int) -> SymbolMap:
    """``ceil(lg n)`` consecutive ranges of ``ceil(sigma / ceil(lg n))`` symbols."""
    return SymbolMap.uniform(n, sigma)


def assign_explicit(groups, sigma: int) -> SymbolMap:
    """Use the given disjoint symbol groups as partitions, in order."""
    symbols, part = [], []
    for ell, grp in enumerate(groups):
        for a in grp:
            symbols.append(int(a))
            part.append(ell)
    symbols = np.asarray(symbols, dtype=np.int64)
    part = np.asarray(part, dtype=np.int64)
    if symbols.size != np.unique(symbols).size:
        raise ConstructionError("explicit partitions overlap")
    if symbols.size and (symbols.min() < 0 or symbols.max() >= sigma):
        raise ConstructionError("explicit partition symbol outside the alphabet")
    order = np.argsort(symbols)
    return SymbolMap._from_table("explicit", sigma, symbols[order], part[order], len(groups))


def parse_scheme(spec: str):
    """Parse ``sparse``, ``dense``, ``dense:L`` or ``uniform``."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name == "sparse" and not arg:
        return ("sparse",)
    if name == "dense":
        return ("dense", int(arg) if arg else 1)
    if name == "uniform" and not arg:
        return ("uniform",)
    raise ValueError(f"unknown partition scheme {spec!r}")


def build_map(seq, scheme, sigma: int | None = None) -> SymbolMap:
    """Build a :class:`SymbolMap` for ``seq``.

    ``scheme`` is a string accepted by :func:`parse_scheme`, an already
    built :class:`SymbolMap`, or a list of symbol groups.
    """
    if isinstance(scheme, SymbolMap):
        return scheme
    stats = SymbolStats.from_sequence(seq, sigma)
    if isinstance(scheme, str):
        kind = parse_scheme(scheme)
        if kind[0] == "sparse":
            return assign_sparse(stats)
        if kind[0] == "dense":
            return assign_dense(stats, kind[1])
        return assign_uniform(stats.n, stats.sigma)
    return assign_explicit(scheme, stats.sigma)


def split_entropy(stats: SymbolStats, smap: SymbolMap) -> tuple[float, float]:
    """``(H0(t), sum_l n_l/n * lg sigma_l)`` for the partition-id string ``t``."""
    occ = stats.occurring
    parts, _ = smap.map_many(occ)
    n_l = np.bincount(parts, weights=stats.counts[occ], minlength=smap.p)
    h_t = entropy_h0(SymbolStats(stats.n, smap.p, n_l.astype(np.int64)))
    sizes = np.maximum(smap.sizes, 1).astype(np.float64)
    return h_t, float(np.sum(n_l / stats.n * np.log2(sizes)))
