"""Burrows-Wheeler transform and backward-search counting."""

from __future__ import annotations

import numpy as np

from . import _io
from .apstring import ApString
from .errors import ConstructionError, FormatError
from .runs import RunApString


def suffix_array(seq) -> np.ndarray:
    """0-based suffix array by prefix doubling.

    The last symbol must be a unique minimum (the sentinel) so that rank
    pairs never run past the end ambiguously.
    """
    s = np.asarray(seq, dtype=np.int64).reshape(-1)
    n = s.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    _, rank = np.unique(s, return_inverse=True)
    rank = rank.astype(np.int64)
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        a, b = rank[sa], second[sa]
        new = np.empty(n, dtype=np.int64)
        new[sa] = np.concatenate(([0], np.cumsum((a[1:] != a[:-1]) | (b[1:] != b[:-1]))))
        rank = new
        if rank.max() == n - 1 or k >= n:
            return sa.astype(np.int64)
        k *= 2


def build_bwt(text) -> tuple[np.ndarray, np.ndarray]:
    """BWT of ``text`` + sentinel, as ``(bwt, sa)``.

    Text symbols are shifted up by one so the sentinel is 0.  ``sa`` is
    the 0-based suffix array of the terminated text, and
    ``bwt[i] = T[sa[i] - 1]`` with wrap-around.
    """
    t = np.asarray(text, dtype=np.int64).reshape(-1)
    if t.size == 0:
        raise ConstructionError("cannot transform an empty text")
    if t.min() < 0:
        raise ConstructionError("symbols must be non-negative")
    T = np.concatenate((t + 1, [0]))
    sa = suffix_array(T)
    return T[sa - 1], sa


def invert_bwt(bwt) -> np.ndarray:
    """Recover the (unshifted) text from a sentinel-terminated BWT."""
    L = np.asarray(bwt, dtype=np.int64).reshape(-1)
    n = L.shape[0]
    if n == 0 or np.count_nonzero(L == 0) != 1:
        raise ConstructionError("BWT must contain exactly one sentinel")
    # row order of F is the stable sort of L, so LF is its inverse permutation
    lf = np.empty(n, dtype=np.int64)
    lf[np.argsort(L, kind="stable")] = np.arange(n)
    out = np.empty(n - 1, dtype=np.int64)
    i = 0
    for k in range(n - 2, -1, -1):
        out[k] = L[i] - 1
        i = lf[i]
    return out


def runs_in_bwt(bwt) -> int:
    b = np.asarray(bwt).reshape(-1)
    if b.size == 0:
        return 0
    return 1 + int(np.count_nonzero(b[1:] != b[:-1]))


class FmIndex:
    """Counting-only FM-index with the BWT kept in an ApString or RunApString."""

    def __init__(self, bwt_struct, C: np.ndarray, sigma: int):
        self.bwt, self.C, self.sigma = bwt_struct, C, sigma
        self.n = bwt_struct.n

    @classmethod
    def build(cls, text, structure: str = "aps", scheme="sparse",
              sigma: int | None = None) -> "FmIndex":
        t = np.asarray(text, dtype=np.int64).reshape(-1)
        sigma = int(t.max()) + 1 if sigma is None else int(sigma)
        bwt, _ = build_bwt(t)
        return cls.from_bwt(bwt, sigma, structure, scheme)

    @classmethod
    def from_bwt(cls, bwt, sigma: int, structure: str = "aps", scheme="sparse") -> "FmIndex":
        bwt = np.asarray(bwt, dtype=np.int64)
        if structure == "aps":
            st = ApString.build(bwt, scheme, sigma + 1)
        elif structure == "raps":
            st = RunApString(bwt, sigma + 1)
        else:
            raise ValueError(f"unknown structure {structure!r}")
        counts = np.bincount(bwt, minlength=sigma + 1)
        C = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
        return cls(st, C, sigma)

    @property
    def structure(self) -> str:
        return "raps" if isinstance(self.bwt, RunApString) else "aps"

    def count(self, pattern) -> int:
        return int(self.count_many([pattern])[0])

    def count_many(self, patterns) -> np.ndarray:
        """Backward search for many patterns, batched by pattern length."""
        pats = [np.asarray(p, dtype=np.int64).reshape(-1) for p in patterns]
        out = np.zeros(len(pats), dtype=np.int64)
        by_len: dict[int, list[int]] = {}
        for k, p in enumerate(pats):
            if p.size == 0:
                out[k] = self.n - 1
            elif p.min() >= 0 and p.max() < self.sigma:
                by_len.setdefault(p.shape[0], []).append(k)
        for m, ids in by_len.items():
            P = np.stack([pats[k] for k in ids]) + 1
            sp = np.ones(len(ids), dtype=np.int64)
            ep = np.full(len(ids), self.n, dtype=np.int64)
            live = np.arange(len(ids))
            for col in range(m - 1, -1, -1):
                c = P[live, col]
                sp[live] = self.C[c] + self.bwt.rank_many(c, sp[live] - 1) + 1
                ep[live] = self.C[c] + self.bwt.rank_many(c, ep[live])
                live = live[sp[live] <= ep[live]]
                if live.size == 0:
                    break
            res = np.zeros(len(ids), dtype=np.int64)
            res[live] = ep[live] - sp[live] + 1
            out[ids] = res
        return out

    def invert(self) -> np.ndarray:
        """Rebuild the text with LF steps answered by the BWT structure."""
        out = np.empty(self.n - 1, dtype=np.int64)
        i = 1
        for k in range(self.n - 2, -1, -1):
            c = self.bwt.access(i)
            out[k] = c - 1
            i = int(self.C[c]) + self.bwt.rank(c, i)
        return out

    def runs(self) -> int:
        return runs_in_bwt(self.bwt.to_array())

    def extras_bytes(self) -> bytes:
        return _io.pack(_io.TAG_FM, self.sigma, [_io.array(self.C, np.int64)])

    @classmethod
    def from_parts(cls, bwt_struct, extras: bytes) -> "FmIndex":
        _, sigma, secs, _ = _io.unpack(extras, 0, _io.TAG_FM)
        C = _io.read_array(secs[0], np.int64)
        if C.shape[0] != sigma + 2 or C[-1] != bwt_struct.n:
            raise FormatError("FM count array disagrees with the BWT")
        return cls(bwt_struct, C, sigma)


def naive_count(text, pattern) -> int:
    """Occurrences of ``pattern`` in ``text`` by candidate filtering."""
    t = np.asarray(text, dtype=np.int64).reshape(-1)
    p = np.asarray(pattern, dtype=np.int64).reshape(-1)
    m = p.shape[0]
    if m == 0:
        return t.shape[0]
    if m > t.shape[0]:
        return 0
    cand = np.flatnonzero(t[: t.shape[0] - m + 1] == p[0])
    for k in range(1, m):
        cand = cand[t[cand + k] == p[k]]
        if cand.size == 0:
            break
    return int(cand.shape[0])
