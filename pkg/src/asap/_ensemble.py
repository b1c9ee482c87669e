"""Flatten the per-partition structures of an ApString into shared arrays.

Kernels that walk several partitions per query take two tuples:

``E`` (bit vectors ``B_l``)::

    0 hw  1 hsup  2 hs0  3 hs1  4 low words      (concatenated arrays)
    5..9  offsets of each array, length p+1
    10 lw  11 m  12 hlen                         (per partition)
    13 u  14 sample rate  15 empty offset table

``W`` (wavelet matrices ``s_l``)::

    0 words  1 sup  2 offs  3 samp1  4 samp0  5 zeros  6 base1
    7..11 offsets of arrays 0..4, 12 offsets of zeros/base1
    13 n  14 levels                              (per partition)

After flattening, each component's arrays are views into the shared
ones, so memory is not duplicated.
"""

from __future__ import annotations

import numpy as np

_EMPTY_U64 = np.zeros(0, dtype=np.uint64)
_EMPTY_I64 = np.zeros(0, dtype=np.int64)
_EMPTY_U16 = np.zeros(0, dtype=np.uint16)


def _concat(parts, dtype):
    sizes = np.array([a.shape[0] for a in parts], dtype=np.int64)
    off = np.concatenate(([0], np.cumsum(sizes))).astype(np.int64)
    flat = np.concatenate(parts).astype(dtype) if parts else np.zeros(0, dtype)
    return flat, off


def _views(flat, off):
    return [flat[off[k]:off[k + 1]] for k in range(off.shape[0] - 1)]


def _rate(B, S):
    rates = {b.sample_rate for b in B} | {s.bits.sample_rate for s in S if s.bits is not None}
    if len(rates) > 1:
        raise ValueError("all partitions must share one sample rate")
    return rates.pop() if rates else 512


def flatten_bits(B, u: int, k: int | None = None):
    """The ``E`` tuple alone, for a list of sparse bit vectors over ``[1, u]``."""
    k = _rate(B, []) if k is None else k
    hw, hsup, hs0, hs1, low = [], [], [], [], []
    for b in B:
        h = b.high
        if h is None:
            hw.append(_EMPTY_U64), hsup.append(_EMPTY_I64), hs0.append(_EMPTY_I64)
            hs1.append(_EMPTY_I64)
        else:
            hw.append(h.words), hsup.append(h.sup), hs0.append(h.samp0), hs1.append(h.samp1)
        low.append(b.low.words)
    cols = [_concat(hw, np.uint64), _concat(hsup, np.int64), _concat(hs0, np.int64),
            _concat(hs1, np.int64), _concat(low, np.uint64)]
    for b, w, s, z0, z1, lo in zip(B, *(_views(*c) for c in cols)):
        if b.high is not None:
            b.high.words, b.high.sup, b.high.samp0, b.high.samp1 = w, s, z0, z1
        b.low.words = lo
    return (tuple(c[0] for c in cols) + tuple(c[1] for c in cols)
            + (np.array([b.lw for b in B], np.int64), np.array([b.ones for b in B], np.int64),
               np.array([b.hlen for b in B], np.int64), int(u), int(k), _EMPTY_U16))


def flatten(B, S, u: int):
    E = flatten_bits(B, u, _rate(B, S))

    ww, wsup, woffs, ws1, ws0, wz, wb = [], [], [], [], [], [], []
    for s in S:
        if s.bits is None:
            for col in (ww, wsup, ws1, ws0):
                col.append(_EMPTY_U64 if col is ww else _EMPTY_I64)
            woffs.append(_EMPTY_U16)
        else:
            ww.append(s.bits.words), wsup.append(s.bits.sup), woffs.append(s.bits.offs)
            ws1.append(s.bits.samp1), ws0.append(s.bits.samp0)
        wz.append(s.zeros), wb.append(s.base1)
    cols = [_concat(ww, np.uint64), _concat(wsup, np.int64), _concat(woffs, np.uint16),
            _concat(ws1, np.int64), _concat(ws0, np.int64)]
    zeros, lev = _concat(wz, np.int64)
    base1, _ = _concat(wb, np.int64)
    for s, w, su, of, z1, z0, zv, bv in zip(S, *(_views(*c) for c in cols),
                                            _views(zeros, lev), _views(base1, lev)):
        if s.bits is not None:
            s.bits.words, s.bits.sup, s.bits.offs, s.bits.samp1, s.bits.samp0 = w, su, of, z1, z0
        s.zeros, s.base1 = zv, bv
    W = (tuple(c[0] for c in cols) + (zeros, base1) + tuple(c[1] for c in cols)
         + (lev, np.array([s.n for s in S], np.int64),
            np.array([s.nlevels for s in S], np.int64)))
    return E, W
