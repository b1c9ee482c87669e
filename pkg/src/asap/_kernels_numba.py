"""Compiled kernels.

Every public function takes raw numpy arrays plus an int64 query array
and returns an int64 answer array.  Positions are 1-based and ranks
count ones in the prefix ``[1..i]``; callers validate ranges.
"""

import numpy as np
from numba import njit

from ._tables import POP8, SEL8

_JIT = dict(cache=True, nogil=True)

_ONE = np.uint64(1)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S56 = np.uint64(56)
_BYTE = np.uint64(255)


@njit(inline="always", **_JIT)
def _popcount(x):
    x = x - ((x >> _S1) & _M1)
    x = (x & _M2) + ((x >> _S2) & _M2)
    x = (x + (x >> _S4)) & _M4
    return np.int64((x * _H01) >> _S56)


@njit(inline="always", **_JIT)
def _low_mask(b):
    return (_ONE << np.uint64(b)) - _ONE


@njit(**_JIT)
def _select_in_word(x, r):
    # 0-based offset of the r-th (1-based) set bit of x
    for k in range(8):
        byte = np.int64((x >> np.uint64(8 * k)) & _BYTE)
        c = POP8[byte]
        if r <= c:
            return 8 * k + SEL8[byte, r - 1]
        r -= c
    return 64


@njit(inline="always", **_JIT)
def _bit(words, p):
    # p is 0-based
    return np.int64((words[p >> 6] >> np.uint64(p & 63)) & _ONE)


@njit(**_JIT)
def _rank1(words, sup, offs, i):
    w = i >> 6
    b = i & 63
    sb = w >> 3
    r = sup[sb]
    if offs.shape[0] > 0:
        r += offs[w]
    else:
        for x in range(sb << 3, w):
            r += _popcount(words[x])
    if b:
        r += _popcount(words[w] & _low_mask(b))
    return r


@njit(**_JIT)
def _select1(words, sup, offs, samp, k, j):
    t = (j - 1) // k
    lo = samp[t] >> 9
    if t + 1 < samp.shape[0]:
        hi = samp[t + 1] >> 9
    else:
        hi = sup.shape[0] - 1
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if sup[mid] < j:
            lo = mid
        else:
            hi = mid - 1
    r = j - sup[lo]
    w = lo << 3
    if offs.shape[0] > 0:
        wend = w + 8
        while w + 1 < wend and offs[w + 1] < r:
            w += 1
        r -= offs[w]
    else:
        c = _popcount(words[w])
        while c < r:
            r -= c
            w += 1
            c = _popcount(words[w])
    return 64 * w + _select_in_word(words[w], r) + 1


@njit(**_JIT)
def _select0(words, sup, offs, samp, k, j):
    t = (j - 1) // k
    lo = samp[t] >> 9
    if t + 1 < samp.shape[0]:
        hi = samp[t + 1] >> 9
    else:
        hi = sup.shape[0] - 1
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if 512 * mid - sup[mid] < j:
            lo = mid
        else:
            hi = mid - 1
    r = j - (512 * lo - sup[lo])
    w = lo << 3
    if offs.shape[0] > 0:
        wend = w + 8
        while w + 1 < wend and 64 * (w + 1 - (lo << 3)) - offs[w + 1] < r:
            w += 1
        r -= 64 * (w - (lo << 3)) - offs[w]
    else:
        c = 64 - _popcount(words[w])
        while c < r:
            r -= c
            w += 1
            c = 64 - _popcount(words[w])
    return 64 * w + _select_in_word(~words[w], r) + 1


@njit(inline="always", **_JIT)
def _iv_get(words, width, k):
    if width == 0:
        return np.int64(0)
    bp = k * width
    w = bp >> 6
    off = bp & 63
    x = words[w] >> np.uint64(off)
    if off + width > 64:
        x |= words[w + 1] << np.uint64(64 - off)
    return np.int64(x & _low_mask(width))


# ---------------------------------------------------------------- plain


@njit(**_JIT)
def bv_rank1(words, sup, offs, idx):
    out = np.empty(idx.shape[0], np.int64)
    for q in range(idx.shape[0]):
        out[q] = _rank1(words, sup, offs, idx[q])
    return out


@njit(**_JIT)
def bv_select1(words, sup, offs, samp, k, js):
    out = np.empty(js.shape[0], np.int64)
    for q in range(js.shape[0]):
        out[q] = _select1(words, sup, offs, samp, k, js[q])
    return out


@njit(**_JIT)
def bv_select0(words, sup, offs, samp, k, js):
    out = np.empty(js.shape[0], np.int64)
    for q in range(js.shape[0]):
        out[q] = _select0(words, sup, offs, samp, k, js[q])
    return out


@njit(**_JIT)
def bv_access(words, idx):
    out = np.empty(idx.shape[0], np.int64)
    for q in range(idx.shape[0]):
        out[q] = _bit(words, idx[q] - 1)
    return out


@njit(**_JIT)
def iv_get(words, width, idx):
    out = np.empty(idx.shape[0], np.int64)
    for q in range(idx.shape[0]):
        out[q] = _iv_get(words, width, idx[q])
    return out


# ----------------------------------------------------------- elias-fano


@njit(**_JIT)
def _ef_bucket(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, v):
    # first position p >= start of bucket (v >> lw) whose element is >= v
    h = v >> lw
    lo = v & ((1 << lw) - 1)
    if h == 0:
        p = 0
    else:
        p = _select0(hw, hsup, hoffs, hs0, k, h)
    j = p - h
    while p < hlen and _bit(hw, p) == 1 and _iv_get(lwords, lw, j) < lo:
        p += 1
        j += 1
    return p, j


@njit(**_JIT)
def _ef_rank_one(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, m, u, i):
    if m == 0 or i <= 0:
        return 0
    if i >= u:
        return m
    return _ef_bucket(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, i)[1]


@njit(**_JIT)
def _ef_probe_one(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, m, i):
    # (bit at i, rank1(i)) from a single bucket scan
    if m == 0:
        return 0, 0
    v = i - 1
    p, j = _ef_bucket(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, v)
    if p < hlen and _bit(hw, p) == 1 and _iv_get(lwords, lw, j) == (v & ((1 << lw) - 1)):
        return 1, j + 1
    return 0, j


@njit(**_JIT)
def _ef_select_one(hw, hsup, hoffs, hs1, k, lwords, lw, j):
    hpos = _select1(hw, hsup, hoffs, hs1, k, j) - 1
    return ((hpos - (j - 1)) << lw) + _iv_get(lwords, lw, j - 1) + 1


@njit(**_JIT)
def ef_rank1(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, m, u, idx):
    out = np.empty(idx.shape[0], np.int64)
    for q in range(idx.shape[0]):
        out[q] = _ef_rank_one(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, m, u, idx[q])
    return out


@njit(**_JIT)
def ef_select1(hw, hsup, hoffs, hs1, k, lwords, lw, js):
    out = np.empty(js.shape[0], np.int64)
    for q in range(js.shape[0]):
        out[q] = _ef_select_one(hw, hsup, hoffs, hs1, k, lwords, lw, js[q])
    return out


@njit(**_JIT)
def ef_access(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, m, u, idx):
    out = np.empty(idx.shape[0], np.int64)
    for q in range(idx.shape[0]):
        out[q] = _ef_probe_one(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, m, idx[q])[0]
    return out


# ------------------------------------------------------- wavelet matrix


@njit(**_JIT)
def _wm_access_one(words, sup, offs, n, nlev, zeros, base1, i):
    p = i - 1
    c = 0
    for lv in range(nlev):
        start = lv * n
        r1 = _rank1(words, sup, offs, start + p) - base1[lv]
        if _bit(words, start + p):
            c = (c << 1) | 1
            p = zeros[lv] + r1
        else:
            c = c << 1
            p = p - r1
    return c


@njit(**_JIT)
def _wm_rank_one(words, sup, offs, n, nlev, zeros, base1, c, e):
    s = 0
    for lv in range(nlev):
        start = lv * n
        rs = _rank1(words, sup, offs, start + s) - base1[lv]
        re = _rank1(words, sup, offs, start + e) - base1[lv]
        if (c >> (nlev - 1 - lv)) & 1:
            s = zeros[lv] + rs
            e = zeros[lv] + re
        else:
            s = s - rs
            e = e - re
    return e - s


@njit(**_JIT)
def _wm_select_one(words, sup, offs, samp1, samp0, k, n, nlev, zeros, base1, c, j):
    s = 0
    for lv in range(nlev):
        rs = _rank1(words, sup, offs, lv * n + s) - base1[lv]
        if (c >> (nlev - 1 - lv)) & 1:
            s = zeros[lv] + rs
        else:
            s = s - rs
    pos = s + j - 1
    for lv in range(nlev - 1, -1, -1):
        start = lv * n
        if (c >> (nlev - 1 - lv)) & 1:
            pos = _select1(words, sup, offs, samp1, k, base1[lv] + pos - zeros[lv] + 1) - 1 - start
        else:
            pos = _select0(words, sup, offs, samp0, k, start - base1[lv] + pos + 1) - 1 - start
    return pos + 1


@njit(**_JIT)
def wm_access(words, sup, offs, n, nlev, zeros, base1, idx):
    out = np.empty(idx.shape[0], np.int64)
    for q in range(idx.shape[0]):
        out[q] = _wm_access_one(words, sup, offs, n, nlev, zeros, base1, idx[q])
    return out


@njit(**_JIT)
def wm_rank(words, sup, offs, n, nlev, zeros, base1, cs, idx):
    out = np.empty(idx.shape[0], np.int64)
    for q in range(idx.shape[0]):
        out[q] = _wm_rank_one(words, sup, offs, n, nlev, zeros, base1, cs[q], idx[q])
    return out


@njit(**_JIT)
def wm_select(words, sup, offs, samp1, samp0, k, n, nlev, zeros, base1, cs, js):
    out = np.empty(js.shape[0], np.int64)
    for q in range(js.shape[0]):
        out[q] = _wm_select_one(words, sup, offs, samp1, samp0, k, n, nlev, zeros, base1,
                                cs[q], js[q])
    return out


# ------------------------------------------------------------ ensembles
#
# E and W hold the bit vectors B_l and wavelet matrices s_l of all
# partitions, concatenated; see asap._ensemble for the tuple layout.


@njit(inline="always", **_JIT)
def _ef_of(E, l):
    hw = E[0][E[5][l]:E[5][l + 1]]
    hsup = E[1][E[6][l]:E[6][l + 1]]
    hs0 = E[2][E[7][l]:E[7][l + 1]]
    hs1 = E[3][E[8][l]:E[8][l + 1]]
    lwords = E[4][E[9][l]:E[9][l + 1]]
    return hw, hsup, hs0, hs1, lwords, E[10][l], E[11][l], E[12][l]


@njit(inline="always", **_JIT)
def _wm_of(W, l):
    words = W[0][W[7][l]:W[7][l + 1]]
    sup = W[1][W[8][l]:W[8][l + 1]]
    offs = W[2][W[9][l]:W[9][l + 1]]
    s1 = W[3][W[10][l]:W[10][l + 1]]
    s0 = W[4][W[11][l]:W[11][l + 1]]
    zeros = W[5][W[12][l]:W[12][l + 1]]
    base1 = W[6][W[12][l]:W[12][l + 1]]
    return words, sup, offs, s1, s0, zeros, base1, W[13][l], W[14][l]


@njit(**_JIT)
def ens_rank(E, W, parts, codes, idx):
    u, k, eo = E[13], E[14], E[15]
    out = np.empty(idx.shape[0], np.int64)
    for q in range(idx.shape[0]):
        hw, hsup, hs0, hs1, lwords, lw, m, hlen = _ef_of(E, parts[q])
        r1 = _ef_rank_one(hw, hsup, eo, hs0, k, hlen, lwords, lw, m, u, idx[q])
        words, sup, offs, s1, s0, zeros, base1, n, nlev = _wm_of(W, parts[q])
        out[q] = _wm_rank_one(words, sup, offs, n, nlev, zeros, base1, codes[q], r1)
    return out


@njit(**_JIT)
def ens_select(E, W, parts, codes, js):
    k, eo = E[14], E[15]
    out = np.empty(js.shape[0], np.int64)
    for q in range(js.shape[0]):
        words, sup, offs, s1, s0, zeros, base1, n, nlev = _wm_of(W, parts[q])
        x = _wm_select_one(words, sup, offs, s1, s0, k, n, nlev, zeros, base1, codes[q], js[q])
        hw, hsup, hs0, hs1, lwords, lw, m, hlen = _ef_of(E, parts[q])
        out[q] = _ef_select_one(hw, hsup, eo, hs1, k, lwords, lw, x)
    return out


@njit(**_JIT)
def ens_access(E, W, p, idx):
    k, eo = E[14], E[15]
    parts = np.full(idx.shape[0], -1, np.int64)
    codes = np.zeros(idx.shape[0], np.int64)
    for q in range(idx.shape[0]):
        for l in range(p):
            hw, hsup, hs0, hs1, lwords, lw, m, hlen = _ef_of(E, l)
            if m == 0:
                continue
            hit, r1 = _ef_probe_one(hw, hsup, eo, hs0, k, hlen, lwords, lw, m, idx[q])
            if hit:
                words, sup, offs, s1, s0, zeros, base1, n, nlev = _wm_of(W, l)
                parts[q] = l
                codes[q] = _wm_access_one(words, sup, offs, n, nlev, zeros, base1, r1)
                break
    return parts, codes


@njit(**_JIT)
def ens_snippet(E, W, p, i, length):
    u, k, eo = E[13], E[14], E[15]
    parts = np.full(length, -1, np.int64)
    codes = np.zeros(length, np.int64)
    for l in range(p):
        hw, hsup, hs0, hs1, lwords, lw, m, hlen = _ef_of(E, l)
        if m == 0:
            continue
        lo = _ef_rank_one(hw, hsup, eo, hs0, k, hlen, lwords, lw, m, u, i - 1)
        hi = _ef_rank_one(hw, hsup, eo, hs0, k, hlen, lwords, lw, m, u, i + length - 1)
        if hi == lo:
            continue
        words, sup, offs, s1, s0, zeros, base1, n, nlev = _wm_of(W, l)
        for cur in range(lo + 1, hi + 1):
            at = _ef_select_one(hw, hsup, eo, hs1, k, lwords, lw, cur) - i
            parts[at] = l
            codes[at] = _wm_access_one(words, sup, offs, n, nlev, zeros, base1, cur)
    return parts, codes


@njit(**_JIT)
def ens_intersect(E, W, D, parts, codes, totals, nslots):
    """Slots (1-based) holding every term, by round-robin candidate elimination.

    ``D`` is a one-vector ensemble marking the first position of each slot.
    """
    u, k, eo = E[13], E[14], E[15]
    dw, dsup, ds0, ds1, dlow, dlw, dm, dhlen = _ef_of(D, 0)
    found = np.empty(nslots, np.int64)
    nf, d, matched, ti, nt = 0, 1, 0, 0, parts.shape[0]
    while True:
        start = _ef_select_one(dw, dsup, eo, ds1, k, dlow, dlw, d)
        hw, hsup, hs0, hs1, lwords, lw, m, hlen = _ef_of(E, parts[ti])
        words, sup, offs, s1, s0, zeros, base1, n, nlev = _wm_of(W, parts[ti])
        r1 = _ef_rank_one(hw, hsup, eo, hs0, k, hlen, lwords, lw, m, u, start - 1)
        occ = _wm_rank_one(words, sup, offs, n, nlev, zeros, base1, codes[ti], r1) + 1
        if occ > totals[ti]:
            break
        x = _wm_select_one(words, sup, offs, s1, s0, k, n, nlev, zeros, base1, codes[ti], occ)
        pos = _ef_select_one(hw, hsup, eo, hs1, k, lwords, lw, x)
        dd = _ef_rank_one(dw, dsup, eo, ds0, k, dhlen, dlow, dlw, dm, u, pos)
        if dd == d:
            matched += 1
        else:
            d, matched = dd, 1
        if matched == nt:
            found[nf] = d
            nf += 1
            d, matched = d + 1, 0
            if d > nslots:
                break
        ti = (ti + 1) % nt
    return found[:nf]
