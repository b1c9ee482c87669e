"""Vectorized numpy kernels, selected when numba is disabled.

Same signatures and answers as the compiled kernels; the select
directory samples are accepted but unused, since a whole-array
``searchsorted`` over the block counts already vectorizes the search.
"""

import numpy as np

from ._tables import POP8, SEL8

_U1 = np.uint64(1)
_SHIFTS = (np.arange(8, dtype=np.uint64) * np.uint64(8))[None, :]
_LANES = np.arange(8, dtype=np.int64)[None, :]


def _popcount(x):
    return np.bitwise_count(x).astype(np.int64)


def _low_mask(b):
    return (_U1 << b.astype(np.uint64)) - _U1


def _select_in_word(x, r):
    if x.shape[0] == 0:
        return np.zeros(0, np.int64)
    nbytes = ((x[:, None] >> _SHIFTS) & np.uint64(255)).astype(np.int64)
    cum = POP8[nbytes].cumsum(axis=1)
    bi = (cum < r[:, None]).sum(axis=1)
    rows = np.arange(x.shape[0])
    prev = np.where(bi > 0, cum[rows, np.maximum(bi - 1, 0)], 0)
    return 8 * bi + SEL8[nbytes[rows, bi], r - prev - 1]


def _bits(words, p):
    return ((words[p >> 6] >> (p & 63).astype(np.uint64)) & _U1).astype(np.int64)


def _block_prefix(words, sup, offs, w):
    """Ones before word ``w`` (absolute)."""
    sb = w >> 3
    r = sup[sb].astype(np.int64)
    if offs.shape[0] > 0:
        return r + offs[w]
    base = sb << 3
    for d in range(7):
        x = base + d
        r += np.where(x < w, _popcount(words[x]), 0)
    return r


def _rank1(words, sup, offs, idx):
    w = idx >> 6
    r = _block_prefix(words, sup, offs, w)
    return r + _popcount(words[w] & _low_mask(idx & 63))


def _select_generic(words, block_before, j, invert):
    sb = np.searchsorted(block_before, j, side="left") - 1
    r = j - block_before[sb]
    base = sb << 3
    blk = words[base[:, None] + _LANES]
    if invert:
        blk = ~blk
    cum = _popcount(blk).cumsum(axis=1)
    wi = (cum < r[:, None]).sum(axis=1)
    rows = np.arange(j.shape[0])
    prev = np.where(wi > 0, cum[rows, np.maximum(wi - 1, 0)], 0)
    return 64 * (base + wi) + _select_in_word(blk[rows, wi], r - prev) + 1


# ---------------------------------------------------------------- plain


def bv_rank1(words, sup, offs, idx):
    return _rank1(words, sup, offs, np.asarray(idx, np.int64))


def bv_select1(words, sup, offs, samp, k, js):
    return _select_generic(words, sup, np.asarray(js, np.int64), False)


def bv_select0(words, sup, offs, samp, k, js):
    zeros_before = 512 * np.arange(sup.shape[0], dtype=np.int64) - sup
    return _select_generic(words, zeros_before, np.asarray(js, np.int64), True)


def bv_access(words, idx):
    return _bits(words, np.asarray(idx, np.int64) - 1)


def iv_get(words, width, idx):
    idx = np.asarray(idx, np.int64)
    if width == 0:
        return np.zeros(idx.shape[0], np.int64)
    bp = idx * width
    w = bp >> 6
    off = (bp & 63).astype(np.uint64)
    x = words[w] >> off
    spill = (bp & 63) + width > 64
    if spill.any():
        hi = words[np.minimum(w + 1, words.shape[0] - 1)] << (np.uint64(64) - off)
        x = np.where(spill, x | hi, x)
    return (x & ((_U1 << np.uint64(width)) - _U1)).astype(np.int64)


# ----------------------------------------------------------- elias-fano


def _ef_bucket(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, v):
    h = v >> lw
    lo = v & ((1 << lw) - 1)
    p = np.zeros(v.shape[0], np.int64)
    nz = h > 0
    if nz.any():
        p[nz] = bv_select0(hw, hsup, hoffs, hs0, k, h[nz])
    j = p - h
    active = np.arange(v.shape[0])
    while active.shape[0]:
        a = active[p[active] < hlen]
        a = a[_bits(hw, p[a]) == 1]
        a = a[iv_get(lwords, lw, j[a]) < lo[a]]
        p[a] += 1
        j[a] += 1
        active = a
    return p, j


def ef_rank1(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, m, u, idx):
    idx = np.asarray(idx, np.int64)
    out = np.zeros(idx.shape[0], np.int64)
    if m == 0:
        return out
    out[idx >= u] = m
    mid = np.flatnonzero((idx > 0) & (idx < u))
    if mid.shape[0]:
        _, j = _ef_bucket(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, idx[mid])
        out[mid] = j
    return out


def ef_select1(hw, hsup, hoffs, hs1, k, lwords, lw, js):
    js = np.asarray(js, np.int64)
    hpos = bv_select1(hw, hsup, hoffs, hs1, k, js) - 1
    return ((hpos - (js - 1)) << lw) + iv_get(lwords, lw, js - 1) + 1


def ef_access(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, m, u, idx):
    idx = np.asarray(idx, np.int64)
    out = np.zeros(idx.shape[0], np.int64)
    if m == 0 or idx.shape[0] == 0:
        return out
    v = idx - 1
    p, j = _ef_bucket(hw, hsup, hoffs, hs0, k, hlen, lwords, lw, v)
    ok = np.flatnonzero(p < hlen)
    ok = ok[_bits(hw, p[ok]) == 1]
    hit = iv_get(lwords, lw, j[ok]) == (v[ok] & ((1 << lw) - 1))
    out[ok[hit]] = 1
    return out


# ------------------------------------------------------- wavelet matrix


def wm_access(words, sup, offs, n, nlev, zeros, base1, idx):
    p = np.asarray(idx, np.int64) - 1
    c = np.zeros(p.shape[0], np.int64)
    for lv in range(nlev):
        start = lv * n
        r1 = _rank1(words, sup, offs, start + p) - base1[lv]
        bit = _bits(words, start + p)
        c = (c << 1) | bit
        p = np.where(bit == 1, zeros[lv] + r1, p - r1)
    return c


def wm_rank(words, sup, offs, n, nlev, zeros, base1, cs, idx):
    cs = np.asarray(cs, np.int64)
    s = np.zeros(cs.shape[0], np.int64)
    e = np.asarray(idx, np.int64).copy()
    for lv in range(nlev):
        start = lv * n
        rs = _rank1(words, sup, offs, start + s) - base1[lv]
        re = _rank1(words, sup, offs, start + e) - base1[lv]
        one = ((cs >> (nlev - 1 - lv)) & 1) == 1
        s = np.where(one, zeros[lv] + rs, s - rs)
        e = np.where(one, zeros[lv] + re, e - re)
    return e - s


def wm_select(words, sup, offs, samp1, samp0, k, n, nlev, zeros, base1, cs, js):
    cs = np.asarray(cs, np.int64)
    js = np.asarray(js, np.int64)
    s = np.zeros(cs.shape[0], np.int64)
    for lv in range(nlev):
        rs = _rank1(words, sup, offs, lv * n + s) - base1[lv]
        one = ((cs >> (nlev - 1 - lv)) & 1) == 1
        s = np.where(one, zeros[lv] + rs, s - rs)
    pos = s + js - 1
    for lv in range(nlev - 1, -1, -1):
        start = lv * n
        one = ((cs >> (nlev - 1 - lv)) & 1) == 1
        nxt = np.empty_like(pos)
        if one.any():
            q = base1[lv] + pos[one] - zeros[lv] + 1
            nxt[one] = bv_select1(words, sup, offs, samp1, k, q) - 1 - start
        if (~one).any():
            q = start - base1[lv] + pos[~one] + 1
            nxt[~one] = bv_select0(words, sup, offs, samp0, k, q) - 1 - start
        pos = nxt
    return pos + 1


# ------------------------------------------------------------ ensembles
#
# Same tuple layout as the compiled kernels (see asap._ensemble); here
# queries are grouped by partition and each group goes through the
# per-structure kernels on array slices.


def _ef_of(E, l):
    sl = [E[a][E[5 + a][l]:E[5 + a][l + 1]] for a in range(5)]
    return sl + [int(E[10][l]), int(E[11][l]), int(E[12][l])]


def _wm_of(W, l):
    sl = [W[a][W[7 + a][l]:W[7 + a][l + 1]] for a in range(5)]
    lev = slice(W[12][l], W[12][l + 1])
    return sl + [W[5][lev], W[6][lev], int(W[13][l]), int(W[14][l])]


def _groups(parts):
    order = np.argsort(parts, kind="stable")
    sp = parts[order]
    cuts = np.flatnonzero(np.diff(sp)) + 1
    for a, b in zip(np.concatenate(([0], cuts)), np.concatenate((cuts, [sp.shape[0]]))):
        yield int(sp[a]), order[a:b]


def ens_rank(E, W, parts, codes, idx):
    u, k, eo = E[13], E[14], E[15]
    out = np.zeros(idx.shape[0], np.int64)
    for l, sel in _groups(parts):
        hw, hsup, hs0, hs1, lwords, lw, m, hlen = _ef_of(E, l)
        r1 = ef_rank1(hw, hsup, eo, hs0, k, hlen, lwords, lw, m, u, idx[sel])
        words, sup, offs, s1, s0, zeros, base1, n, nlev = _wm_of(W, l)
        out[sel] = wm_rank(words, sup, offs, n, nlev, zeros, base1, codes[sel], r1)
    return out


def ens_select(E, W, parts, codes, js):
    k, eo = E[14], E[15]
    out = np.zeros(js.shape[0], np.int64)
    for l, sel in _groups(parts):
        words, sup, offs, s1, s0, zeros, base1, n, nlev = _wm_of(W, l)
        x = wm_select(words, sup, offs, s1, s0, k, n, nlev, zeros, base1, codes[sel], js[sel])
        hw, hsup, hs0, hs1, lwords, lw, m, hlen = _ef_of(E, l)
        out[sel] = ef_select1(hw, hsup, eo, hs1, k, lwords, lw, x)
    return out


def ens_access(E, W, p, idx):
    u, k, eo = E[13], E[14], E[15]
    parts = np.full(idx.shape[0], -1, np.int64)
    codes = np.zeros(idx.shape[0], np.int64)
    rem = np.arange(idx.shape[0])
    for l in range(p):
        if rem.shape[0] == 0:
            break
        hw, hsup, hs0, hs1, lwords, lw, m, hlen = _ef_of(E, l)
        if m == 0:
            continue
        hit = ef_access(hw, hsup, eo, hs0, k, hlen, lwords, lw, m, u, idx[rem]) == 1
        if not hit.any():
            continue
        sel = rem[hit]
        r1 = ef_rank1(hw, hsup, eo, hs0, k, hlen, lwords, lw, m, u, idx[sel])
        words, sup, offs, s1, s0, zeros, base1, n, nlev = _wm_of(W, l)
        parts[sel] = l
        codes[sel] = wm_access(words, sup, offs, n, nlev, zeros, base1, r1)
        rem = rem[~hit]
    return parts, codes


def ens_snippet(E, W, p, i, length):
    u, k, eo = E[13], E[14], E[15]
    parts = np.full(length, -1, np.int64)
    codes = np.zeros(length, np.int64)
    ends = np.array([i - 1, i + length - 1], np.int64)
    for l in range(p):
        hw, hsup, hs0, hs1, lwords, lw, m, hlen = _ef_of(E, l)
        if m == 0:
            continue
        lo, hi = ef_rank1(hw, hsup, eo, hs0, k, hlen, lwords, lw, m, u, ends)
        if hi == lo:
            continue
        cur = np.arange(lo + 1, hi + 1, dtype=np.int64)
        at = ef_select1(hw, hsup, eo, hs1, k, lwords, lw, cur) - i
        words, sup, offs, s1, s0, zeros, base1, n, nlev = _wm_of(W, l)
        parts[at] = l
        codes[at] = wm_access(words, sup, offs, n, nlev, zeros, base1, cur)
    return parts, codes


def ens_intersect(E, W, D, parts, codes, totals, nslots):
    u, k, eo = E[13], E[14], E[15]
    dw, dsup, ds0, ds1, dlow, dlw, dm, dhlen = _ef_of(D, 0)
    ef = [_ef_of(E, int(l)) for l in parts]
    wm = [_wm_of(W, int(l)) for l in parts]
    found = []
    d, matched, ti, nt = 1, 0, 0, parts.shape[0]
    while True:
        start = ef_select1(dw, dsup, eo, ds1, k, dlow, dlw, np.array([d]))
        hw, hsup, hs0, hs1, lwords, lw, m, hlen = ef[ti]
        words, sup, offs, s1, s0, zeros, base1, n, nlev = wm[ti]
        c = codes[ti:ti + 1]
        r1 = ef_rank1(hw, hsup, eo, hs0, k, hlen, lwords, lw, m, u, start - 1)
        occ = wm_rank(words, sup, offs, n, nlev, zeros, base1, c, r1) + 1
        if occ[0] > totals[ti]:
            break
        x = wm_select(words, sup, offs, s1, s0, k, n, nlev, zeros, base1, c, occ)
        pos = ef_select1(hw, hsup, eo, hs1, k, lwords, lw, x)
        dd = int(ef_rank1(dw, dsup, eo, ds0, k, dhlen, dlow, dlw, dm, u, pos)[0])
        if dd == d:
            matched += 1
        else:
            d, matched = dd, 1
        if matched == nt:
            found.append(d)
            d, matched = d + 1, 0
            if d > nslots:
                break
        ti = (ti + 1) % nt
    return np.array(found, dtype=np.int64)
