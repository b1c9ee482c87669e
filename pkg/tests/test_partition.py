import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asap import SymbolMap, SymbolStats, build_map, entropy_h0
from asap.errors import ConstructionError, SymbolNotFound
from asap.partition import (
    assign_dense,
    assign_explicit,
    assign_sparse,
    assign_uniform,
    frequency_ranks,
    parse_scheme,
    sparse_raw_ids,
    split_entropy,
)
from asap import corpora

from oracles import ALABAR, alabar, codes_of, h0

SCHEMES = ["sparse", "dense", "dense:3", "uniform"]


def names(smap, alphabet):
    return [[alphabet[a] for a in grp] for grp in smap.partitions()]


def h0_reference(counts):
    """Entropy at 50 significant digits, for checking the float computation."""
    with mpmath.workdps(50):
        n = mpmath.mpf(int(sum(counts)))
        return sum(mpmath.mpf(int(k)) / n * mpmath.log(n / int(k), 2) for k in counts if k)


# -------------------------------------------------------------------- stats
def test_stats_and_entropy_examples():
    s, _ = alabar()
    stats = SymbolStats.from_sequence(s)
    assert stats.n == 20 and int(stats.counts.sum()) == 20
    assert entropy_h0(stats) == pytest.approx(2.2200, abs=1e-3)
    assert entropy_h0(SymbolStats.from_sequence([4] * 30)) == 0.0
    flat = np.tile(np.arange(16), 5)
    assert entropy_h0(SymbolStats.from_sequence(flat)) == pytest.approx(4.0, abs=1e-12)


@given(st.lists(st.integers(0, 60), min_size=1, max_size=400))
def test_entropy_matches_high_precision(xs):
    stats = SymbolStats.from_sequence(xs)
    assert abs(entropy_h0(stats) - float(h0_reference(stats.counts))) < 1e-9
    assert abs(entropy_h0(stats) - h0(xs)) < 1e-9


# ------------------------------------------------------------------- sparse
def test_sparse_raw_ids():
    s, alphabet = alabar()
    stats = SymbolStats.from_sequence(s)
    raw = dict(zip((alphabet[a] for a in stats.occurring), sparse_raw_ids(stats)))
    assert raw["a"] == math.ceil(math.log2(20 / 9) * math.log2(20)) == 5
    assert raw["d"] == math.ceil(math.log2(20) ** 2) == 19
    assert sparse_raw_ids(SymbolStats.from_sequence([3] * 8)).tolist() == [0]


def test_sparse_alabar_groups():
    s, alphabet = alabar()
    smap = assign_sparse(SymbolStats.from_sequence(s))
    assert names(smap, alphabet) == [["a"], ["_", "l"], ["b", "r"], ["d"]]
    assert smap.map_symbol(alphabet.index("l")) == (1, 1)
    assert alphabet[smap.unmap_symbol(0, 0)] == "a"


def test_sparse_partition_count_bound(rng):
    for sigma in (50, 5000):
        x = corpora.zipf_string(20000, sigma, 1.0, seed=7)
        smap = assign_sparse(SymbolStats.from_sequence(x, sigma))
        assert smap.p <= math.ceil(math.log2(20000) ** 2)


# -------------------------------------------------------------------- dense
def test_dense_alabar_groups():
    s, alphabet = alabar()
    stats = SymbolStats.from_sequence(s)
    assert names(assign_dense(stats, 1), alphabet) == [["a"], ["_", "l"], ["b", "d", "r"]]
    assert names(assign_dense(stats, 2), alphabet) == [["a"], ["_"], ["l"], ["b", "d", "r"]]


def test_dense_tie_break_by_code():
    # with codes a=0 b=1 d=2 l=3 r=4 _=5, 'l' precedes '_' among the tied pair
    s, alphabet = codes_of(ALABAR, list("abdlr_"))
    occ, ranks = frequency_ranks(SymbolStats.from_sequence(s))
    r = dict(zip((alphabet[a] for a in occ), ranks))
    assert r["a"] == 1 and r["l"] == 2 and r["_"] == 3


def test_dense_single_symbol():
    smap = assign_dense(SymbolStats.from_sequence([2, 2, 2], 5))
    assert smap.p == 1 and smap.partitions() == [[2]]


def test_dense_rejects_bad_lmin():
    with pytest.raises(ConstructionError):
        assign_dense(SymbolStats.from_sequence([0, 1]), 0)


def test_dense_lmin_singletons(rng):
    x = corpora.zipf_string(5000, 300, 1.0, seed=3)
    stats = SymbolStats.from_sequence(x, 300)
    occ, ranks = frequency_ranks(stats)
    for l_min in (1, 3, 5):
        smap = assign_dense(stats, l_min)
        top = occ[ranks <= (1 << l_min) - 1]
        parts, _ = smap.map_many(top)
        assert all(smap.sub_sigma(int(p)) == 1 for p in parts)
        assert len(set(parts.tolist())) == top.shape[0]


# ------------------------------------------------------------------ uniform
def test_uniform_arithmetic():
    smap = assign_uniform(20, 6)
    assert smap.p == 5 and smap.q == 2
    assert smap.partitions()[:3] == [[0, 1], [2, 3], [4, 5]]
    assert smap.map_symbol(3) == (1, 1)
    assert smap.map_symbol(5) == (2, 1)
    assert all(len(g) == 1 for g in assign_uniform(1000, 8).partitions()[:8])


def test_uniform_is_stateless():
    smap = assign_uniform(10**6, 10**5)
    assert smap.space().total < 1000
    back, _ = SymbolMap.from_bytes(smap.to_bytes())
    a = np.arange(0, 10**5, 37)
    assert np.array_equal(back.unmap_many(*back.map_many(a)), a)


# ----------------------------------------------------------------- general
def test_unknown_symbol():
    smap = build_map([0, 2, 2], "sparse", 5)
    with pytest.raises(SymbolNotFound):
        smap.map_symbol(1)
    parts, _ = smap.map_many([1, 7, -1])
    assert (parts == -1).all()


def test_explicit_and_parse():
    smap = assign_explicit([[3], [0, 2]], 4)
    assert smap.partitions() == [[3], [0, 2]]
    assert parse_scheme("dense:4")[0] == "dense"
    with pytest.raises(ValueError):
        parse_scheme("fancy")
    with pytest.raises(ConstructionError):
        assign_explicit([[1], [1]], 3)


@given(st.lists(st.integers(0, 90), min_size=2, max_size=500), st.sampled_from(SCHEMES))
def test_disjoint_cover_and_round_trip(xs, scheme):
    x = np.array(xs)
    smap = build_map(x, scheme, 91)
    occ = np.unique(x)
    parts, codes = smap.map_many(occ)
    assert (parts >= 0).all()
    assert np.array_equal(smap.unmap_many(parts, codes), occ)
    members = [a for grp in smap.partitions() for a in grp]
    assert len(members) == len(set(members))
    assert set(occ.tolist()) <= set(members)
    for ell in range(smap.p):
        grp = smap.members(ell)
        assert grp == sorted(grp)
        assert np.array_equal(smap.map_many(grp)[1], np.arange(len(grp)))
    counts = np.bincount(smap.map_many(x)[0], minlength=smap.p)
    assert counts.sum() == x.shape[0]
    back, _ = SymbolMap.from_bytes(smap.to_bytes())
    assert back.partitions() == smap.partitions()


@pytest.mark.parametrize("sigma", [2**8, 2**12, 2**16])
def test_split_entropy_close_to_h0(sigma):
    x = corpora.zipf_string(10**5, sigma, 1.0, seed=11)
    stats = SymbolStats.from_sequence(x, sigma)
    ht, rest = split_entropy(stats, assign_sparse(stats))
    assert ht + rest <= entropy_h0(stats) + 0.1
