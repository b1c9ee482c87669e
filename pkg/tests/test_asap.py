import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asap import ApString, SymbolStats, entropy_h0
from asap.errors import ConstructionError, FormatError, RangeError
from asap.partition import assign_explicit

from oracles import alabar, prefix_counts

SCHEMES = ["sparse", "dense", "dense:5", "uniform"]
GOLDEN_B = [
    "10101001001010101001",
    "01000010110101000000",
    "00010100000000010100",
    "00000000000000000010",
]
GOLDEN_S = ["aaaaaaaaa", "l__l_l", "brbr", "d"]


@pytest.fixture(scope="module")
def golden():
    s, alphabet = alabar()
    groups = [[alphabet.index(ch) for ch in grp] for grp in (["a"], ["_", "l"], ["b", "r"], ["d"])]
    return ApString.build(s, assign_explicit(groups, len(alphabet))), s, alphabet


def test_golden_bit_vectors_and_strings(golden):
    ap, _, alphabet = golden
    assert ap.p == 4
    for ell in range(4):
        assert "".join(map(str, ap.B[ell].to_bits())) == GOLDEN_B[ell]
        local = ap.S[ell].to_array()
        glob = ap.map.unmap_many(np.full(local.shape[0], ell), local)
        assert "".join(alphabet[a] for a in glob) == GOLDEN_S[ell]
    assert ap.S[1].to_array().tolist() == [1, 0, 0, 1, 0, 1]


def test_sparse_scheme_gives_same_structure(golden):
    ap, s, _ = golden
    sp = ApString.build(s, "sparse")
    assert [b.to_bits().tolist() for b in sp.B] == [b.to_bits().tolist() for b in ap.B]


def test_worked_queries(golden):
    ap, _, alphabet = golden
    a = alphabet.index
    assert ap.rank(a("a"), 5) == 3
    assert ap.rank(a("l"), 10) == 2
    assert ap.select(a("a"), 4) == 8
    assert ap.select(a("r"), 2) == 18
    assert ap.select(a("d"), 1) == 19
    assert alphabet[ap.access(19)] == "d"
    assert alphabet[ap.access(1)] == "a"
    assert alphabet[ap.access(7)] == "_"
    assert "".join(alphabet[x] for x in ap.snippet(7, 4)) == "_a_l"
    assert "".join(alphabet[x] for x in ap.to_array()) == "alabar_a_la_alabarda"


def test_absent_symbol(golden):
    ap, _, _ = golden
    ap2 = ApString.build([0, 2, 2, 0], "sparse", 10)
    assert ap2.rank(1, 4) == 0 and ap2.rank(9, 4) == 0
    with pytest.raises(RangeError):
        ap2.select(1, 1)


def test_range_errors(golden):
    ap, _, _ = golden
    for call in (lambda: ap.rank(1, 21), lambda: ap.access(0), lambda: ap.access(21),
                 lambda: ap.select(1, 10), lambda: ap.select(1, 0),
                 lambda: ap.snippet(18, 4), lambda: ap.snippet(1, 0)):
        with pytest.raises(RangeError):
            call()


def test_construction_errors():
    with pytest.raises(ConstructionError):
        ApString.build([], "sparse")
    with pytest.raises(ConstructionError):
        ApString.build([0, 5], "sparse", 4)


def test_constant_string():
    ap = ApString.build([3] * 50, "sparse")
    assert ap.p == 1 and ap.B[0].ones == 50 and ap.S[0].nlevels == 0
    assert ap.rank(3, 17) == 17 and ap.select(3, 50) == 50 and ap.access(9) == 3


def test_size_report_alabar(golden):
    ap, s, _ = golden
    rep = ap.size_report()
    ht = ap.h0_of_ids()
    n = len(s)
    assert n * ht <= rep.b_payload <= n * ht + 2 * n + rep.b_directory + 8 * ap.p
    assert rep.total == rep.b_bits + rep.s_bits + rep.map_bits


def exhaustive_check(ap, seq, sigma):
    n = seq.shape[0]
    pc = prefix_counts(seq, sigma)
    cs = np.repeat(np.arange(sigma), n + 1)
    idx = np.tile(np.arange(n + 1), sigma)
    assert np.array_equal(ap.rank_many(cs, idx), pc[idx, cs])
    for c in np.unique(seq):
        pos = np.flatnonzero(seq == c) + 1
        assert np.array_equal(ap.select_many(np.full(pos.size, c), np.arange(1, pos.size + 1)), pos)
    assert np.array_equal(ap.access_many(np.arange(1, n + 1)), seq)
    assert np.array_equal(ap.to_array(), seq)


@pytest.mark.parametrize("scheme", SCHEMES)
@pytest.mark.parametrize("kind", ["random", "zipf"])
def test_exhaustive_oracle(scheme, kind, rng):
    n, sigma = 1500, 64
    if kind == "random":
        seq = rng.integers(0, sigma, n)
    else:
        seq = (rng.zipf(1.3, n) - 1) % sigma
    ap = ApString.build(seq, scheme, sigma)
    exhaustive_check(ap, seq, sigma)
    for i, L in ((1, n), (n, 1), (700, 100)):
        assert np.array_equal(ap.snippet(i, L), seq[i - 1:i - 1 + L])


@given(st.lists(st.integers(0, 30), min_size=1, max_size=250), st.sampled_from(SCHEMES))
def test_properties(xs, scheme):
    seq = np.array(xs)
    ap = ApString.build(seq, scheme, 31)
    exhaustive_check(ap, seq, 31)
    assert sum(b.ones for b in ap.B) == seq.shape[0]
    for b, s in zip(ap.B, ap.S):
        assert b.ones == s.n
    # positions are split among the B_l
    owners = np.zeros(seq.shape[0], dtype=np.int64)
    for b in ap.B:
        owners[b.one_positions() - 1] += 1
    assert (owners == 1).all()
    idx = np.arange(1, seq.shape[0] + 1)
    r = ap.rank_many(seq, idx)
    assert np.all(ap.select_many(seq, r) <= idx)
    assert np.array_equal(ap.rank_many(seq, ap.select_many(seq, r)), r)
    for i in range(1, seq.shape[0] + 1, 7):
        assert ap.snippet(i, 1)[0] == ap.access(i)


def test_batch_is_worker_independent(rng):
    seq = rng.integers(0, 500, 20000)
    ap = ApString.build(seq, "sparse")
    idx = rng.integers(1, 20001, 30000)
    cs = seq[rng.integers(0, 20000, 30000)]
    one = ap.batch("rank", cs, idx, workers=1)
    assert np.array_equal(ap.batch("rank", cs, idx, workers=4, chunk=1000), one)
    assert np.array_equal(ap.batch("access", idx, workers=3, chunk=999), seq[idx - 1])


@pytest.mark.parametrize("scheme", SCHEMES)
def test_serialization(scheme, rng):
    seq = rng.integers(0, 200, 3000)
    ap = ApString.build(seq, scheme, 256)
    buf = ap.to_bytes()
    back, end = ApString.from_bytes(buf)
    assert end == len(buf) and back.to_bytes() == buf
    assert np.array_equal(back.to_array(), seq)
    assert back.rank(int(seq[0]), 3000) == int(np.count_nonzero(seq == seq[0]))
    with pytest.raises(FormatError):
        ApString.from_bytes(buf[: len(buf) // 2])


def test_h0_of_ids_matches_partition_string(rng):
    seq = rng.integers(0, 100, 4000)
    ap = ApString.build(seq, "dense")
    t = ap.map.map_many(seq)[0]
    assert np.array_equal(ap.partition_ids(), t)
    assert ap.h0_of_ids() == pytest.approx(entropy_h0(SymbolStats.from_sequence(t, ap.p)))
