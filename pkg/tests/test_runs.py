import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asap import ApString, RunApString, RunLengthSequence, count_runs
from asap import corpora
from asap.errors import RangeError

from oracles import alabar, prefix_counts, runs

AAABBA = [0, 0, 0, 1, 1, 0]


def test_rls_components():
    x = RunLengthSequence(AAABBA)
    assert x.r == 3
    assert x.H.to_array().tolist() == [0, 1, 0]
    assert x.Bstart.to_bits().tolist() == [1, 0, 0, 1, 0, 1]
    assert x.Bsorted.to_bits().tolist() == [1, 0, 0, 1, 1, 0]
    assert list(x.K) == [0, 2, 3]


def test_rls_queries():
    x = RunLengthSequence(AAABBA)
    assert x.access(5) == 1 and x.access(1) == 0 and x.access(6) == 0
    assert x.rank(0, 5) == 3 and x.rank(1, 6) == 2
    assert x.select(0, 4) == 6 and x.select(1, 2) == 5
    assert RunLengthSequence([0, 0], 3).rank(2, 2) == 0
    c = RunLengthSequence([4] * 9)
    assert c.r == 1 and c.select(4, 1) == 1
    d = RunLengthSequence([0, 1, 2, 1])
    assert d.r == 4 and d.Bstart.to_bits().all()
    with pytest.raises(RangeError):
        x.select(1, 3)


def test_count_runs_examples():
    assert count_runs(AAABBA)[0] == 3
    assert count_runs([7] * 10) == (1, 1, 1)
    r, rt, _ = count_runs([0] * 5 + [1] * 5, 8)
    assert (r, rt) == (2, 1)


def test_rap_examples():
    s, _ = alabar()
    y = RunApString(s, 6)
    assert (y.p, y.q) == (5, 2)
    z = RunApString(np.r_[np.zeros(10, int), np.full(10, 3)], 4)
    assert z.rank(0, 10) == 10 and z.select(3, 1) == 11
    w = RunApString(np.arange(40) % 8, 8)
    assert (w.p, w.q) == (6, 2)
    assert w.stats["r_t"] < w.stats["r"] == 40


def test_distinct_partitions_give_equal_run_counts():
    # n = 24 gives 5 partitions, so q = 1 for sigma = 4
    seq = np.repeat(np.arange(4), 6)
    r, rt, rs = count_runs(seq, 4)
    assert r == rt == 4 and rs == 4


def check(obj, seq, sigma):
    n = seq.shape[0]
    pc = prefix_counts(seq, sigma)
    cs = np.repeat(np.arange(sigma), n + 1)
    idx = np.tile(np.arange(n + 1), sigma)
    assert np.array_equal(obj.rank_many(cs, idx), pc[idx, cs])
    for c in np.unique(seq):
        pos = np.flatnonzero(seq == c) + 1
        assert np.array_equal(obj.select_many(np.full(pos.size, c), np.arange(1, pos.size + 1)), pos)
    assert np.array_equal(obj.access_many(np.arange(1, n + 1)), seq)


runny = st.lists(st.tuples(st.integers(0, 25), st.integers(1, 8)), min_size=1, max_size=80)


@given(runny)
def test_rls_and_rap_properties(pairs):
    seq = np.repeat([h for h, _ in pairs], [k for _, k in pairs])
    x = RunLengthSequence(seq, 26)
    assert x.r == runs(seq)
    check(x, seq, 26)
    if seq.shape[0] >= 2:
        y = RunApString(seq, 26)
        check(y, seq, 26)
        r, rt, rs = count_runs(seq, 26)
        assert r == runs(seq) and rt <= r and rs <= r
        assert y.off[-1] == seq.shape[0]
        assert np.array_equal(np.diff(y.off), np.bincount(seq // y.q, minlength=y.p))


@pytest.mark.parametrize("n,sigma", [(2048, 50), (1000, 3)])
def test_exhaustive_against_aps(n, sigma):
    seq = corpora.run_string(n, n // 8, sigma, seed=5)
    y = RunApString(seq, sigma)
    ap = ApString.build(seq, "sparse", sigma)
    check(y, seq, sigma)
    idx = np.arange(1, n + 1)
    assert np.array_equal(y.rank_many(seq, idx), ap.rank_many(seq, idx))
    assert np.array_equal(y.snippet(100, 300), ap.snippet(100, 300))


def test_sampled_large(rng):
    n, sigma = 10**6, 1000
    seq = corpora.run_string(n, 20000, sigma, seed=9)
    y = RunApString(seq, sigma)
    idx = rng.integers(1, n + 1, 10**4)
    assert np.array_equal(y.access_many(idx), seq[idx - 1])
    cs = seq[idx - 1]
    want = np.array([np.count_nonzero(seq[:i] == c) for c, i in zip(cs[:300], idx[:300])])
    assert np.array_equal(y.rank_many(cs[:300], idx[:300]), want)


def test_space_grows_with_runs():
    n, sigma = 10**5, 1000
    sizes = [len(RunApString(corpora.run_string(n, r, sigma, seed=1), sigma).to_bytes())
             for r in (10, 100, 1000)]
    assert sizes == sorted(sizes)


def test_serialization(rng):
    seq = corpora.run_string(5000, 300, 40, seed=2)
    for cls in (RunLengthSequence, RunApString):
        obj = cls(seq, 40)
        buf = obj.to_bytes()
        back, end = cls.from_bytes(buf)
        assert end == len(buf) and back.to_bytes() == buf
        assert np.array_equal(back.to_array(), seq)
