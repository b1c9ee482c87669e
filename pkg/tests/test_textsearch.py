import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asap import FmIndex, build_bwt, invert_bwt, runs_in_bwt
from asap import corpora
from asap.textsearch import naive_count, suffix_array

from oracles import bwt_by_rotation, codes_of, occurrences, runs

ABRA, ALPHA = codes_of("abracadabra")


def test_abracadabra_bwt():
    bwt, sa = build_bwt(ABRA)
    shown = "".join("$" if c == 0 else ALPHA[c - 1] for c in bwt)
    assert shown == "ard$rcaaaabb"
    assert np.array_equal(bwt, bwt_by_rotation(ABRA))
    assert runs_in_bwt(bwt) == runs(bwt)
    assert np.array_equal(invert_bwt(bwt), ABRA)


def test_tiny_texts():
    bwt, _ = build_bwt([0, 0, 0])
    assert bwt.shape[0] == 4 and runs_in_bwt(bwt) <= 2
    assert build_bwt([5])[0].shape[0] == 2
    assert runs_in_bwt([3] * 9) == 1


def test_suffix_array_is_sorted(rng):
    t = rng.integers(0, 4, 300)
    sa = suffix_array(t)
    sufs = [tuple(t[k:]) for k in sa]
    assert sufs == sorted(sufs)


@pytest.mark.parametrize("structure", ["aps", "raps"])
def test_count_examples(structure):
    fm = FmIndex.build(ABRA, structure)
    a, b, r = (ALPHA.index(ch) for ch in "abr")
    assert fm.count([a, b, r, a]) == 2
    assert fm.count([a]) == 5
    assert fm.count([99, 99]) == 0
    assert fm.count([]) == len(ABRA)
    assert np.array_equal(fm.invert(), ABRA)
    assert fm.C[-1] == len(ABRA) + 1 and np.all(np.diff(fm.C) >= 0)


@given(st.lists(st.integers(0, 5), min_size=1, max_size=200),
       st.lists(st.lists(st.integers(0, 6), min_size=1, max_size=5), min_size=1, max_size=10))
def test_count_matches_scan(text, patterns):
    text = np.array(text)
    assert np.array_equal(build_bwt(text)[0], bwt_by_rotation(text))
    for structure in ("aps", "raps"):
        fm = FmIndex.build(text, structure)
        got = fm.count_many(patterns)
        assert list(got) == [occurrences(text, p) for p in patterns]
        assert np.array_equal(fm.invert(), text)


def test_representations_agree_on_repetitive_text(rng):
    txt = corpora.repetitive_text(2000, 20, 30, 0.01, seed=4)
    bwt, _ = build_bwt(txt)
    fa = FmIndex.from_bwt(bwt, 30, "aps")
    fr = FmIndex.from_bwt(bwt, 30, "raps")
    starts = rng.integers(0, txt.shape[0] - 8, 300)
    pats = [txt[s:s + 8] for s in starts]
    assert np.array_equal(fa.count_many(pats), fr.count_many(pats))
    assert list(fa.count_many(pats[:50])) == [naive_count(txt, p) for p in pats[:50]]
    assert runs_in_bwt(bwt) < txt.shape[0] / 5
