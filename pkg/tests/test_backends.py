"""Both kernel backends must give identical answers."""

import json

import numpy as np
import pytest

import asap
from asap import _kernels_numpy as knp
from asap import corpora
from asap._ensemble import flatten, flatten_bits

from conftest import run_python

numba_kernels = pytest.importorskip("asap._kernels_numba")

SCRIPT = r"""
import json, numpy as np, asap
from asap import corpora
out = {"backend": asap.BACKEND}
x = corpora.zipf_string(4000, 500, 1.0, seed=5)
rng = np.random.default_rng(0)
idx = rng.integers(1, 4001, 500)
cs = x[rng.integers(0, 4000, 500)]
for scheme in ("sparse", "dense:5", "uniform"):
    ap = asap.ApString.build(x, scheme, 500)
    out[scheme] = [ap.rank_many(cs, idx).tolist(), ap.access_many(idx).tolist(),
                   ap.select_many(cs, np.ones(500, int)).tolist(), ap.snippet(1000, 300).tolist(),
                   ap.to_bytes().hex()[:4000]]
ra = asap.RunApString(corpora.run_string(4000, 300, 50, seed=1), 50)
out["raps"] = ra.access_many(idx).tolist()
fm = asap.FmIndex.build(x[:1500], "aps")
out["fm"] = fm.count_many([x[k:k + 3] for k in range(0, 1400, 7)]).tolist()
docs = corpora.collection_docs(80, 60, 20, 1.0, seed=2)
c = asap.Collection.ingest(docs)
out["intersect"] = [c.intersect(["w0", "w1"]), c.intersect(["w2", "w3", "w5"])]
sim = asap.ClusterSim(asap.ApString.build(x, "dense:3", 500), 4, "ops")
ans, rep = sim.sim_run(corpora.workload(x, 100, seed=3, snippet_len=20))
out["sim"] = [rep.node_cost.tolist(), [a.tolist() if hasattr(a, "tolist") else a for a in ans]]
print(json.dumps(out))
"""


def run_script(numba):
    res = run_python(SCRIPT, numba=numba)
    assert res.returncode == 0, res.stderr
    return json.loads(res.stdout)


def test_whole_pipeline_agrees_across_backends():
    a, b = run_script(True), run_script(False)
    assert a.pop("backend") == "numba" and b.pop("backend") == "numpy"
    assert a == b


def test_numpy_backend_matches_oracles():
    code = r"""
import numpy as np, asap
assert asap.BACKEND == "numpy"
rng = np.random.default_rng(1)
for scheme in ("sparse", "dense", "uniform"):
    x = rng.integers(0, 40, 700)
    ap = asap.ApString.build(x, scheme, 40)
    cum = np.vstack([np.zeros(40, int), np.cumsum(np.eye(40, dtype=int)[x], 0)])
    A = np.repeat(np.arange(40), 701); I = np.tile(np.arange(701), 40)
    assert np.array_equal(ap.rank_many(A, I), cum[I, A])
    assert np.array_equal(ap.to_array(), x)
    for c in np.unique(x):
        pos = np.flatnonzero(x == c) + 1
        assert np.array_equal(ap.select_many(np.full(pos.size, c), np.arange(1, pos.size + 1)), pos)
print("ok")
"""
    res = run_python(code, numba=False)
    assert res.returncode == 0, res.stderr
    assert res.stdout.strip() == "ok"


def kernel_pair(name):
    return getattr(knp, name), getattr(numba_kernels, name)


def test_ensemble_kernels_agree_in_process(rng):
    x = corpora.zipf_string(6000, 800, 1.0, seed=9)
    ap = asap.ApString.build(x, "sparse", 800)
    E, W = ap._E, ap._W
    idx = rng.integers(0, 6001, 2000)
    parts, codes = ap.map.map_many(x[rng.integers(0, 6000, 2000)])
    for name, args in (("ens_rank", (E, W, parts, codes, idx)),
                       ("ens_access", (E, W, ap.p, np.maximum(idx, 1))),
                       ("ens_snippet", (E, W, ap.p, 17, 900))):
        f, g = kernel_pair(name)
        ra, rb = f(*args), g(*args)
        if isinstance(ra, tuple):
            assert all(np.array_equal(p, q) for p, q in zip(ra, rb))
        else:
            assert np.array_equal(ra, rb)
    totals = ap.rank_many(ap.map.unmap_many(parts, codes), np.full(2000, 6000))
    js = np.maximum(1, (totals * rng.random(2000)).astype(np.int64))
    f, g = kernel_pair("ens_select")
    assert np.array_equal(f(E, W, parts, codes, js), g(E, W, parts, codes, js))


def test_intersect_kernels_agree_in_process():
    docs = corpora.collection_docs(150, 80, 25, 1.0, seed=4)
    c = asap.Collection.ingest(docs)
    f, g = kernel_pair("ens_intersect")
    for terms in (["w0", "w1"], ["w1", "w4", "w2"], ["w3", "w0", "w7", "w9"]):
        tids = np.array(c.term_ids(terms))
        totals = c.text.rank_many(tids, np.full(tids.shape[0], c.n))
        parts, codes = c.text.map.map_many(tids)
        args = (c.text._E, c.text._W, c._D, parts, codes, totals, c.bounds.ones)
        assert np.array_equal(f(*args), g(*args))


def test_flatten_shares_memory(rng):
    ap = asap.ApString.build(rng.integers(0, 50, 3000), "dense")
    E, _ = ap._E, ap._W
    for b in ap.B:
        if b.high is not None and b.high.words.size:
            assert np.shares_memory(b.high.words, E[0])
    D = flatten_bits([asap.SparseBitVector([1, 5, 9], 20)], 20)
    assert list(D[11]) == [3]
    with pytest.raises(ValueError):
        flatten([asap.SparseBitVector([1], 4, sample_rate=8),
                 asap.SparseBitVector([2], 4, sample_rate=16)], [], 4)
