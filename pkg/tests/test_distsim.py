import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asap import ApClusterSim, ApString, ClusterSim, distributed_table
from asap import corpora
from asap.distsim import BROADCAST, TABLE_COLUMNS, same_answers, sequential_answers, table_csv
from asap.errors import RangeError
from asap.partition import assign_explicit

from oracles import alabar


@pytest.fixture(scope="module")
def zipf_ap():
    x = corpora.zipf_string(5000, 300, 1.0, seed=1)
    return x, ApString.build(x, "dense:3", 300)


def mixed_batch(x, count=300):
    return corpora.workload(x, count, seed=2, snippet_len=50) + [
        ("rank", 999, 3), ("select", 0, 10**6), ("access", 0), ("bogus", 1), ("rank", 1)]


def test_routing():
    s, alphabet = alabar()
    ap = ApString.build(s, "sparse")
    sim = ClusterSim(ap)
    assert sim.nodes == 4
    assert sim.sim_route("rank", alphabet.index("a"), 5) == 0
    assert sim.sim_route("rank", alphabet.index("d"), 5) == 3
    assert sim.sim_route("access", 3) == BROADCAST
    assert sim.sim_route("snippet", 3, 2) == BROADCAST
    assert sim.sim_route("select", 40, 1) is None
    with pytest.raises(ValueError):
        sim.sim_route("bogus", 1)


def test_single_node_speedup_is_one(zipf_ap):
    x, ap = zipf_ap
    _, rep = ClusterSim(ap, 1).sim_run(mixed_batch(x))
    assert rep.speedup == 1.0


def test_balanced_batch_scales_perfectly():
    x = np.repeat(np.arange(8), 100)
    ap = ApString.build(x, assign_explicit([[k] for k in range(8)], 8))
    batch = [("rank", k % 8, 100 * (k % 8) + 50) for k in range(8 * 40)]
    ans, rep = ClusterSim(ap, cost_model="ops").sim_run(batch)
    assert rep.speedup == 8.0
    assert ans == [50] * len(batch)


@pytest.mark.parametrize("nodes", [None, 1, 5])
@pytest.mark.parametrize("model", ["ops", "measured"])
def test_answers_match_sequential(zipf_ap, nodes, model):
    x, ap = zipf_ap
    batch = mixed_batch(x)
    ref = sequential_answers(ap, batch)
    for workers in (1, 3):
        ans, rep = ClusterSim(ap, nodes, model, workers=workers).sim_run(batch)
        assert same_answers(ans, ref)
        assert 1.0 <= rep.speedup <= (ap.p if nodes is None else nodes) + 1e-9
    ans, _ = ApClusterSim(ap, nodes, model).sim_run(batch)
    assert same_answers(ans, ref)


def test_error_entries(zipf_ap):
    x, ap = zipf_ap
    ans, _ = ClusterSim(ap).sim_run([("select", 0, 10**6), ("access", 0), ("bogus", 1), ("rank", 299, 0)])
    assert isinstance(ans[0], RangeError) and isinstance(ans[1], RangeError)
    assert isinstance(ans[2], ValueError)
    assert ans[3] == 0


def test_answer_values_are_correct(zipf_ap):
    x, ap = zipf_ap
    batch = [("rank", int(x[10]), 2000), ("access", 77), ("snippet", 100, 20)]
    ans, _ = ClusterSim(ap, 3).sim_run(batch)
    assert ans[0] == int(np.count_nonzero(x[:2000] == x[10]))
    assert ans[1] == x[76]
    assert np.array_equal(ans[2], x[99:119])


def test_ops_model_is_deterministic(zipf_ap):
    x, ap = zipf_ap
    batch = mixed_batch(x)
    a = ClusterSim(ap, 7, "ops", workers=4).sim_run(batch)[1]
    b = ClusterSim(ap, 7, "ops").sim_run(batch)[1]
    assert np.array_equal(a.node_cost, b.node_cost) and a.speedup == b.speedup


@given(st.lists(st.integers(0, 20), min_size=2, max_size=200), st.integers(1, 6), st.data())
def test_property_answers_and_speedup(xs, nodes, data):
    x = np.array(xs)
    ap = ApString.build(x, "sparse", 21)
    n = x.shape[0]
    batch = data.draw(st.lists(st.one_of(
        st.tuples(st.just("rank"), st.integers(0, 21), st.integers(0, n)),
        st.tuples(st.just("select"), st.integers(0, 21), st.integers(1, 5)),
        st.tuples(st.just("access"), st.integers(1, n)),
        st.tuples(st.just("snippet"), st.integers(1, n), st.integers(1, 3))), min_size=1, max_size=30))
    ans, rep = ClusterSim(ap, nodes, "ops").sim_run(batch)
    assert same_answers(ans, sequential_answers(ap, batch))
    assert 1.0 <= rep.speedup <= nodes + 1e-9


def test_table_format(zipf_ap):
    _, ap = zipf_ap
    rows = distributed_table(ap, 6, count=300, seed=3, cost_model="ops")
    assert [r["operation"] for r in rows] == ["rank", "select", "access", "snippet"]
    text = table_csv(rows)
    assert text.splitlines()[0] == ",".join(TABLE_COLUMNS)
    for r in rows:
        assert 1.0 <= r["asap_speedup"] <= 6 + 1e-9
