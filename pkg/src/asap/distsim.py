"""Simulated distributed query processing over a partitioned string.

Each node owns some partitions ``(B_l, s_l)``; every node holds a copy
of the symbol map and can broker.  Queries arrive round-robin, the
arrival node maps the symbol and hands rank/select to the owner of its
partition, while access and snippet are broadcast.  Only computation is
modelled.  Cost is either a count of primitive structure calls (``ops``,
deterministic) or wall time per node (``measured``), and the batch
finishes when the busiest node does.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .apstring import ApString
from .errors import RangeError
from .sequences import WaveletMatrix

BROADCAST = -1
OPS = ("rank", "select", "access", "snippet")
_ARITY = {"rank": 2, "select": 2, "access": 1, "snippet": 2}


@dataclass
class SimReport:
    cost_model: str
    node_cost: np.ndarray
    broker_cost: float = 0.0
    n_queries: int = 0
    n_units: int = 0

    @property
    def t_seq(self) -> float:
        return float(self.broker_cost + self.node_cost.sum())

    @property
    def t_par(self) -> float:
        top = self.node_cost.max() if self.node_cost.size else 0.0
        return float(self.broker_cost + top)

    @property
    def speedup(self) -> float:
        return self.t_seq / self.t_par if self.t_par > 0 else 1.0

    def per_unit(self) -> float:
        """Parallel cost per query (per extracted symbol for snippets)."""
        return self.t_par / self.n_units if self.n_units else 0.0


class _Meter:
    """Accumulates per-node cost in either model."""

    def __init__(self, nodes: int, model: str):
        if model not in ("ops", "measured"):
            raise ValueError(f"unknown cost model {model!r}")
        self.model = model
        self.ops = np.zeros(nodes, dtype=np.float64)
        self.secs = np.zeros(nodes, dtype=np.float64)

    def cost(self) -> np.ndarray:
        return self.ops.copy() if self.model == "ops" else self.secs * 1e6


def _parse(batch):
    """Split a batch into per-op columns; malformed queries become errors."""
    cols = {op: ([], []) for op in OPS}
    errors = {}
    for k, q in enumerate(batch):
        try:
            op, args = q[0], tuple(int(x) for x in q[1:])
            if op not in _ARITY or len(args) != _ARITY[op]:
                raise ValueError(f"malformed query {q!r}")
        except (TypeError, ValueError, IndexError) as exc:
            errors[k] = exc if isinstance(exc, ValueError) else ValueError(str(exc))
            continue
        cols[op][0].append(k)
        cols[op][1].append(args)
    out = {}
    for op, (ks, args) in cols.items():
        a = np.asarray(args, dtype=np.int64).reshape(-1, _ARITY[op])
        out[op] = (np.asarray(ks, dtype=np.int64), a)
    return out, errors


class ClusterSim:
    """Partition ``l`` lives on node ``l % nodes``; nodes default to one per partition."""

    def __init__(self, ap: ApString, nodes: int | None = None, cost_model: str = "ops",
                 workers: int = 1):
        self.ap, self.map = ap, ap.map
        self.nodes = ap.p if nodes is None else int(nodes)
        if self.nodes < 1:
            raise ValueError("need at least one node")
        self.cost_model, self.workers = cost_model, workers
        self.owned = [list(range(k, ap.p, self.nodes)) for k in range(self.nodes)]
        # per-node metadata: occurrences of each local code, used to reject bad selects
        self.code_totals = [np.bincount(s.to_array(), minlength=int(ap.map.sizes[ell]))
                            if s.n else np.zeros(int(ap.map.sizes[ell]), dtype=np.int64)
                            for ell, s in enumerate(ap.S)]

    def owner(self, ell: int) -> int:
        return ell % self.nodes

    def sim_route(self, op: str, *args):
        """Node that answers the query, ``BROADCAST``, or None if answered at arrival."""
        if op in ("access", "snippet"):
            return BROADCAST
        if op not in ("rank", "select"):
            raise ValueError(f"unknown operation {op!r}")
        parts, _ = self.map.map_many([args[0]])
        return None if parts[0] < 0 else self.owner(int(parts[0]))

    def _fan(self, fn):
        if self.workers > 1 and self.nodes > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                return list(pool.map(fn, range(self.nodes)))
        return [fn(k) for k in range(self.nodes)]

    def sim_run(self, batch):
        """Answer ``batch`` (a list of ``(op, *args)``); returns ``(answers, SimReport)``.

        Failed queries yield their exception object in the answer list.
        """
        batch = list(batch)
        ap, n = self.ap, self.ap.n
        cols, errors = _parse(batch)
        answers: list = [None] * len(batch)
        for k, e in errors.items():
            answers[k] = e
        meter = _Meter(self.nodes, self.cost_model)

        # arrival: range checks and symbol mapping at node k % nodes
        routed = {}
        for op in ("rank", "select"):
            ks, a = cols[op]
            parts = np.full(ks.shape[0], -1, dtype=np.int64)
            codes = np.zeros(ks.shape[0], dtype=np.int64)
            arrive = ks % self.nodes
            for node in range(self.nodes):
                sel = np.flatnonzero(arrive == node)
                if sel.size == 0:
                    continue
                t0 = time.perf_counter()
                parts[sel], codes[sel] = self.map.map_many(a[sel, 0])
                meter.secs[node] += time.perf_counter() - t0
                meter.ops[node] += sel.size
            bad_pos = (a[:, 1] < 0) | (a[:, 1] > n) if op == "rank" else np.zeros(ks.size, bool)
            for k in ks[bad_pos]:
                answers[k] = RangeError(f"position outside [0, {n}]")
            absent = (parts < 0) & ~bad_pos
            for k in ks[absent]:
                answers[k] = 0 if op == "rank" else RangeError("symbol does not occur")
            live = ~(bad_pos | absent)
            routed[op] = (ks[live], a[live], parts[live], codes[live])
        for op in ("access", "snippet"):
            ks, a = cols[op]
            if op == "access":
                ok = (a[:, 0] >= 1) & (a[:, 0] <= n)
            else:
                ok = (a[:, 0] >= 1) & (a[:, 1] >= 1) & (a[:, 0] + a[:, 1] - 1 <= n)
            for k in ks[~ok]:
                answers[k] = RangeError("position outside the string")
            cols[op] = (ks[ok], a[ok])

        def node_work(node):
            out, ops, secs = {}, 0, 0.0
            t0 = time.perf_counter()
            for ell in self.owned[node]:
                b, s = ap.B[ell], ap.S[ell]
                ks, a, parts, codes = routed["rank"]
                sel = np.flatnonzero(parts == ell)
                if sel.size:
                    r = s.rank_many(codes[sel], b.rank1_many(a[sel, 1]))
                    out.update(zip(ks[sel].tolist(), r.tolist()))
                    ops += 2 * sel.size
                ks, a, parts, codes = routed["select"]
                sel = np.flatnonzero(parts == ell)
                if sel.size:
                    j = a[sel, 1]
                    ok = (j >= 1) & (j <= self.code_totals[ell][codes[sel]])
                    for k in ks[sel[~ok]].tolist():
                        out[k] = RangeError("select rank outside [1, occurrences]")
                    sel = sel[ok]
                    if sel.size:
                        r = b.select1_many(s.select_many(codes[sel], a[sel, 1]))
                        out.update(zip(ks[sel].tolist(), r.tolist()))
                        ops += 2 * sel.size
                if b.ones == 0:
                    continue
                ks, a = cols["access"]
                if ks.size:
                    hit = b.access_many(a[:, 0]) == 1
                    ops += ks.size
                    if hit.any():
                        c = s.access_many(b.rank1_many(a[hit, 0]))
                        sym = self.map.unmap_many(np.full(c.shape[0], ell), c)
                        out.update(zip(ks[hit].tolist(), sym.tolist()))
                        ops += 3 * int(hit.sum())
                ks, a = cols["snippet"]
                for k, (i, length) in zip(ks.tolist(), a.tolist()):
                    lo, hi = b.rank1_many(np.array([i - 1, i + length - 1]))
                    ops += 2
                    if hi > lo:
                        cur = np.arange(lo + 1, hi + 1)
                        sym = self.map.unmap_many(np.full(cur.shape[0], ell), s.access_many(cur))
                        out.setdefault(("snip", k), []).append((b.select1_many(cur) - i, sym))
                        ops += 3 * cur.shape[0]
            secs = time.perf_counter() - t0
            return out, ops, secs

        ks, a = cols["snippet"]
        for k, length in zip(ks.tolist(), a[:, 1].tolist()):
            answers[k] = np.empty(length, dtype=np.int64)
        for node, (out, ops, secs) in enumerate(self._fan(node_work)):
            meter.ops[node] += ops
            meter.secs[node] += secs
            for key, val in out.items():
                if isinstance(key, tuple):
                    for offs, sym in val:
                        answers[key[1]][offs] = sym
                else:
                    answers[key] = val
        return answers, _report(meter.cost(), 0.0, meter.model, batch, cols)


def _report(node_cost, broker_cost, model, batch, cols):
    units = len(batch)
    snip = cols["snippet"][1]
    if snip.size:
        units += int(snip[:, 1].sum()) - snip.shape[0]
    return SimReport(model, node_cost, broker_cost, len(batch), units)


class ApClusterSim:
    """Baseline: a single broker holds the map and the partition-id string ``t``.

    Nodes own only the sub-sequences ``s_l``; every query passes through
    the broker, whose work is serial and adds to the parallel time.
    """

    def __init__(self, ap: ApString, nodes: int | None = None, cost_model: str = "ops"):
        self.ap, self.map = ap, ap.map
        self.nodes = ap.p if nodes is None else int(nodes)
        self.cost_model = cost_model
        self.t = WaveletMatrix(ap.partition_ids(), max(ap.p, 1))

    def sim_run(self, batch):
        batch = list(batch)
        ap, t, n = self.ap, self.t, self.ap.n
        cols, errors = _parse(batch)
        answers: list = [None] * len(batch)
        for k, e in errors.items():
            answers[k] = e
        meter = _Meter(self.nodes, self.cost_model)
        broker = [0.0, 0.0]  # ops, seconds

        def on_broker(fn, ops):
            t0 = time.perf_counter()
            res = fn()
            broker[1] += time.perf_counter() - t0
            broker[0] += ops
            return res

        def on_node(ell, fn, ops):
            node = ell % self.nodes
            t0 = time.perf_counter()
            res = fn()
            meter.secs[node] += time.perf_counter() - t0
            meter.ops[node] += ops
            return res

        for op in ("rank", "select"):
            ks, a = cols[op]
            if ks.size == 0:
                continue
            parts, codes = on_broker(lambda: self.map.map_many(a[:, 0]), ks.size)
            bad = np.zeros(ks.size, bool)
            if op == "rank":
                bad = (a[:, 1] < 0) | (a[:, 1] > n)
                for k in ks[bad]:
                    answers[k] = RangeError(f"position outside [0, {n}]")
            for k in ks[(parts < 0) & ~bad]:
                answers[k] = 0 if op == "rank" else RangeError("symbol does not occur")
            live = np.flatnonzero((parts >= 0) & ~bad)
            for ell in np.unique(parts[live]).tolist():
                sel = live[parts[live] == ell]
                s, c, x = ap.S[ell], codes[sel], a[sel, 1]
                if op == "rank":
                    k1 = on_broker(lambda: t.rank_many(np.full(sel.size, ell), x), sel.size)
                    r = on_node(ell, lambda: s.rank_many(c, k1), sel.size)
                else:
                    ok = (x >= 1) & (x <= s.rank_many(c, np.full(sel.size, s.n)))
                    for k in ks[sel[~ok]]:
                        answers[k] = RangeError("select rank outside [1, occurrences]")
                    sel, c, x = sel[ok], c[ok], x[ok]
                    if sel.size == 0:
                        continue
                    k1 = on_node(ell, lambda: s.select_many(c, x), sel.size)
                    r = on_broker(lambda: t.select_many(np.full(sel.size, ell), k1), sel.size)
                for k, v in zip(ks[sel].tolist(), r.tolist()):
                    answers[k] = v

        ks, a = cols["access"]
        ok = (a[:, 0] >= 1) & (a[:, 0] <= n)
        for k in ks[~ok]:
            answers[k] = RangeError("position outside the string")
        ks, i = ks[ok], a[ok, 0]
        if ks.size:
            parts = on_broker(lambda: t.access_many(i), ks.size)
            loc = on_broker(lambda: t.rank_many(parts, i), ks.size)
            for ell in np.unique(parts).tolist():
                sel = np.flatnonzero(parts == ell)
                c = on_node(ell, lambda: ap.S[ell].access_many(loc[sel]), sel.size)
                sym = on_broker(lambda: self.map.unmap_many(np.full(sel.size, ell), c), sel.size)
                for k, v in zip(ks[sel].tolist(), sym.tolist()):
                    answers[k] = v

        ks, a = cols["snippet"]
        for k, (i, length) in zip(ks.tolist(), a.tolist()):
            if i < 1 or length < 1 or i + length - 1 > n:
                answers[k] = RangeError("snippet outside the string")
                continue
            out = np.empty(length, dtype=np.int64)
            win = np.arange(i, i + length)
            parts = on_broker(lambda: t.access_many(win), length)
            for ell in np.unique(parts).tolist():
                sel = np.flatnonzero(parts == ell)
                first = on_broker(lambda: t.rank(ell, i - 1), 1)
                cur = first + 1 + np.arange(sel.size)
                c = on_node(ell, lambda: ap.S[ell].access_many(cur), sel.size)
                out[sel] = on_broker(lambda: self.map.unmap_many(np.full(sel.size, ell), c),
                                     sel.size)
            answers[k] = out
        cost = meter.cost()
        bcost = broker[0] if self.cost_model == "ops" else broker[1] * 1e6
        return answers, _report(cost, bcost, meter.model, batch, cols)


def sequential_answers(ap: ApString, batch) -> list:
    """Reference answers from the single-node structure, one query at a time."""
    out = []
    for q in batch:
        try:
            op, args = q[0], [int(x) for x in q[1:]]
            if op not in _ARITY or len(args) != _ARITY[op]:
                raise ValueError(f"malformed query {q!r}")
            if op == "rank":
                out.append(ap.rank(*args))
            elif op == "select":
                out.append(ap.select(*args))
            elif op == "access":
                out.append(ap.access(*args))
            else:
                out.append(ap.snippet(*args))
        except (RangeError, ValueError, TypeError, IndexError) as exc:
            out.append(exc)
    return out


def same_answers(xs, ys) -> bool:
    if len(xs) != len(ys):
        return False
    for x, y in zip(xs, ys):
        if isinstance(x, Exception) or isinstance(y, Exception):
            if not (isinstance(x, Exception) and isinstance(y, Exception)):
                return False
        elif isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
            if not np.array_equal(np.asarray(x), np.asarray(y)):
                return False
        elif x != y:
            return False
    return True


TABLE_COLUMNS = ("operation", "asap_time_us", "asap_speedup", "ap_time_us", "ap_speedup",
                 "ap_over_asap")


def distributed_table(ap: ApString, nodes: int | None = None, count: int = 10_000,
                      snippet_len: int = 100, seed=None, cost_model: str = "measured",
                      repeats: int = 3) -> list[dict]:
    """Per-operation time and speedup for both schemes.

    Times are parallel microseconds per query (per symbol for snippets)
    under ``measured``, or primitive calls under ``ops``; the best of
    ``repeats`` runs is kept.
    """
    from . import corpora

    rng = corpora.rng_for(seed)
    seq = ap.to_array()
    batches = {}
    a, i = corpora.rank_queries(seq, count, rng)
    batches["rank"] = [("rank", x, y) for x, y in zip(a.tolist(), i.tolist())]
    a, j = corpora.select_queries(seq, count, rng)
    batches["select"] = [("select", x, y) for x, y in zip(a.tolist(), j.tolist())]
    batches["access"] = [("access", x) for x in corpora.access_queries(ap.n, count, rng).tolist()]
    nsnip = max(1, count // snippet_len)
    starts = corpora.snippet_queries(ap.n, nsnip, min(snippet_len, ap.n), rng)
    batches["snippet"] = [("snippet", x, min(snippet_len, ap.n)) for x in starts.tolist()]
    asap = ClusterSim(ap, nodes, cost_model)
    base = ApClusterSim(ap, nodes, cost_model)
    rows = []
    for op, batch in batches.items():
        best = {}
        for name, sim in (("asap", asap), ("ap", base)):
            reps = [sim.sim_run(batch)[1] for _ in range(repeats if cost_model == "measured" else 1)]
            best[name] = min(reps, key=lambda r: r.t_par)
        ta, tb = best["asap"].per_unit(), best["ap"].per_unit()
        rows.append({"operation": op, "asap_time_us": ta, "asap_speedup": best["asap"].speedup,
                     "ap_time_us": tb, "ap_speedup": best["ap"].speedup,
                     "ap_over_asap": tb / ta if ta > 0 else float("inf")})
    return rows


def table_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for r in rows:
        w.writerow([r["operation"]] + [f"{r[c]:.4f}" for c in TABLE_COLUMNS[1:]])
    return buf.getvalue()
