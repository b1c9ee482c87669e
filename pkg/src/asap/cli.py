"""Command-line front end: build, inspect, query, benchmark and simulate."""

from __future__ import annotations

import argparse
import sys
import time
import unicodedata

import numpy as np

from . import corpora
from .apstring import ApString
from .distsim import distributed_table, table_csv
from .docretrieval import Collection, tokenize
from .errors import AsapError, FormatError
from .indexfile import Index
from .partition import build_map, entropy_of, parse_scheme
from .runs import RunApString
from .textsearch import FmIndex, build_bwt, invert_bwt, naive_count

BENCH_HEADER = "operation,n_queries,total_ns,ns_per_op,index_bits,bits_per_symbol"


class CliError(Exception):
    pass


# ------------------------------------------------------------------ symbols
class Codec:
    """Translate between command-line symbols and integer codes."""

    def __init__(self, index: Index):
        self.mode = index.mode
        self.alphabet = index.alphabet
        self.vocab = index.coll.vocab if index.coll is not None else index.meta.get("vocab")
        if self.mode == "chars":
            self.code = {cp: k for k, cp in enumerate(self.alphabet)}
        elif self.mode == "words":
            self.code = {w: k for k, w in enumerate(self.vocab or [])}

    def parse(self, tok: str) -> int:
        """Code of a symbol, or -1 if it is not in the alphabet."""
        if self.mode == "tokens":
            try:
                return int(tok)
            except ValueError:
                return -1
        if self.mode == "chars":
            if tok.upper().startswith("U+") and len(tok) > 2:
                cp = int(tok[2:], 16)
            elif len(tok) == 1:
                cp = ord(tok)
            else:
                return -1
            return self.code.get(cp, -1)
        return self.code.get(tok.lower(), -1)

    def show(self, code: int) -> str:
        if self.mode == "tokens":
            return str(code)
        if self.mode == "chars":
            ch = chr(self.alphabet[code])
            if ch.isspace() or unicodedata.category(ch)[0] == "C":
                return f"U+{ord(ch):04X}"
            return ch
        return self.vocab[code]

    def pattern(self, line: str) -> list[int]:
        if self.mode == "tokens":
            return [int(x) for x in line.split()]
        if self.mode == "chars":
            return [self.code.get(ord(ch), -1) for ch in line]
        return [self.code.get(w, -1) for w in tokenize(line)]


# ------------------------------------------------------------------- build
def read_tokens(path) -> np.ndarray:
    raw = open(path, "rb").read()
    if len(raw) % 4:
        raise CliError(f"{path}: token file length is not a multiple of 4 bytes")
    return np.frombuffer(raw, dtype="<u4").astype(np.int64)


def write_tokens(path, seq) -> None:
    with open(path, "wb") as fh:
        fh.write(np.asarray(seq).astype("<u4").tobytes())


def build_index(path, scheme="sparse", structure="aps", mode="tokens", fm=False,
                docs_per_line=False) -> Index:
    parse_scheme(scheme)
    if structure not in ("aps", "raps"):
        raise CliError(f"unknown structure {structure!r}")
    meta = {"scheme": scheme}
    alphabet: list = []
    if mode == "words":
        text = open(path, encoding="utf-8").read()
        docs = text.splitlines() if docs_per_line else [text]
        if not fm:
            if structure != "aps":
                raise CliError("document collections use the aps structure")
            coll = Collection.ingest(docs, scheme)
            return Index("collection", "words", coll.text, coll=coll, meta=meta)
        vocab: dict[str, int] = {}
        seq = np.asarray([vocab.setdefault(w, len(vocab)) for d in docs for w in tokenize(d)],
                         dtype=np.int64)
        meta["vocab"] = list(vocab)
    elif mode == "chars":
        text = open(path, encoding="utf-8").read()
        cps = np.fromiter((ord(c) for c in text), dtype=np.int64, count=len(text))
        alphabet_arr, seq = np.unique(cps, return_inverse=True)
        alphabet = [int(c) for c in alphabet_arr]
        seq = seq.astype(np.int64)
    else:
        seq = read_tokens(path)
    if seq.size == 0:
        raise CliError(f"{path}: input is empty")
    sigma = int(seq.max()) + 1
    if fm:
        f = FmIndex.build(seq, structure, scheme, sigma)
        return Index("fm", mode, f.bwt, fm=f, alphabet=alphabet, meta=meta)
    if structure == "raps":
        if seq.size < 2:
            raise CliError("the raps structure needs at least 2 symbols")
        st = RunApString(seq, sigma)
    else:
        st = ApString.build(seq, build_map(seq, scheme, sigma), sigma)
    return Index("sequence", mode, st, alphabet=alphabet, meta=meta)


# ------------------------------------------------------------------ helpers
def _load(path) -> Index:
    try:
        return Index.load(path)
    except OSError as exc:
        raise CliError(f"cannot read index {path}: {exc}") from exc


def _plain_sequence(index: Index) -> np.ndarray:
    """The indexed string (the text itself for FM indexes)."""
    arr = index.seq.to_array()
    return invert_bwt(arr) if index.kind == "fm" else arr


def _index_bits(index: Index) -> int:
    return 8 * len(index.to_bytes())


# ---------------------------------------------------------------- commands
def cmd_build(args) -> int:
    mode = "chars" if args.chars else "words" if args.text else "tokens"
    index = build_index(args.input, args.scheme, args.structure, mode, args.fm,
                        args.docs_per_line)
    index.save(args.out)
    seq = index.seq
    print(f"built {index.kind} index: n={seq.n} sigma={seq.sigma} structure={index.structure}"
          f" -> {args.out} ({_index_bits(index)} bits)")
    return 0


def cmd_info(args) -> int:
    index = _load(args.index)
    seq, codec = index.seq, Codec(index)
    print(f"kind: {index.kind}")
    print(f"mode: {index.mode}")
    print(f"structure: {index.structure}")
    print(f"scheme: {seq.map.describe()}")
    print(f"n: {seq.n}")
    print(f"sigma: {seq.sigma}")
    print(f"partitions: {seq.map.p}")
    bits = _index_bits(index)
    print(f"index_bits: {bits}")
    print(f"bits_per_symbol: {bits / seq.n:.4f}")
    body = seq.to_array()
    print(f"h0: {entropy_of(body[body > 0] if index.kind == 'fm' else body):.4f}")
    if isinstance(seq, ApString):
        for k, v in seq.size_report().as_dict().items():
            if k == "bits_per_symbol":
                k = "structure_bits_per_symbol"
            if k not in ("n", "p"):
                print(f"{k}: {v:.4f}" if isinstance(v, float) else f"{k}: {v}")
    else:
        for k, v in seq.stats.items():
            print(f"{k}: {v}")
    if index.coll is not None:
        print(f"documents: {index.coll.ndocs}")
    if args.partitions:
        show = codec.show if index.kind != "fm" else (lambda c: "$" if c == 0 else codec.show(c - 1))
        for ell, members in enumerate(seq.map.partitions()):
            print(f"partition {ell}: " + " ".join(show(a) for a in members))
    return 0


def _answer(index, codec, op, toks):
    seq = index.seq
    if op in _QUERY_ARITY and len(toks) != _QUERY_ARITY[op]:
        raise ValueError(f"{op} takes {_QUERY_ARITY[op]} argument(s)")
    if op == "rank":
        return str(seq.rank(codec.parse(toks[0]), int(toks[1])))
    if op == "select":
        a = codec.parse(toks[0])
        if a < 0:
            raise AsapError(f"symbol {toks[0]!r} does not occur")
        return str(seq.select(a, int(toks[1])))
    if op == "access":
        return codec.show(seq.access(int(toks[0])))
    if op == "snippet":
        return " ".join(codec.show(c) for c in seq.snippet(int(toks[0]), int(toks[1])))
    raise ValueError(f"unknown operation {op!r}")


_QUERY_ARITY = {"rank": 2, "select": 2, "access": 1, "snippet": 2}


def _split_queries(toks):
    """Cut ``rank a 5 access 7`` into ``[[rank, a, 5], [access, 7]]``."""
    out, k = [], 0
    while k < len(toks):
        width = _QUERY_ARITY.get(toks[k])
        if width is None:
            out.append(toks[k:])
            break
        out.append(toks[k:k + 1 + width])
        k += 1 + width
    return out


def cmd_query(args) -> int:
    index = _load(args.index)
    if index.kind == "fm":
        raise CliError("query runs on sequence or collection indexes; use count for FM indexes")
    codec = Codec(index)
    lines = _split_queries(args.op)
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            lines += [ln.split() for ln in fh if ln.strip() and not ln.startswith("#")]
    failed = 0
    for toks in lines:
        try:
            print(_answer(index, codec, toks[0], toks[1:]))
        except (AsapError, ValueError, IndexError) as exc:
            failed += 1
            print(f"error: {' '.join(toks)}: {exc}")
    return 2 if failed else 0


def cmd_snippet(args) -> int:
    return cmd_query(argparse.Namespace(index=args.index, op=["snippet", args.i, args.length],
                                        file=None))


def cmd_count(args) -> int:
    index = _load(args.index)
    if index.fm is None:
        raise CliError("count needs an index built with --fm")
    codec = Codec(index)
    with open(args.patterns, encoding="utf-8") as fh:
        pats = [codec.pattern(ln.rstrip("\n")) for ln in fh]
    for c in index.fm.count_many(pats):
        print(int(c))
    return 0


def cmd_intersect(args) -> int:
    index = _load(args.index)
    if index.coll is None:
        raise CliError("intersect needs a collection index (build --text)")
    docs = index.coll.intersect(args.terms)
    print(" ".join(str(d) for d in docs))
    return 0


def _group_workload(queries):
    groups: dict[str, list] = {}
    for q in queries:
        groups.setdefault(q[0], []).append(q[1:])
    return groups


def _bench_ops(index, groups, threads):
    """Yield ``(operation, n_queries, callable)`` for each workload group."""
    seq = index.seq
    for op, rows in groups.items():
        if op in ("rank", "select"):
            a = np.asarray([r[0] for r in rows], dtype=np.int64)
            x = np.asarray([r[1] for r in rows], dtype=np.int64)
            if isinstance(seq, ApString):
                yield op, len(rows), lambda op=op, a=a, x=x: seq.batch(op, a, x, workers=threads)
            else:
                fn = seq.rank_many if op == "rank" else seq.select_many
                yield op, len(rows), lambda fn=fn, a=a, x=x: fn(a, x)
        elif op == "access":
            i = np.asarray([r[0] for r in rows], dtype=np.int64)
            yield op, len(rows), lambda i=i: seq.access_many(i)
        elif op == "snippet":
            yield op, len(rows), lambda rows=rows: [seq.snippet(i, ln) for i, ln in rows]
        elif op == "count":
            if index.fm is None:
                raise CliError("count queries need an FM index")
            yield op, len(rows), lambda rows=rows: index.fm.count_many(rows)
        elif op == "intersect":
            if index.coll is None:
                raise CliError("intersect queries need a collection index")
            c = index.coll
            yield op, len(rows), lambda rows=rows: [c.intersect(r) for r in rows]
            yield ("intersect_materialized", len(rows),
                   lambda rows=rows: [c.intersect_materialized(r) for r in rows])
        else:
            raise CliError(f"unknown workload operation {op!r}")


def bench_rows(index, queries, repeat=3, threads=1, per_repeat=False) -> list[str]:
    bits = _index_bits(index)
    bps = bits / index.seq.n
    out = []
    for op, nq, fn in _bench_ops(index, _group_workload(queries), threads):
        best = None
        for _ in range(max(1, repeat)):
            t0 = time.perf_counter_ns()
            fn()
            dt = time.perf_counter_ns() - t0
            best = dt if best is None else min(best, dt)
            if per_repeat:
                out.append(f"{op},{nq},{best},{best / nq:.3f},{bits},{bps:.4f}")
        if not per_repeat:
            out.append(f"{op},{nq},{best},{best / nq:.3f},{bits},{bps:.4f}")
    return out


def cmd_bench(args) -> int:
    index = _load(args.index)
    queries = corpora.read_workload(args.workload)
    print(BENCH_HEADER)
    try:
        rows = bench_rows(index, queries, args.repeat, args.threads, args.per_repeat)
    except AsapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for row in rows:
        print(row)
    return 0


def cmd_workload(args) -> int:
    index = _load(args.index)
    seq = _plain_sequence(index)
    rng = corpora.rng_for(args.seed)
    qs = []
    if index.kind == "fm":
        for m in args.pattern_lengths:
            starts = rng.integers(0, seq.shape[0] - m + 1, size=args.count)
            qs += [("count",) + tuple(int(x) for x in seq[s:s + m]) for s in starts]
    else:
        qs = corpora.workload(seq, args.count, args.seed, args.snippet_len, args.mode)
        if index.coll is not None:
            for _ in range(args.count // 10):
                k = int(rng.integers(2, 5))
                qs.append(("intersect",) + tuple(int(x) for x in seq[rng.integers(0, len(seq), k)]))
    corpora.write_workload(args.out, qs)
    print(f"wrote {len(qs)} queries to {args.out}")
    return 0


def cmd_patterns(args) -> int:
    index = _load(args.index)
    codec = Codec(index)
    text = _plain_sequence(index)
    rng = corpora.rng_for(args.seed)
    m = args.length
    if text.shape[0] < m:
        raise CliError("text shorter than the pattern length")
    seen, pats = set(), []
    tries = 0
    while len(pats) < args.count and tries < 20 * args.count:
        tries += 1
        if rng.random() < args.absent:
            p = tuple(int(x) for x in rng.integers(0, int(text.max()) + 1, m))
        else:
            s = int(rng.integers(0, text.shape[0] - m + 1))
            p = tuple(int(x) for x in text[s:s + m])
        if p not in seen:
            seen.add(p)
            pats.append(p)
    sep = "" if index.mode == "chars" else " "
    with open(args.out, "w", encoding="utf-8") as fh:
        for p in pats:
            if index.mode == "chars":
                fh.write("".join(chr(index.alphabet[c]) for c in p) + "\n")
            else:
                fh.write(sep.join(codec.show(c) for c in p) + "\n")
    if args.oracle:
        with open(args.oracle, "w", encoding="utf-8") as fh:
            for p in pats:
                fh.write(f"{naive_count(text, p)}\n")
    print(f"wrote {len(pats)} patterns to {args.out}")
    return 0


def cmd_verify(args) -> int:
    """Compare random queries against direct scans of the decoded string."""
    index = _load(args.index)
    rng = corpora.rng_for(args.seed)
    bad = 0
    if index.kind == "fm":
        text = _plain_sequence(index)
        starts = rng.integers(0, max(1, text.shape[0] - args.length + 1), size=args.queries)
        pats = [text[s:s + args.length] for s in starts]
        got = index.fm.count_many(pats)
        bad = sum(int(g != naive_count(text, p)) for g, p in zip(got, pats))
        print(f"count: {args.queries} patterns, {bad} mismatches")
        return 1 if bad else 0
    seq = index.seq
    x = seq.to_array()
    n = x.shape[0]
    a, i = corpora.rank_queries(x, args.queries, rng)
    want = np.array([np.count_nonzero(x[:k] == c) for c, k in zip(a, i)])
    bad_r = int(np.count_nonzero(seq.rank_many(a, i) != want))
    a, j = corpora.select_queries(x, args.queries, rng)
    want = np.array([np.flatnonzero(x == c)[k - 1] + 1 for c, k in zip(a, j)])
    bad_s = int(np.count_nonzero(seq.select_many(a, j) != want))
    i = corpora.access_queries(n, args.queries, rng)
    bad_a = int(np.count_nonzero(seq.access_many(i) != x[i - 1]))
    for name, b in (("rank", bad_r), ("select", bad_s), ("access", bad_a)):
        print(f"{name}: {args.queries} queries, {b} mismatches")
    bad = bad_r + bad_s + bad_a
    if args.source:
        src = build_index(args.source, mode=index.mode, docs_per_line=args.docs_per_line)
        same = np.array_equal(src.seq.to_array(), x) if index.mode != "chars" else (
            [src.alphabet[c] for c in src.seq.to_array()] == [index.alphabet[c] for c in x])
        print(f"source round trip: {'ok' if same else 'MISMATCH'}")
        bad += 0 if same else 1
    return 1 if bad else 0


def cmd_simulate(args) -> int:
    index = _load(args.index)
    if not isinstance(index.seq, ApString):
        raise CliError("simulate needs an aps index")
    rows = distributed_table(index.seq, args.nodes, args.queries, args.snippet_len, args.seed,
                             args.cost, args.repeats)
    sys.stdout.write(table_csv(rows))
    return 0


def cmd_gen(args) -> int:
    seed = args.seed
    if args.kind == "docs":
        docs = corpora.collection_docs(args.docs, args.sigma, args.doc_len, args.s, seed)
        with open(args.out, "w", encoding="utf-8") as fh:
            for d in docs:
                fh.write(" ".join(d) + "\n")
        print(f"wrote {len(docs)} documents to {args.out}")
        return 0
    if args.kind == "zipf":
        seq = corpora.zipf_string(args.n, args.sigma, args.s, seed)
    elif args.kind == "random":
        seq = corpora.random_string(args.n, args.sigma, seed)
    elif args.kind == "runs":
        seq = corpora.run_string(args.n, args.r, args.sigma, seed)
    else:
        seq = corpora.repetitive_text(args.base, args.copies, args.sigma, args.mutation, seed)
    write_tokens(args.out, seq)
    print(f"wrote {seq.shape[0]} tokens to {args.out}")
    return 0


def cmd_bwt(args) -> int:
    seq = read_tokens(args.input)
    if seq.size == 0:
        raise CliError(f"{args.input}: input is empty")
    bwt, _ = build_bwt(seq)
    write_tokens(args.out, bwt)
    r = 1 + int(np.count_nonzero(bwt[1:] != bwt[:-1]))
    print(f"n={bwt.shape[0]} runs={r}")
    return 0


# ------------------------------------------------------------------ parser
def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="asap", description="Alphabet-partitioned rank/select indexes.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build an index from a token, character or text file")
    b.add_argument("input")
    b.add_argument("--out", "-o", required=True)
    b.add_argument("--scheme", default="sparse", help="sparse, dense, dense:L or uniform")
    b.add_argument("--structure", default="aps", choices=("aps", "raps"))
    g = b.add_mutually_exclusive_group()
    g.add_argument("--chars", action="store_true", help="input is UTF-8; one symbol per character")
    g.add_argument("--text", action="store_true", help="input is UTF-8; tokenize into words")
    b.add_argument("--docs-per-line", action="store_true", help="with --text, one document per line")
    b.add_argument("--fm", action="store_true", help="index the BWT for pattern counting")
    b.set_defaults(fn=cmd_build)

    i = sub.add_parser("info", help="describe an index")
    i.add_argument("index")
    i.add_argument("--partitions", action="store_true", help="list each partition's symbols")
    i.set_defaults(fn=cmd_info)

    q = sub.add_parser("query", help="run rank/select/access/snippet queries")
    q.add_argument("index")
    q.add_argument("op", nargs="*", help="e.g. rank a 5 | select a 4 | access 7 | snippet 7 4")
    q.add_argument("--file", help="one query per line")
    q.set_defaults(fn=cmd_query)

    s = sub.add_parser("snippet", help="print s[i..i+L-1]")
    s.add_argument("index")
    s.add_argument("i")
    s.add_argument("length")
    s.set_defaults(fn=cmd_snippet)

    c = sub.add_parser("count", help="count pattern occurrences (FM index)")
    c.add_argument("index")
    c.add_argument("patterns", help="file with one pattern per line")
    c.set_defaults(fn=cmd_count)

    x = sub.add_parser("intersect", help="documents containing all terms")
    x.add_argument("index")
    x.add_argument("terms", nargs="+")
    x.set_defaults(fn=cmd_intersect)

    w = sub.add_parser("workload", help="generate a random query workload")
    w.add_argument("index")
    w.add_argument("--out", "-o", required=True)
    w.add_argument("--count", type=int, default=10_000)
    w.add_argument("--mode", choices=("positions", "symbols"), default="positions",
                   help="draw symbols by text position or uniformly over the alphabet")
    w.add_argument("--snippet-len", type=int, default=100)
    w.add_argument("--pattern-lengths", type=int, nargs="+", default=[4, 8, 16])
    w.add_argument("--seed", type=int)
    w.set_defaults(fn=cmd_workload)

    pt = sub.add_parser("patterns", help="sample unique patterns, optionally with naive counts")
    pt.add_argument("index")
    pt.add_argument("--out", "-o", required=True)
    pt.add_argument("--oracle", help="also write naive occurrence counts here")
    pt.add_argument("--count", type=int, default=50_000)
    pt.add_argument("--length", type=int, default=8)
    pt.add_argument("--absent", type=float, default=0.0,
                    help="fraction of patterns drawn uniformly instead of from the text")
    pt.add_argument("--seed", type=int)
    pt.set_defaults(fn=cmd_patterns)

    bn = sub.add_parser("bench", help="time a workload; CSV on stdout")
    bn.add_argument("index")
    bn.add_argument("--workload", required=True)
    bn.add_argument("--repeat", type=int, default=3)
    bn.add_argument("--threads", type=int, default=1)
    bn.add_argument("--per-repeat", action="store_true",
                    help="one row per repeat with the running minimum")
    bn.set_defaults(fn=cmd_bench)

    sm = sub.add_parser("simulate", help="distributed-processing table as CSV")
    sm.add_argument("index")
    sm.add_argument("--nodes", type=int)
    sm.add_argument("--queries", type=int, default=10_000)
    sm.add_argument("--snippet-len", type=int, default=100)
    sm.add_argument("--cost", choices=("measured", "ops"), default="measured")
    sm.add_argument("--repeats", type=int, default=3)
    sm.add_argument("--seed", type=int)
    sm.set_defaults(fn=cmd_simulate)

    v = sub.add_parser("verify", help="check random queries against direct scans")
    v.add_argument("index")
    v.add_argument("--queries", type=int, default=1000)
    v.add_argument("--length", type=int, default=8, help="pattern length for FM indexes")
    v.add_argument("--source", help="original input, to check the round trip")
    v.add_argument("--docs-per-line", action="store_true")
    v.add_argument("--seed", type=int)
    v.set_defaults(fn=cmd_verify)

    gn = sub.add_parser("gen", help="write a synthetic corpus")
    gn.add_argument("kind", choices=("zipf", "random", "runs", "repetitive", "docs"))
    gn.add_argument("--out", "-o", required=True)
    gn.add_argument("--n", type=int, default=100_000)
    gn.add_argument("--sigma", type=int, default=256)
    gn.add_argument("--s", type=float, default=1.0, help="Zipf exponent")
    gn.add_argument("--r", type=int, default=1000, help="run count for 'runs'")
    gn.add_argument("--base", type=int, default=10_000)
    gn.add_argument("--copies", type=int, default=50)
    gn.add_argument("--mutation", type=float, default=0.01)
    gn.add_argument("--docs", type=int, default=1000)
    gn.add_argument("--doc-len", type=int, default=100)
    gn.add_argument("--seed", type=int)
    gn.set_defaults(fn=cmd_gen)

    bw = sub.add_parser("bwt", help="write the BWT of a token file (sentinel 0, symbols +1)")
    bw.add_argument("input")
    bw.add_argument("--out", "-o", required=True)
    bw.set_defaults(fn=cmd_bwt)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, FormatError, OSError, ValueError) as exc:
        print(f"asap: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
