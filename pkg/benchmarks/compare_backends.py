"""Time the numba kernels against the pure-numpy fallback.

Each backend runs in its own interpreter (the choice is made at import time
from ASAP_DISABLE_NUMBA).  The worker prints JSON timings plus a digest of
the answers so the two runs can be checked for agreement.  The numba build
time includes compiling the construction kernels.

    python benchmarks/compare_backends.py --n 100000 --sigma 4096 --queries 20000
"""
import argparse
import hashlib
import json
import os
import subprocess
import sys
import time

import numpy as np


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def worker(args):
    from asap import ApString, RunApString, corpora
    from asap._accel import BACKEND

    seq = corpora.zipf_string(args.n, args.sigma, 1.0, seed=args.seed)
    rng = np.random.default_rng(args.seed)
    q = args.queries
    t0 = time.perf_counter()
    ap = ApString.build(seq, args.scheme, sigma=args.sigma)
    build = time.perf_counter() - t0
    raps = RunApString(seq, args.sigma)

    cs, idx = corpora.rank_queries(seq, q, rng)
    sc, js = corpora.select_queries(seq, q, rng)
    ai = corpora.access_queries(args.n, q, rng)
    starts = corpora.snippet_queries(args.n, max(1, q // 100), 100, rng)

    # first call of each op pays the JIT compile; keep it out of the timings
    ap.rank_many(cs[:2], idx[:2]), ap.select_many(sc[:2], js[:2]), ap.access_many(ai[:2])
    ap.snippet(int(starts[0]), 100), raps.access_many(ai[:2])

    ops = {
        "rank": lambda: ap.rank_many(cs, idx),
        "select": lambda: ap.select_many(sc, js),
        "access": lambda: ap.access_many(ai),
        "snippet": lambda: np.concatenate([ap.snippet(int(i), 100) for i in starts]),
        "raps_access": lambda: raps.access_many(ai),
    }
    digest = hashlib.sha256()
    times = {"build": build}
    for name, fn in ops.items():
        times[name], out = best_of(fn, args.repeat)
        digest.update(np.asarray(out, dtype=np.int64).tobytes())
    print(json.dumps({"backend": BACKEND, "times": times, "digest": digest.hexdigest()}))


def run_backend(disable, argv):
    env = dict(os.environ)
    env.pop("ASAP_DISABLE_NUMBA", None)
    if disable:
        env["ASAP_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, __file__, "--worker"] + argv, env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--sigma", type=int, default=4096)
    ap.add_argument("--scheme", default="sparse")
    ap.add_argument("--queries", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        return worker(args)

    argv = [f"--n={args.n}", f"--sigma={args.sigma}", f"--scheme={args.scheme}",
            f"--queries={args.queries}", f"--repeat={args.repeat}", f"--seed={args.seed}"]
    fast = run_backend(False, argv)
    slow = run_backend(True, argv)
    print(f"n={args.n} sigma={args.sigma} scheme={args.scheme} queries={args.queries}")
    print(f"{'op':<12}{fast['backend'] + ' s':>12}{slow['backend'] + ' s':>12}{'ratio':>9}")
    for op, t in fast["times"].items():
        u = slow["times"][op]
        print(f"{op:<12}{t:>12.4f}{u:>12.4f}{u / t:>9.1f}")
    same = fast["digest"] == slow["digest"]
    print("answers identical" if same else "ANSWERS DIFFER")
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
