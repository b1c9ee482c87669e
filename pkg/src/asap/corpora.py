"""Synthetic corpora and query workloads."""

from __future__ import annotations

import os

import numpy as np


def default_seed(fallback: int = 12345) -> int:
    env = os.environ.get("ASAP_SEED", "").strip()
    return int(env) if env else fallback


def rng_for(seed=None) -> np.random.Generator:
    return np.random.default_rng(default_seed() if seed is None else seed)


def zipf_string(n: int, sigma: int, s: float = 1.0, seed=None) -> np.ndarray:
    """``n`` symbols over ``[0, sigma)`` with ``P(k) ~ 1/(k+1)^s``, ids shuffled."""
    rng = rng_for(seed)
    w = 1.0 / np.arange(1, sigma + 1, dtype=np.float64) ** s
    ranks = rng.choice(sigma, size=n, p=w / w.sum())
    return rng.permutation(sigma)[ranks].astype(np.int64)


def random_string(n: int, sigma: int, seed=None) -> np.ndarray:
    return rng_for(seed).integers(0, sigma, size=n, dtype=np.int64)


def run_string(n: int, r: int, sigma: int, seed=None) -> np.ndarray:
    """A string of length ``n`` with exactly ``r`` runs (needs ``sigma >= 2`` if ``r > 1``)."""
    if not 1 <= r <= n:
        raise ValueError("need 1 <= r <= n")
    rng = rng_for(seed)
    cuts = np.sort(rng.choice(np.arange(1, n), size=r - 1, replace=False)) if r > 1 else []
    lens = np.diff(np.concatenate(([0], cuts, [n]))).astype(np.int64)
    heads = np.empty(r, dtype=np.int64)
    heads[0] = rng.integers(0, sigma)
    if r > 1:
        step = rng.integers(1, sigma, size=r - 1)
        heads[1:] = (heads[0] + np.cumsum(step)) % sigma
    return np.repeat(heads, lens)


def repetitive_text(base_len: int = 10_000, copies: int = 50, sigma: int = 1000,
                    mutation: float = 0.01, seed=None) -> np.ndarray:
    """A Zipf base text repeated ``copies`` times, each copy with point mutations."""
    rng = rng_for(seed)
    base = zipf_string(base_len, sigma, 1.0, seed=int(rng.integers(1 << 62)))
    text = np.tile(base, copies)
    hit = rng.random(text.shape[0]) < mutation
    text[hit] = rng.integers(0, sigma, size=int(hit.sum()))
    return text


def collection_docs(ndocs: int, vocab: int, mean_len: int = 100, s: float = 1.0,
                    seed=None) -> list[list[str]]:
    """Documents of Zipf-distributed words ``w0, w1, ...`` with Poisson lengths."""
    rng = rng_for(seed)
    lens = rng.poisson(mean_len, size=ndocs)
    words = zipf_string(int(lens.sum()), vocab, s, seed=int(rng.integers(1 << 62)))
    out, at = [], 0
    for ln in lens:
        out.append([f"w{k}" for k in words[at:at + ln]])
        at += ln
    return out


# ------------------------------------------------------------------ queries
def sample_symbols(seq, count: int, rng, mode: str = "positions") -> np.ndarray:
    """Symbols drawn from text positions (frequency-weighted) or uniformly over those occurring."""
    seq = np.asarray(seq)
    if mode == "positions":
        return seq[rng.integers(0, seq.shape[0], size=count)].astype(np.int64)
    occ = np.unique(seq)
    return occ[rng.integers(0, occ.shape[0], size=count)].astype(np.int64)


def rank_queries(seq, count: int, rng, mode: str = "positions"):
    a = sample_symbols(seq, count, rng, mode)
    i = rng.integers(0, len(seq) + 1, size=count)
    return a, i


def select_queries(seq, count: int, rng, mode: str = "positions"):
    a = sample_symbols(seq, count, rng, mode)
    tot = np.bincount(np.asarray(seq), minlength=int(a.max()) + 1)[a]
    j = 1 + (rng.random(count) * tot).astype(np.int64)
    return a, np.minimum(j, tot)


def access_queries(n: int, count: int, rng):
    return rng.integers(1, n + 1, size=count)


def snippet_queries(n: int, count: int, length: int, rng):
    return rng.integers(1, n - length + 2, size=count)


def workload(seq, count: int, seed=None, snippet_len: int = 100, mode: str = "positions"):
    """A mixed list of tagged queries ``(op, *args)``."""
    rng = rng_for(seed)
    n = len(seq)
    out = []
    a, i = rank_queries(seq, count, rng, mode)
    out += [("rank", int(x), int(y)) for x, y in zip(a, i)]
    a, j = select_queries(seq, count, rng, mode)
    out += [("select", int(x), int(y)) for x, y in zip(a, j)]
    out += [("access", int(x)) for x in access_queries(n, count, rng)]
    if n >= snippet_len:
        out += [("snippet", int(x), snippet_len)
                for x in snippet_queries(n, max(1, count // 10), snippet_len, rng)]
    return out


def write_workload(path, queries) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for q in queries:
            fh.write(" ".join(str(x) for x in q) + "\n")


def read_workload(path) -> list[tuple]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            out.append((parts[0],) + tuple(int(x) for x in parts[1:]))
    return out
