"""Document collections over a word-id ApString: snippets, tf and intersection."""

from __future__ import annotations

import json
import re

import numpy as np

from . import _io, kernels
from ._ensemble import flatten_bits
from .apstring import ApString
from .bitvectors import SparseBitVector
from .errors import ConstructionError, FormatError, RangeError

_TOKEN = re.compile(r"\w+|[^\w\s]")


def tokenize(text: str) -> list[str]:
    """Lowercased words, with each punctuation mark as its own token."""
    return _TOKEN.findall(text.lower())


class Collection:
    """Concatenated documents with a sparse bit vector marking where each starts.

    ``bounds`` has one 1 per non-empty document, at its first token.
    Empty documents keep their ids through ``docs``, which lists the
    (1-based) id of each non-empty document in order.
    """

    def __init__(self, text: ApString, bounds: SparseBitVector, vocab: list[str],
                 docs: np.ndarray, ndocs: int):
        self.text, self.bounds, self.vocab = text, bounds, vocab
        self.docs, self.ndocs = docs, ndocs
        self.word_id = {w: k for k, w in enumerate(vocab)}
        self.n = text.n
        self._D = flatten_bits([bounds], text.n, text._E[14])

    @classmethod
    def ingest(cls, documents, scheme="sparse") -> "Collection":
        """Build from raw strings (tokenized here) or pre-split token lists."""
        vocab: dict[str, int] = {}
        ids, lengths = [], []
        for doc in documents:
            toks = tokenize(doc) if isinstance(doc, str) else list(doc)
            for w in toks:
                ids.append(vocab.setdefault(w, len(vocab)))
            lengths.append(len(toks))
        if not ids:
            raise ConstructionError("collection has no tokens")
        lengths = np.asarray(lengths, dtype=np.int64)
        starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))
        nonempty = np.flatnonzero(lengths > 0)
        seq = np.asarray(ids, dtype=np.int64)
        text = ApString.build(seq, scheme, len(vocab))
        bounds = SparseBitVector(starts[nonempty] + 1, seq.shape[0])
        return cls(text, bounds, list(vocab), (nonempty + 1).astype(np.int64), len(lengths))

    # ---------------------------------------------------------------- docs
    def _slot_of(self, pos):
        return self.bounds.rank1_many(np.asarray(pos, dtype=np.int64).reshape(-1))

    def doc_of(self, pos: int) -> int:
        if not 1 <= pos <= self.n:
            raise RangeError(f"position outside [1, {self.n}]")
        return int(self.docs[self._slot_of(pos)[0] - 1])

    def _slot_span(self, slot: int) -> tuple[int, int]:
        start = self.bounds.select1(slot)
        end = self.bounds.select1(slot + 1) - 1 if slot < self.bounds.ones else self.n
        return start, end

    def doc_span(self, doc: int) -> tuple[int, int]:
        """``(start, end)`` token positions of ``doc``; empty docs give ``end < start``."""
        if not 1 <= doc <= self.ndocs:
            raise RangeError(f"document outside [1, {self.ndocs}]")
        slot = int(np.searchsorted(self.docs, doc)) + 1
        if slot <= self.docs.shape[0] and self.docs[slot - 1] == doc:
            return self._slot_span(slot)
        start = self.bounds.select1(slot) if slot <= self.bounds.ones else self.n + 1
        return start, start - 1

    def doc_tokens(self, doc: int) -> list[str]:
        a, b = self.doc_span(doc)
        if b < a:
            return []
        return self.words(self.text.snippet(a, b - a + 1))

    def words(self, ids) -> list[str]:
        return [self.vocab[int(k)] for k in ids]

    def term_ids(self, terms) -> list[int]:
        """Map words (or ids) to ids; unknown terms become -1."""
        out = []
        for t in terms:
            if isinstance(t, str):
                out.append(self.word_id.get(t.lower(), -1))
            else:
                t = int(t)
                out.append(t if 0 <= t < len(self.vocab) else -1)
        return out

    # ------------------------------------------------------------ queries
    def snippet_at(self, pos: int, length: int) -> list[str]:
        return self.words(self.snippet_ids(pos, length))

    def snippet_ids(self, pos: int, length: int) -> np.ndarray:
        """Word ids at ``pos .. pos+length-1``, cut at the end of the containing document."""
        if not 1 <= pos <= self.n or length < 1:
            raise RangeError(f"snippet start outside [1, {self.n}]")
        _, end = self._slot_span(int(self._slot_of(pos)[0]))
        return self.text.snippet(pos, min(length, end - pos + 1))

    def tf(self, term, doc: int) -> int:
        """Occurrences of ``term`` in ``doc`` as a rank difference."""
        (tid,) = self.term_ids([term])
        a, b = self.doc_span(doc)
        if tid < 0 or b < a:
            return 0
        r = self.text.rank_many([tid, tid], [a - 1, b])
        return int(r[1] - r[0])

    def df(self, term) -> int:
        return len(self.intersect([term]))

    def intersect(self, terms) -> list[int]:
        """Documents containing every term, by round-robin candidate elimination.

        A candidate document ``d`` is kept while successive terms find an
        occurrence inside it; the first term whose next occurrence lands
        in a later document moves the candidate there.
        """
        tids = self.term_ids(terms)
        if not tids or min(tids) < 0:
            return []
        tids = list(dict.fromkeys(tids))
        tids = np.array(tids, dtype=np.int64)
        totals = self.text.rank_many(tids, np.full(tids.shape[0], self.n))
        if totals.min() == 0:
            return []
        parts, codes = self.text.map.map_many(tids)
        slots = kernels.ens_intersect(self.text._E, self.text._W, self._D, parts, codes,
                                      totals, self.bounds.ones)
        return [int(x) for x in self.docs[slots - 1]]

    def intersect_materialized(self, terms) -> list[int]:
        """Baseline: extract every term's full position list, then merge document lists."""
        tids = self.term_ids(terms)
        if not tids or min(tids) < 0:
            return []
        acc = None
        for t in dict.fromkeys(tids):
            cnt = self.text.count(t)
            if cnt == 0:
                return []
            pos = self.text.select_many(np.full(cnt, t), np.arange(1, cnt + 1))
            dl = np.unique(self._slot_of(pos))
            acc = dl if acc is None else np.intersect1d(acc, dl, assume_unique=True)
        return [int(x) for x in self.docs[acc - 1]]

    def token_bytes(self) -> bytes:
        """The token stream as 32-bit little-endian word ids."""
        return self.text.to_array().astype("<u4").tobytes()

    # ------------------------------------------------------- serialization
    def extras_bytes(self) -> bytes:
        secs = [_io.ints(self.ndocs), self.bounds.to_bytes(), _io.array(self.docs, np.int64),
                json.dumps(self.vocab, ensure_ascii=False).encode("utf-8")]
        return _io.pack(_io.TAG_COLL, self.n, secs)

    @classmethod
    def from_parts(cls, text: ApString, extras: bytes) -> "Collection":
        _, n, secs, _ = _io.unpack(extras, 0, _io.TAG_COLL)
        (ndocs,) = _io.read_ints(secs[0])
        bounds, _ = SparseBitVector.from_bytes(secs[1])
        docs = _io.read_array(secs[2], np.int64)
        vocab = json.loads(secs[3].decode("utf-8"))
        if n != text.n or bounds.u != n or bounds.ones != docs.shape[0] or len(vocab) != text.sigma:
            raise FormatError("collection metadata disagrees with its text")
        return cls(text, bounds, vocab, docs, ndocs)

    def __repr__(self) -> str:
        return f"Collection(ndocs={self.ndocs}, n={self.n}, vocab={len(self.vocab)})"
