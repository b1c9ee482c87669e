"""On-disk index container.

Layout (little-endian)::

    "ASAPX" | version:u8 | nsec:u32
    nsec x (tag:4s | offset:u64 | length:u64 | crc32:u32)
    section bodies

Offsets are absolute.  Readers skip sections whose tag they do not know.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field

from .apstring import ApString
from .docretrieval import Collection
from .errors import FormatError
from .runs import RunApString
from .textsearch import FmIndex

MAGIC = b"ASAPX"
VERSION = 1
_HEAD = struct.Struct("<5sBI")
_ENTRY = struct.Struct("<4sQQI")


def write_sections(sections: list[tuple[bytes, bytes]]) -> bytes:
    head = _HEAD.size + _ENTRY.size * len(sections)
    table, at = [], head
    for tag, body in sections:
        if len(tag) != 4:
            raise ValueError("section tags are 4 bytes")
        table.append(_ENTRY.pack(tag, at, len(body), zlib.crc32(body)))
        at += len(body)
    return b"".join([_HEAD.pack(MAGIC, VERSION, len(sections))] + table
                    + [body for _, body in sections])


def read_sections(buf: bytes) -> dict[bytes, bytes]:
    if len(buf) < _HEAD.size:
        raise FormatError("file too short for an index header")
    magic, version, nsec = _HEAD.unpack_from(buf, 0)
    if magic != MAGIC:
        raise FormatError("not an index file (bad magic)")
    if version > VERSION:
        raise FormatError(f"index format version {version} is newer than supported {VERSION}")
    out = {}
    for k in range(nsec):
        pos = _HEAD.size + k * _ENTRY.size
        if pos + _ENTRY.size > len(buf):
            raise FormatError("truncated section table")
        tag, off, length, crc = _ENTRY.unpack_from(buf, pos)
        body = buf[off:off + length]
        if len(body) != length:
            raise FormatError(f"section {tag!r} runs past end of file")
        if zlib.crc32(body) != crc:
            raise FormatError(f"checksum mismatch in section {tag!r}")
        out[tag] = bytes(body)
    return out


@dataclass
class Index:
    """What a built index holds: a sequence structure plus optional layers.

    ``kind`` is ``sequence``, ``fm`` or ``collection``; ``mode`` says how
    symbols are shown (``tokens`` ids, ``chars`` or ``words``);
    ``alphabet`` lists the code points of a ``chars`` index.
    """

    kind: str
    mode: str
    seq: object
    fm: FmIndex | None = None
    coll: Collection | None = None
    alphabet: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def structure(self) -> str:
        return "raps" if isinstance(self.seq, RunApString) else "aps"

    def to_bytes(self) -> bytes:
        meta = dict(self.meta, kind=self.kind, mode=self.mode, structure=self.structure,
                    alphabet=self.alphabet)
        secs = [(b"META", json.dumps(meta, sort_keys=True).encode("utf-8"))]
        secs.append((b"APS1" if self.structure == "aps" else b"RAPS", self.seq.to_bytes()))
        if self.fm is not None:
            secs.append((b"FMIX", self.fm.extras_bytes()))
        if self.coll is not None:
            secs.append((b"COLL", self.coll.extras_bytes()))
        return write_sections(secs)

    @classmethod
    def from_bytes(cls, buf: bytes) -> "Index":
        secs = read_sections(buf)
        if b"META" not in secs:
            raise FormatError("index has no META section")
        meta = json.loads(secs.pop(b"META").decode("utf-8"))
        if b"APS1" in secs:
            seq, _ = ApString.from_bytes(secs[b"APS1"])
        elif b"RAPS" in secs:
            seq, _ = RunApString.from_bytes(secs[b"RAPS"])
        else:
            raise FormatError("index has no sequence section")
        fm = FmIndex.from_parts(seq, secs[b"FMIX"]) if b"FMIX" in secs else None
        coll = Collection.from_parts(seq, secs[b"COLL"]) if b"COLL" in secs else None
        kind, mode, alphabet = meta.pop("kind"), meta.pop("mode"), meta.pop("alphabet", [])
        meta.pop("structure", None)
        return cls(kind, mode, seq, fm, coll, alphabet, meta)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "Index":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())
