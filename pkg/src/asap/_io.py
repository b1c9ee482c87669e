"""Little-endian framing shared by every serializable structure.

A structure is framed as ``tag:u8 | u | nsec`` followed by ``nsec``
sections, each ``length | bytes``.  ``u``, ``nsec`` and lengths are
LEB128 varints; parameter sections hold zigzag varints.  Bulk arrays are
fixed-width little-endian.
"""

import numpy as np

from .errors import FormatError

TAG_PLAIN = 0x01
TAG_SPARSE = 0x02
TAG_RUNBV = 0x03
TAG_INTVEC = 0x04
TAG_WM = 0x10
TAG_SYMMAP = 0x20
TAG_APS = 0x30
TAG_RLS = 0x40
TAG_RAPS = 0x41
TAG_FM = 0x50
TAG_COLL = 0x60


def varint(x: int) -> bytes:
    if x < 0:
        raise ValueError("varints are unsigned")
    out = bytearray()
    while True:
        low = x & 0x7F
        x >>= 7
        if x:
            out.append(low | 0x80)
        else:
            out.append(low)
            return bytes(out)


def read_varint(buf, pos: int) -> tuple[int, int]:
    """Return ``(value, next position)``."""
    x = shift = 0
    while True:
        if pos >= len(buf):
            raise FormatError("truncated varint")
        b = buf[pos]
        pos += 1
        x |= (b & 0x7F) << shift
        if not b & 0x80:
            return x, pos
        shift += 7
        if shift > 70:
            raise FormatError("varint too long")


def pack(tag, u, sections):
    out = [bytes([tag]), varint(u), varint(len(sections))]
    for sec in sections:
        out.append(varint(len(sec)))
        out.append(sec)
    return b"".join(out)


def unpack(buf, offset=0, expect=None):
    """Return ``(tag, u, sections, end_offset)``."""
    if offset >= len(buf):
        raise FormatError("truncated structure header")
    tag = buf[offset]
    if expect is not None and tag != expect:
        raise FormatError(f"expected structure tag {expect:#x}, found {tag:#x}")
    u, pos = read_varint(buf, offset + 1)
    nsec, pos = read_varint(buf, pos)
    sections = []
    for _ in range(nsec):
        length, pos = read_varint(buf, pos)
        if pos + length > len(buf):
            raise FormatError("truncated section body")
        sections.append(bytes(buf[pos : pos + length]))
        pos += length
    return tag, u, sections, pos


def ints(*values):
    return b"".join(varint((v << 1) if v >= 0 else ((-v << 1) - 1)) for v in map(int, values))


def read_ints(sec):
    out, pos = [], 0
    while pos < len(sec):
        z, pos = read_varint(sec, pos)
        out.append(-((z + 1) >> 1) if z & 1 else z >> 1)
    return tuple(out)


def array(a, dtype):
    return np.ascontiguousarray(a, dtype=np.dtype(dtype).newbyteorder("<")).tobytes()


def read_array(sec, dtype):
    dt = np.dtype(dtype).newbyteorder("<")
    if len(sec) % dt.itemsize:
        raise FormatError("array section length not a multiple of item size")
    return np.frombuffer(sec, dtype=dt).astype(np.dtype(dtype))
