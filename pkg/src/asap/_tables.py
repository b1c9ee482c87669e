"""Byte-level lookup tables shared by both kernel backends."""

import numpy as np

POP8 = np.array([bin(b).count("1") for b in range(256)], dtype=np.int64)

# SEL8[b, r]: bit offset of the (r+1)-th set bit of byte b, 8 when absent.
SEL8 = np.full((256, 8), 8, dtype=np.int64)
for _b in range(256):
    _r = 0
    for _k in range(8):
        if (_b >> _k) & 1:
            SEL8[_b, _r] = _k
            _r += 1
del _b, _r, _k

BLOCK_BITS = 512
WORDS_PER_BLOCK = BLOCK_BITS // 64
