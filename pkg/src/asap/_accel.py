"""Kernel backend selection.

Setting ``ASAP_DISABLE_NUMBA`` to a non-empty value other than ``0`` (or
running without numba installed) routes every hot kernel to the
vectorized numpy implementation instead of the compiled one.
"""

import os

_flag = os.environ.get("ASAP_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag not in ("", "0", "false", "no")

try:
    if NUMBA_DISABLED:
        raise ImportError
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"
