"""Backend-dispatched kernel namespace (see ``asap._accel``)."""

from ._accel import BACKEND

if BACKEND == "numba":
    from ._kernels_numba import (  # noqa: F401
        bv_access,
        bv_rank1,
        bv_select0,
        bv_select1,
        ef_access,
        ef_rank1,
        ef_select1,
        ens_access,
        ens_intersect,
        ens_rank,
        ens_select,
        ens_snippet,
        iv_get,
        wm_access,
        wm_rank,
        wm_select,
    )
else:
    from ._kernels_numpy import (  # noqa: F401
        bv_access,
        bv_rank1,
        bv_select0,
        bv_select1,
        ef_access,
        ef_rank1,
        ef_select1,
        ens_access,
        ens_intersect,
        ens_rank,
        ens_select,
        ens_snippet,
        iv_get,
        wm_access,
        wm_rank,
        wm_select,
    )

__all__ = [
    "BACKEND",
    "bv_access",
    "bv_rank1",
    "bv_select0",
    "bv_select1",
    "ef_access",
    "ef_rank1",
    "ef_select1",
    "ens_access",
    "ens_intersect",
    "ens_rank",
    "ens_select",
    "ens_snippet",
    "iv_get",
    "wm_access",
    "wm_rank",
    "wm_select",
]
