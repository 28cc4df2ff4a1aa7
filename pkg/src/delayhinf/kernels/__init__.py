"""Integration kernels: the compiled extension when built, else pure Python.

``BACKEND`` names the implementation picked at import time. Setting
``DELAYHINF_PURE_PYTHON=1`` forces the fallback.
"""

import os

import numpy as np

from . import _rk4_py

try:
    if os.environ.get("DELAYHINF_PURE_PYTHON"):
        raise ImportError("pure-Python backend requested")
    from . import _rk4 as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def _prepare(F, g, h, q, w, u_st, rdel_st, pos_st, z0):
    # copies: the compiled kernel takes writable memoryviews, and callers may pass frozen arrays
    return [np.array(a, dtype=float, order="C") for a in (F, g, h, q, w, u_st, rdel_st, pos_st, z0)]


def rk4_delay(F, g, h, q, w, u_st, rdel_st, pos_st, hist_idx, dt, z0, backend=None):
    F, g, h, q, w, u_st, rdel_st, pos_st, z0 = _prepare(F, g, h, q, w, u_st, rdel_st, pos_st, z0)
    backend = backend or BACKEND
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not built")
        return _compiled.rk4_delay(F, g, h, q, w, u_st, rdel_st, pos_st, int(hist_idx), float(dt), z0)
    if backend != "python":
        raise ValueError(f"unknown backend {backend!r}")
    return _rk4_py.rk4_delay(F, g, h, q, w, u_st, rdel_st, pos_st, int(hist_idx), float(dt), z0)
