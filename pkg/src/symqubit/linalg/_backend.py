"""Selects the compiled Jacobi kernel when available, else the numpy fallback."""

import os

from . import _jacobi_py

if os.environ.get("SYMQUBIT_PURE_PYTHON"):
    _ext = None
else:
    try:
        from . import _jacobi_ext as _ext
    except ImportError:  # extension not built
        _ext = None

BACKEND = "cython" if _ext is not None else "python"
KERNELS = {"python": _jacobi_py.jacobi_batch}
if _ext is not None:
    KERNELS["cython"] = _ext.jacobi_batch


def jacobi_batch(a, tol_rel, max_sweeps, want_vectors, backend=None):
    return KERNELS[backend or BACKEND](a, tol_rel, max_sweeps, want_vectors)
