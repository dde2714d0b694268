"""Kernel backend selection.

The hot numerical loops in _kernels.py are compiled with numba by default.
Setting the environment variable ARPSWEEP_BACKEND=numpy before import picks
the pure-numpy/Python path instead (same source, no compilation); any other
value, or an absent numba, also falls back with a warning.  The choice is
made once at import time.
"""
import os
import warnings

_requested = os.environ.get("ARPSWEEP_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    warnings.warn(
        f"ARPSWEEP_BACKEND={_requested!r} not recognized, using 'numba'",
        stacklevel=2)
    _requested = "numba"

USING_NUMBA = False
if _requested == "numba":
    try:
        from numba import njit as _njit
    except ImportError:
        warnings.warn("numba not importable, falling back to the numpy backend",
                      stacklevel=2)
    else:
        USING_NUMBA = True

BACKEND = "numba" if USING_NUMBA else "numpy"


def jit_kernel(func):
    """Compile func in nopython mode, or return it untouched on the numpy path."""
    if USING_NUMBA:
        return _njit(cache=True, nogil=True)(func)
    return func
