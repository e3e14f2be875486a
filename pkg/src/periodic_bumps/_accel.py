"""Numba switch.

Hot kernels are compiled with numba when it is importable and the environment
variable ``PERIODIC_BUMPS_DISABLE_NUMBA`` is unset (or set to ``0``). Otherwise
the vectorised numpy implementations are used.
"""

import os

try:
    from numba import njit as _njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is an optional extra
    NUMBA_AVAILABLE = False
    _njit = None

_flag = os.environ.get("PERIODIC_BUMPS_DISABLE_NUMBA", "0").strip().lower()
USE_NUMBA = NUMBA_AVAILABLE and _flag in ("", "0", "false", "no")


def njit(func):
    """Compile ``func`` in nopython mode, or return it unchanged without numba."""
    if NUMBA_AVAILABLE:
        return _njit(cache=True)(func)
    return func
