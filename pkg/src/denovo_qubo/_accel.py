"""Numba switch.

Set ``DENOVO_QUBO_DISABLE_JIT=1`` to run every kernel through its pure
numpy fallback. The flag is read once, at import.
"""
import os

_DISABLED = os.environ.get("DENOVO_QUBO_DISABLE_JIT", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised with the env flag
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


USE_JIT = HAVE_NUMBA

__all__ = ["HAVE_NUMBA", "USE_JIT", "njit"]
