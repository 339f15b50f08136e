"""Backend selection for the compiled kernels.

Set ``PARAGEO_DISABLE_NUMBA=1`` to force the pure-numpy code paths (useful for
debugging and for machines without a working LLVM).
"""
import os

_FLAG = os.environ.get("PARAGEO_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(*args, **kwargs):
    """``numba.njit`` when numba is usable, otherwise a no-op decorator."""
    if numba is None:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
