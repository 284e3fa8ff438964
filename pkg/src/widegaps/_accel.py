"""Numba switch.

Hot kernels are written once in numba-compatible Python and compiled with
``njit`` when numba is importable and ``WIDEGAPS_DISABLE_NUMBA`` is unset (or
``0``). Otherwise the dispatchers in :mod:`widegaps._kernels` route to the
vectorised numpy implementations.
"""
import os

_flag = os.environ.get("WIDEGAPS_DISABLE_NUMBA", "0").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    import numba  # noqa: F401
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False
    _njit = None

USE_NUMBA = HAS_NUMBA and not _disabled


def njit(*args, **kwargs):
    """``numba.njit`` with caching, or identity when numba is missing."""
    kwargs.setdefault("cache", True)
    if _njit is None:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return _njit(*args, **kwargs)


def backend():
    return "numba" if USE_NUMBA else "numpy"
