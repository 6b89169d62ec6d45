"""numba dispatch.

Set ``STRATVAR_DISABLE_NUMBA=1`` (or run without numba installed) to use the
pure-numpy kernels.  The flag is read on every call, so it can be flipped at
runtime.
"""

import os

DISABLE_ENV = "STRATVAR_DISABLE_NUMBA"

try:
    import numba

    has_numba = True
except ImportError:  # pragma: no cover
    numba = None
    has_numba = False


def numba_enabled():
    flag = os.environ.get(DISABLE_ENV, "").strip().lower()
    return has_numba and flag in ("", "0", "false", "no")


def try_njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity otherwise."""
    if not has_numba:
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn
    return numba.njit(*args, **kwargs)
