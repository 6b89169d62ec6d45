"""Urn-sampling kernels.

Randomness is counter based: the uniform for draw ``i`` of trial ``t`` on a
stream ``key`` is splitmix64 applied to ``key + (t * 2**16 + i + 1) * GAMMA``.
Output is therefore a pure function of (key, trial index, draw index), which
makes any partition of the trials over workers give identical results and
lets the numba and numpy kernels agree bit for bit.
"""

import numpy as np

from ._accel import numba_enabled, try_njit

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MAX_DRAWS = 1 << 16

_GAMMA = np.uint64(GAMMA)
_MIX1 = np.uint64(MIX1)
_MIX2 = np.uint64(MIX2)
_STRIDE = np.uint64(MAX_DRAWS)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0


def mix64(z):
    """splitmix64 finaliser on a Python int."""
    z &= MASK
    z = ((z ^ (z >> 30)) * MIX1) & MASK
    z = ((z ^ (z >> 27)) * MIX2) & MASK
    return z ^ (z >> 31)


def stream_key(seed, tag):
    """64-bit key of substream ``tag`` under master ``seed``."""
    return mix64((mix64(seed) + (tag + 1) * GAMMA) & MASK)


@try_njit(cache=True, nogil=True)
def _uniform_nb(key, trial, i):
    z = key + (np.uint64(trial) * _STRIDE + np.uint64(i) + _ONE) * _GAMMA
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return np.float64(z >> _S11) * _INV53


@try_njit(cache=True, nogil=True)
def _urn_counts_nb(key, red, total, n, replace, start, out):
    ukey = np.uint64(key)
    for t in range(out.shape[0]):
        trial = start + t
        r = red
        left = total
        y = 0
        for i in range(n):
            u = _uniform_nb(ukey, trial, i)
            if u * left < r:
                y += 1
                if not replace:
                    r -= 1
            if not replace:
                left -= 1
        out[t] = y


@np.errstate(over="ignore")
def _urn_counts_np(key, red, total, n, replace, start, out):
    trials = np.arange(start, start + out.shape[0], dtype=np.uint64)
    base = np.uint64(key) + trials * _STRIDE * _GAMMA
    r = np.full(out.shape[0], red, dtype=np.int64)
    y = np.zeros(out.shape[0], dtype=np.int64)
    left = total
    for i in range(n):
        z = base + np.uint64(i + 1) * _GAMMA
        z = (z ^ (z >> _S30)) * _MIX1
        z = (z ^ (z >> _S27)) * _MIX2
        z = z ^ (z >> _S31)
        u = (z >> _S11).astype(np.float64) * _INV53
        hit = u * left < r
        y += hit
        if not replace:
            r -= hit
            left -= 1
    out[:] = y


def urn_counts(key, red, total, n, replace, start, stop, out=None, backend=None):
    """Red counts for trials ``start..stop-1`` drawing ``n`` balls from an urn.

    Without replacement the urn is updated after every draw, so the counts
    are exactly hypergeometric; with replacement they are binomial.
    """
    if not 0 <= red <= total or not 1 <= n <= MAX_DRAWS - 1:
        raise ValueError(f"bad urn: red={red}, total={total}, n={n}")
    if not replace and n > total:
        raise ValueError(f"cannot draw {n} of {total} without replacement")
    if out is None:
        out = np.empty(stop - start, dtype=np.int64)
    if backend is None:
        backend = "numba" if numba_enabled() else "numpy"
    if backend == "numba":
        _urn_counts_nb(np.uint64(key), red, total, n, replace, start, out)
    else:
        _urn_counts_np(key, red, total, n, replace, start, out)
    return out
