"""Entropy kernels: numba-accelerated with a pure-numpy fallback.

The JIT path is used when numba imports cleanly; set SECTROPY_NO_NUMBA=1
to force the numpy fallback.  Both paths agree to ~1e-13 (they reduce the
256 histogram terms in different orders), and either satisfies the 1e-9
oracle tolerance.  `entropy_blocks` is the path actually in use.
"""

from __future__ import annotations

import os

import numpy as np


def entropy_blocks_numpy(data: np.ndarray, chunk_size: int, n_chunks: int) -> np.ndarray:
    """Entropy of the first `n_chunks` consecutive chunks of `data`.

    `data` is a 1-D uint8 array; the last chunk may be short.  Returns a
    float64 array of bits-per-byte values in [0, 8].
    """
    out = np.empty(n_chunks, dtype=np.float64)
    n = data.size
    for c in range(n_chunks):
        lo = c * chunk_size
        hi = min(lo + chunk_size, n)
        counts = np.bincount(data[lo:hi], minlength=256)
        p = counts[counts > 0] / (hi - lo)
        # + 0.0 folds the -0.0 a negated zero sum produces back to +0.0
        out[c] = -np.sum(p * np.log2(p)) + 0.0
    return out


def _entropy_blocks_jit(data, chunk_size, n_chunks):  # pragma: no cover - numba source
    out = np.empty(n_chunks, dtype=np.float64)
    n = data.size
    for c in range(n_chunks):
        lo = c * chunk_size
        hi = lo + chunk_size
        if hi > n:
            hi = n
        counts = np.zeros(256, dtype=np.int64)
        for i in range(lo, hi):
            counts[data[i]] += 1
        total = float(hi - lo)
        h = 0.0
        for k in range(256):
            if counts[k] > 0:
                p = counts[k] / total
                h -= p * np.log2(p)
        out[c] = h
    return out


entropy_blocks_numba = None

if not os.environ.get("SECTROPY_NO_NUMBA"):
    try:
        import numba

        entropy_blocks_numba = numba.njit(cache=True, nogil=True)(_entropy_blocks_jit)
    except ImportError:
        pass

if entropy_blocks_numba is not None:
    entropy_blocks = entropy_blocks_numba
    BACKEND = "numba"
else:
    entropy_blocks = entropy_blocks_numpy
    BACKEND = "numpy"
