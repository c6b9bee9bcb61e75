"""Hot kernels: direct volume-operator application on the lattice.

The Nystrom application of the scattering volume operator is a dense
correlation between target points and weighted source points through a
translation-invariant kernel table.  That O(targets * sources) loop
dominates every solve, so it is compiled with numba; a pure-numpy
gather fallback implements the identical contraction and is selected by
setting the environment variable ``BSLAB_NO_NUMBA`` to a truthy value
(or automatically when numba is unavailable).

Both paths consume the same flattened layout: ``table_flat`` is the
raveled (S, S, S) kernel table with S = 2n - 1, and each point carries a
precomputed flat base index so the kernel entry for a (target, source)
pair sits at ``tgt_base[i] - src_base[j]``.
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("BSLAB_NO_NUMBA", "").strip().lower()
NUMBA_REQUESTED = _env not in ("1", "true", "yes", "on")

if NUMBA_REQUESTED:
    try:
        import numba

        @numba.njit(
            "complex128[:](complex128[:], int64[:], int64[:], complex128[:])",
            parallel=True, fastmath=True, cache=True)
        def _gather_apply_njit(table_flat, tgt_base, src_base, src_vals):
            n_t = tgt_base.shape[0]
            n_s = src_base.shape[0]
            out = np.empty(n_t, dtype=np.complex128)
            for i in numba.prange(n_t):
                base = tgt_base[i]
                acc = 0.0 + 0.0j
                for j in range(n_s):
                    acc += table_flat[base - src_base[j]] * src_vals[j]
                out[i] = acc
            return out

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - mirror-less environments
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

USE_NUMBA = NUMBA_REQUESTED and HAVE_NUMBA

_NUMPY_CHUNK = 256


def gather_apply_numpy(table_flat, tgt_base, src_base, src_vals):
    """Reference contraction: chunked fancy-gather plus matvec."""
    out = np.empty(tgt_base.shape[0], dtype=np.complex128)
    for lo in range(0, tgt_base.shape[0], _NUMPY_CHUNK):
        hi = min(lo + _NUMPY_CHUNK, tgt_base.shape[0])
        idx = tgt_base[lo:hi, None] - src_base[None, :]
        out[lo:hi] = table_flat[idx] @ src_vals
    return out


def gather_apply(table_flat, tgt_base, src_base, src_vals):
    """Dispatch to the compiled kernel or the numpy fallback."""
    if USE_NUMBA:
        return _gather_apply_njit(table_flat, tgt_base, src_base, src_vals)
    return gather_apply_numpy(table_flat, tgt_base, src_base, src_vals)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
