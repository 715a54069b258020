"""Kernel backend selection.

Hot loops (factorizations, Jacobi sweeps, sparse column updates) exist in
two implementations with identical numerics and identical RNG streams:

* ``spdsubspace._kernels_numba`` -- @njit-compiled loops (default), and
* ``spdsubspace._kernels_numpy`` -- vectorized pure-numpy fallback.

Set ``SPDSUBSPACE_BACKEND=numpy`` to force the fallback (e.g. when numba
is unavailable or while debugging), or ``=numba`` to require numba and
fail loudly if it cannot be imported.  ``benchmarks/bench_backends.py``
compares the two.
"""

from __future__ import annotations

import os

_ENV_VAR = "SPDSUBSPACE_BACKEND"


def _resolve() -> str:
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(
            f"{_ENV_VAR} must be 'numba' or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _resolve()


def get_kernels():
    """Return the active kernel module (import deferred to first use)."""
    if BACKEND == "numba":
        from . import _kernels_numba as impl
    else:
        from . import _kernels_numpy as impl
    return impl
