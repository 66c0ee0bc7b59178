"""Kernel backend selection.

Hot inner loops are written in a numba-compilable subset of Python over
numpy arrays.  By default they run jitted when numba is importable; the
environment variable ``SMCKIT_BACKEND=python`` forces the interpreted
pure-numpy path (``SMCKIT_BACKEND=numba`` forces compilation and fails
loudly if numba is missing).  Both paths execute the same source, so
verdicts and conflict counts are identical by construction.
"""

from __future__ import annotations

import os


def _pick_backend() -> str:
    forced = os.environ.get("SMCKIT_BACKEND", "").strip().lower()
    if forced in ("python", "numpy"):
        return "python"
    if forced in ("numba", "jit"):
        import numba  # noqa: F401  - fail loudly when forced
        return "numba"
    try:
        import numba  # noqa: F401
        return "numba"
    except ImportError:
        return "python"


BACKEND = _pick_backend()


def jit_compile(fn):
    """Compile a kernel with numba (independent of the active backend)."""
    from numba import njit

    return njit(cache=True)(fn)
