"""Numba detection.

Set ``DELTAMOD_NO_NUMBA=1`` to force the pure-numpy kernels even when numba
is importable. The flag is read once, at import time.
"""

from __future__ import annotations

import logging
import os

logger = logging.getLogger(__name__)

_DISABLED = os.environ.get("DELTAMOD_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

HAVE_NUMBA = False
if not _DISABLED:
    try:
        import numba

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        logger.warning("numba not importable, falling back to numpy kernels")


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise the identity decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)

    def wrap(func):
        return func

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return wrap


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
