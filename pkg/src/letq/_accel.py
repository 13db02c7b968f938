"""Backend selection for the hot kernels.

``LETQ_BACKEND=numpy`` forces the pure-numpy path even when numba is
importable; ``LETQ_BACKEND=numba`` (the default) uses numba when available.
"""
from __future__ import annotations

import os

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap


def _initial_backend() -> str:
    requested = os.environ.get("LETQ_BACKEND", "numba").strip().lower()
    if requested not in ("numba", "numpy"):
        raise ValueError(f"LETQ_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numba" and not HAVE_NUMBA:
        return "numpy"
    return requested


BACKEND = _initial_backend()


def set_backend(name: str) -> str:
    """Switch the kernel backend at runtime; returns the previous one."""
    global BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    previous, BACKEND = BACKEND, name
    return previous


def get_backend() -> str:
    return BACKEND
