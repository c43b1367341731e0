"""Kernel backend selection.

The compiled (numba) backend is the default; set GVFSIM_BACKEND=numpy to force
the pure-numpy twin, or GVFSIM_BACKEND=numba to insist on compilation.  Both
backends implement the same `integrate` / `eval_rhs` pair over identical
argument tuples.
"""
from __future__ import annotations

import importlib
import os

ENV_VAR = "GVFSIM_BACKEND"
_BACKENDS = ("numba", "numpy")
_modules: dict[str, object] = {}


def numba_available() -> bool:
    try:
        importlib.import_module("numba")
        return True
    except ImportError:
        return False


def resolve_backend(name: str | None = None) -> str:
    """Pick the backend: explicit argument beats the env flag beats the default."""
    if name is None:
        name = os.environ.get(ENV_VAR, "").strip().lower() or None
    if name is None:
        return "numba" if numba_available() else "numpy"
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose one of {_BACKENDS}")
    if name == "numba" and not numba_available():
        raise ValueError("numba backend requested but numba is not importable")
    return name


def kernels(name: str | None = None):
    """Return the kernel module for the resolved backend."""
    resolved = resolve_backend(name)
    if resolved not in _modules:
        module = "gvfsim._kernels_nb" if resolved == "numba" else "gvfsim._kernels_np"
        _modules[resolved] = importlib.import_module(module)
    return _modules[resolved]
