"""Kernel backend selection.

The hot loops (walk generation, embedding training) exist twice: a compiled
Cython extension (`_native`) and a NumPy fallback (`purepy`). The native
module is preferred when importable; set STANCENET_PURE_PYTHON=1 to force the
fallback. Walk output is draw-for-draw identical across backends.
"""

from __future__ import annotations

import importlib
import os

from . import purepy

_native = None
if not os.environ.get("STANCENET_PURE_PYTHON"):
    try:
        _native = importlib.import_module("._native", __name__)
    except ImportError:
        _native = None

HAVE_NATIVE = _native is not None


def get_kernels(name: str | None = None):
    """Resolve a backend module by name ('native', 'python') or pick the
    default (native when built, fallback otherwise)."""
    if name in (None, "auto"):
        return _native if _native is not None else purepy
    if name == "native":
        if _native is None:
            raise RuntimeError("native kernels are not available in this install")
        return _native
    if name in ("python", "purepy"):
        return purepy
    raise ValueError(f"unknown kernel backend {name!r}")


def backend_name(name: str | None = None) -> str:
    return "native" if get_kernels(name) is _native and _native is not None else "python"
