"""Per-edge numerical kernels with a compiled backend and a numpy fallback.

The compiled extension ``_core`` is used when it imports; otherwise, or when
the environment variable ``SIMPHARM_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the numpy versions in ``_fallback`` are used.
"""
from __future__ import annotations

import importlib
import os

from . import _fallback
from ._fallback import EUCLID, HYPERBOLOID

_force_pure = os.environ.get("SIMPHARM_PURE_PYTHON", "") not in ("", "0")

_core = None
if not _force_pure:
    try:
        _core = importlib.import_module(__name__ + "._core")
    except ImportError:
        _core = None

backend = _core if _core is not None else _fallback
BACKEND_NAME = "cython" if _core is not None else "numpy"

edge_lengths = backend.edge_lengths
energy_grad = backend.energy_grad
energy_delta = backend.energy_delta
scatter_add = backend.scatter_add


def backends():
    """Mapping of available backend names to kernel modules."""
    out = {"numpy": _fallback}
    if _core is not None:
        out["cython"] = _core
    return out


__all__ = [
    "EUCLID",
    "HYPERBOLOID",
    "BACKEND_NAME",
    "backends",
    "edge_lengths",
    "energy_grad",
    "energy_delta",
    "scatter_add",
]
