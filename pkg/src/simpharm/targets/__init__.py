"""Geodesic target spaces.

``make_target`` builds a target from a JSON-style spec such as
``{"type": "hyperbolic", "dim": 2}`` or the shorthand string ``"euclidean(3)"``.
"""
from __future__ import annotations

import re

from .base import (
    DeckAction,
    GeodesicTarget,
    TargetError,
    UnsupportedOperation,
    curvature_description,
    curvature_upper_bound,
)
from .euclidean import Euclidean, FlatTorus
from .genus2 import Genus2Octagon
from .hyperboloid import Hyperbolic, poincare
from .tree import MetricTree

_SHORT = re.compile(r"^\s*(\w+)\s*(?:\(\s*(\d*)\s*\))?\s*$")
_DIM_TYPES = {"euclidean": Euclidean, "hyperbolic": Hyperbolic, "flat_torus": FlatTorus}


def make_target(spec) -> GeodesicTarget:
    """Build a target from a dict spec or a short string like ``"flat_torus(2)"``."""
    if isinstance(spec, GeodesicTarget):
        return spec
    if isinstance(spec, str):
        m = _SHORT.match(spec)
        if not m:
            raise TargetError(f"malformed target spec {spec!r}")
        spec = {"type": m.group(1)}
        if m.group(2):
            spec["dim"] = int(m.group(2))
    if not isinstance(spec, dict) or "type" not in spec:
        raise TargetError(f"malformed target spec {spec!r}")
    kind = spec["type"]
    try:
        if kind in _DIM_TYPES:
            return _DIM_TYPES[kind](int(spec.get("dim", 2)))
        if kind == "genus2_octagon":
            return Genus2Octagon()
        if kind == "metric_tree":
            return MetricTree(spec["edges"], spec["lengths"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TargetError):
            raise
        raise TargetError(f"malformed {kind} spec: {exc}") from exc
    raise TargetError(f"unknown target type {kind!r}")


__all__ = [
    "DeckAction",
    "Euclidean",
    "FlatTorus",
    "GeodesicTarget",
    "Genus2Octagon",
    "Hyperbolic",
    "MetricTree",
    "TargetError",
    "UnsupportedOperation",
    "curvature_description",
    "curvature_upper_bound",
    "make_target",
    "poincare",
]
