"""JSON documents and OBJ export.

A *bundle* is one JSON object that may hold any of the keys ``complex``,
``metric``, ``target``, ``map`` and ``fixed``.  Each single-purpose document
(a complex, a metric, ...) is also accepted on its own.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .complex import ComplexError, DeltaComplex
from .metric import MetricError, SimplicialMetric
from .smap import MapError, SimplicialMap
from .targets import GeodesicTarget, MetricTree, TargetError, make_target, poincare


class InputError(ValueError):
    """Raised for unreadable or malformed input documents."""


def read_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"{path}: no such file") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "infinite" if obj > 0 else ("-infinite" if obj < 0 else None)
    return obj


def dumps(doc) -> str:
    """Deterministic JSON text (non-finite floats become strings)."""
    return json.dumps(_clean(doc), indent=2) + "\n"


def write_json(path, doc) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


@dataclass
class Bundle:
    complex: DeltaComplex | None = None
    metric: SimplicialMetric | None = None
    target: GeodesicTarget | None = None
    map: SimplicialMap | None = None
    fixed: list[int] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise InputError(f"missing input: {', '.join(missing)}")

    def to_json(self) -> dict:
        out: dict = {}
        if self.complex is not None:
            out["complex"] = self.complex.to_json()
        if self.metric is not None:
            out["metric"] = self.metric.to_json()
        if self.target is not None:
            out["target"] = self.target.spec()
        if self.map is not None:
            out["map"] = self.map.to_json()
        if self.fixed:
            out["fixed"] = [int(v) for v in self.fixed]
        out.update(self.extra)
        return out


def _section(doc: dict, key: str, marker: str):
    """``doc[key]`` for bundles, or ``doc`` itself when it is a bare document."""
    if key in doc:
        return doc[key]
    if marker in doc:
        return doc
    return None


def load_bundle(bundle=None, complex=None, metric=None, target=None, map=None, fixed=None) -> Bundle:
    """Assemble inputs from a bundle path and/or single-purpose paths.

    Explicit paths override the corresponding bundle sections.  ``target``
    may also be a short spec string such as ``"hyperbolic(2)"``.
    """
    docs: dict = {}
    if bundle is not None:
        base = read_json(bundle)
        if not isinstance(base, dict):
            raise InputError(f"{bundle}: expected a JSON object")
        docs.update(base)
    for key, path, marker in (("complex", complex, "edges"), ("metric", metric, "lengths"),
                              ("map", map, "vertex_images")):
        if path is not None:
            doc = read_json(path)
            sec = _section(doc, key, marker) if isinstance(doc, dict) else None
            if sec is None:
                raise InputError(f"{path}: no {key} document found")
            docs[key] = sec
            if key == "map" and isinstance(doc, dict) and "target" in doc and target is None:
                docs.setdefault("target", doc["target"])
    if target is not None:
        p = Path(str(target))
        docs["target"] = read_json(p) if p.suffix == ".json" else str(target)
        if isinstance(docs["target"], dict) and "target" in docs["target"]:
            docs["target"] = docs["target"]["target"]
    out = Bundle()
    try:
        if "complex" in docs:
            out.complex = DeltaComplex.from_json(docs["complex"])
        if "metric" in docs:
            out.metric = SimplicialMetric.from_json(docs["metric"])
            if out.complex is not None and len(out.metric) != out.complex.n_edges:
                raise InputError("metric length count does not match the complex")
        if "target" in docs:
            out.target = make_target(docs["target"])
        if "map" in docs:
            if out.complex is None or out.target is None:
                raise InputError("a map needs a complex and a target")
            out.map = SimplicialMap.from_json(out.complex, out.target, docs["map"])
        fx = docs.get("fixed", [])
        if fixed is not None:
            fx = fixed
        out.fixed = sorted(set(int(v) for v in fx))
    except (ComplexError, MetricError, TargetError, MapError, KeyError, TypeError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from exc
    out.extra = {k: v for k, v in docs.items() if k not in ("complex", "metric", "target", "map", "fixed")}
    return out


# -- OBJ export --------------------------------------------------------------------------


def obj_coordinates(f: SimplicialMap) -> np.ndarray:
    """3-D coordinates written for each vertex image.

    Euclidean and flat-torus images are used directly (padded with zeros),
    hyperboloid images are projected to the Poincare disk or ball.
    """
    T = f.target
    if isinstance(T, MetricTree):
        raise InputError("OBJ export needs a manifold target")
    X = np.array(f.images, dtype=float)
    if T.kind == 1:
        X = np.array([poincare(p) for p in X])
    if X.shape[1] > 3:
        raise InputError("OBJ export supports targets of dimension at most 3")
    out = np.zeros((X.shape[0], 3))
    out[:, : X.shape[1]] = X
    return out


def obj_triangles(K: DeltaComplex) -> list[tuple[int, int, int]]:
    """Faces as triangles, polygons fanned from their preferred vertex."""
    tris = []
    for face in range(K.n_faces):
        verts = K.face_vertices[face]
        n = len(verts)
        k0 = K.preferred_position(face)
        for j in range(1, n - 1):
            tris.append((verts[k0], verts[(k0 + j) % n], verts[(k0 + j + 1) % n]))
    return tris


def export_obj(f: SimplicialMap) -> str:
    """Wavefront OBJ text with ``v`` and ``f`` records only."""
    lines = [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in obj_coordinates(f)]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in obj_triangles(f.complex)]
    return "\n".join(lines) + "\n"


def read_obj_counts(text: str) -> tuple[int, int]:
    """``(vertex records, face records)`` of OBJ text."""
    nv = nf = 0
    for line in text.splitlines():
        if line.startswith("v "):
            nv += 1
        elif line.startswith("f "):
            nf += 1
    return nv, nf


__all__ = [
    "Bundle",
    "InputError",
    "dumps",
    "export_obj",
    "load_bundle",
    "obj_coordinates",
    "obj_triangles",
    "read_json",
    "read_obj_counts",
    "write_json",
]
