"""Simplicial metrics and quasi-metrics: validation, areas and edge weights."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complex import DeltaComplex


class MetricError(ValueError):
    """Raised for negative, non-finite or mis-sized edge lengths."""


@dataclass(frozen=True, eq=False)
class SimplicialMetric:
    """Nonnegative per-edge lengths in edge-id order."""

    lengths: np.ndarray

    def __post_init__(self):
        arr = np.array(self.lengths, dtype=float, copy=True).reshape(-1)
        if not np.isfinite(arr).all():
            raise MetricError("edge lengths must be finite")
        if (arr < 0).any():
            raise MetricError(f"negative edge length at edge {int(np.flatnonzero(arr < 0)[0])}")
        arr.setflags(write=False)
        object.__setattr__(self, "lengths", arr)

    @property
    def quasi(self) -> bool:
        return bool((self.lengths == 0).any())

    def __len__(self) -> int:
        return self.lengths.size

    def to_json(self) -> dict:
        return {"lengths": [float(x) for x in self.lengths]}

    @classmethod
    def from_json(cls, data: dict) -> "SimplicialMetric":
        try:
            return cls(np.asarray(data["lengths"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            raise MetricError(f"malformed metric document: {exc}") from exc


def as_lengths(l) -> np.ndarray:
    if isinstance(l, SimplicialMetric):
        return l.lengths
    return SimplicialMetric(l).lengths


@dataclass(frozen=True)
class MetricReport:
    """Faces whose polygon inequality fails; ``excess`` is by how much."""

    violations: tuple[int, ...] = ()
    excess: tuple[float, ...] = ()
    quasi: bool = False

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "quasi": self.quasi,
            "violations": [
                {"face": f, "excess": e} for f, e in zip(self.violations, self.excess)
            ],
        }


def _check_size(K: DeltaComplex, lengths: np.ndarray):
    if lengths.size != K.n_edges:
        raise MetricError(f"expected {K.n_edges} lengths, got {lengths.size}")


def validate_metric(K: DeltaComplex, l) -> MetricReport:
    """Check every face's polygon inequality with zero tolerance.

    Each side must be no longer than the sum of the remaining sides of its
    face; equality is accepted.
    """
    lengths = as_lengths(l)
    _check_size(K, lengths)
    bad, excess = [], []
    for f, cyc in enumerate(K.faces):
        side = lengths[[e for e, _ in cyc]]
        # compare the longest side against the rest without a subtraction
        k = int(np.argmax(side))
        rest = math.fsum(np.delete(side, k))
        if side[k] > rest:
            bad.append(f)
            excess.append(float(side[k] - rest))
    return MetricReport(tuple(bad), tuple(excess), bool((lengths == 0).any()))


def face_areas_simplicial(K: DeltaComplex, lengths: np.ndarray) -> np.ndarray:
    a, b = K.corners
    prods = lengths[a] * lengths[b]
    out = np.zeros(K.n_faces)
    np.add.at(out, np.repeat(np.arange(K.n_faces), K.arities), prods)
    return out


def simplicial_area(K: DeltaComplex, l) -> float:
    """Sum over faces of the products of cyclically adjacent side lengths."""
    lengths = as_lengths(l)
    _check_size(K, lengths)
    a, b = K.corners
    return float(np.sum(lengths[a] * lengths[b]))


def heron(a: float, b: float, c: float) -> float:
    """Area of a Euclidean triangle with the given sides (0 if degenerate)."""
    a, b, c = sorted((float(a), float(b), float(c)), reverse=True)
    # numerically stable arrangement for needle-like triangles
    q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * math.sqrt(q) if q > 0 else 0.0


def euclidean_area(K: DeltaComplex, l) -> float:
    """Sum of Heron areas of the Euclidean triangles with the given sides."""
    if not K.is_triangulation():
        raise MetricError("euclidean_area needs a triangulation")
    lengths = as_lengths(l)
    _check_size(K, lengths)
    return math.fsum(heron(*lengths[[e for e, _ in cyc]]) for cyc in K.faces)


def neighbor_sums(K: DeltaComplex, lengths: np.ndarray) -> np.ndarray:
    """Per edge, the sum of in-face neighbour lengths over every face slot."""
    idx, nb = K.neighbor_length_index
    out = np.zeros(K.n_edges)
    np.add.at(out, idx, lengths[nb])
    return out


def edge_weights(K: DeltaComplex, l) -> np.ndarray:
    """Weights ``w_i = (sum of in-face neighbour lengths) / (2 l_i)``.

    Zero-length edges have no weight; they are reported as ``nan`` and the
    energy code treats them through the stretch-factor conventions.
    """
    lengths = as_lengths(l)
    _check_size(K, lengths)
    num = neighbor_sums(K, lengths)
    w = np.full(K.n_edges, np.nan)
    pos = lengths > 0
    w[pos] = num[pos] / (2.0 * lengths[pos])
    return w


def scale_metric(l, lam: float) -> SimplicialMetric:
    if not (lam > 0 and math.isfinite(lam)):
        raise MetricError("scale factor must be a positive finite number")
    return SimplicialMetric(as_lengths(l) * float(lam))


def induced_quasimetric(K: DeltaComplex, f, check_tol: float = 1e-9) -> SimplicialMetric:
    """Domain metric that gives every edge the length of its image.

    Geodesic images always satisfy the triangle inequality, so a violation
    larger than ``check_tol`` signals a bug in the target's distance function.
    Violations within roundoff are left in place: the lengths are the image
    lengths exactly.
    """
    lengths = np.asarray(f.edge_lengths(), dtype=float)
    _check_size(K, lengths)
    metric = SimplicialMetric(lengths)
    report = validate_metric(K, metric)
    if report.excess and max(report.excess) > check_tol * max(1.0, float(lengths.max())):
        raise AssertionError(
            f"image lengths violate the triangle inequality on face {report.violations[0]}"
        )
    return metric

