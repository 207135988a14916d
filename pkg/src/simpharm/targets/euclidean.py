"""Euclidean space and flat tori ``R^n / Z^n``."""
from __future__ import annotations

import math

import numpy as np

from .._kernels import EUCLID
from .base import DeckAction, GeodesicTarget, TargetError


class Euclidean(GeodesicTarget):
    """Flat ``R^n`` with the trivial deck group."""

    kind = EUCLID

    def __init__(self, n: int = 2):
        n = int(n)
        if n < 1:
            raise TargetError("euclidean dimension must be >= 1")
        self.dim = self.ambient_dim = n
        self.name = f"euclidean({n})"

    def distance(self, p, q) -> float:
        return float(np.linalg.norm(np.asarray(q, float) - np.asarray(p, float)))

    def distances(self, P, Q) -> np.ndarray:
        D = np.asarray(Q, float) - np.asarray(P, float)
        return np.sqrt(np.einsum("ij,ij->i", D, D))

    def geodesic_eval(self, p, q, t: float) -> np.ndarray:
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        if t == 1:
            return q.copy()
        return p + t * (q - p)

    def log(self, p, q) -> np.ndarray:
        return np.asarray(q, float) - np.asarray(p, float)

    def exp(self, p, v) -> np.ndarray:
        return np.asarray(p, float) + np.asarray(v, float)

    def exp_many(self, P, V):
        V = np.asarray(V, float)
        return P + V, V.copy()

    def tangent_basis(self, p) -> np.ndarray:
        return np.eye(self.dim)

    def random_point(self, rng, scale: float = 1.0) -> np.ndarray:
        return scale * rng.standard_normal(self.dim)

    def curvature_upper_bound(self) -> float:
        return 0.0

    def spec(self) -> dict:
        return {"type": "euclidean", "dim": self.dim}


class FlatTorus(Euclidean):
    """``R^n / Z^n``; deck elements are integer translation vectors.

    Points are stored as lifts in ``R^n``.  An edge with deck ``g`` joins the
    tail lift ``p`` to the translated head lift ``q + g``.
    """

    has_decks = True

    def __init__(self, n: int = 2):
        super().__init__(n)
        self.name = f"flat_torus({self.dim})"

    def deck_identity(self):
        return (0,) * self.dim

    def deck_normalize(self, g):
        if g is None or g == "id":
            return self.deck_identity()
        try:
            arr = np.asarray(g)
            if arr.shape != (self.dim,):
                raise ValueError
            vals = tuple(int(x) for x in arr)
            if not np.array_equal(np.asarray(vals, dtype=float), arr.astype(float)):
                raise ValueError
        except (TypeError, ValueError):
            raise TargetError(f"{self.name}: deck element must be {self.dim} integers, got {g!r}")
        return vals

    def deck_compose(self, g, h):
        g, h = self.deck_normalize(g), self.deck_normalize(h)
        return tuple(a + b for a, b in zip(g, h))

    def deck_inverse(self, g):
        return tuple(-a for a in self.deck_normalize(g))

    def deck_apply(self, g, p) -> np.ndarray:
        return np.asarray(p, float) + np.asarray(self.deck_normalize(g), float)

    def deck_is_identity(self, g, tol: float = 1e-9) -> bool:
        return not any(self.deck_normalize(g))

    def deck_to_json(self, g):
        g = self.deck_normalize(g)
        return "id" if not any(g) else list(g)

    def deck_action(self, decks) -> DeckAction:
        t = np.array([self.deck_normalize(g) for g in decks], dtype=float).reshape(-1, self.dim)
        return DeckAction(t=t)

    def deck_key(self, g):
        return self.deck_normalize(g)

    def reduce(self, p):
        """Translation taking ``p`` into the unit cube ``[0, 1)^n``, and the moved point."""
        h = tuple(int(-math.floor(x)) for x in np.asarray(p, float))
        return h, self.deck_apply(h, p)

    def spec(self) -> dict:
        return {"type": "flat_torus", "dim": self.dim}
