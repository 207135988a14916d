"""Uniform interface for geodesic target spaces and their deck groups."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np


class TargetError(ValueError):
    """Raised for malformed target specs, points or deck elements."""


class UnsupportedOperation(TargetError):
    """Raised when a target lacks an operation (e.g. ``log`` on a tree)."""


@dataclass(frozen=True)
class DeckAction:
    """Vectorised action ``x -> M x + t`` of one deck element per row.

    ``M`` is ``None`` for pure translations and ``t`` is ``None`` for linear
    isometries.  ``pull`` maps a tangent vector at ``g.q`` back to ``q``.
    """

    M: np.ndarray | None = None
    Minv: np.ndarray | None = None
    t: np.ndarray | None = None

    def apply(self, X: np.ndarray) -> np.ndarray:
        Y = X if self.M is None else np.einsum("eij,ej->ei", self.M, X)
        return Y if self.t is None else Y + self.t

    def pull(self, V: np.ndarray) -> np.ndarray:
        return V if self.Minv is None else np.einsum("eij,ej->ei", self.Minv, V)

    def push(self, V: np.ndarray) -> np.ndarray:
        return V if self.M is None else np.einsum("eij,ej->ei", self.M, V)


class GeodesicTarget:
    """A geodesic space with unique geodesics in each homotopy class.

    Subclasses set ``kind`` to a kernel geometry code (or ``None`` when the
    space is not a smooth manifold) and implement the point operations.  The
    default deck group is trivial; the identity is represented by ``None``.
    """

    name = "target"
    kind: int | None = None
    has_decks = False
    # lengths are computed from re-lifted copies of maps when far lifts
    # would cost precision (deck matrices grow exponentially in hyperbolic space)
    far_lifts_lose_precision = False
    supports_log = True
    dim = 0
    ambient_dim = 0

    # -- points --------------------------------------------------------------
    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape != (self.ambient_dim,) or not np.isfinite(p).all():
            raise TargetError(f"{self.name}: bad point {p!r}")
        return p

    def distance(self, p, q) -> float:
        raise NotImplementedError

    def distances(self, P, Q) -> np.ndarray:
        return np.array([self.distance(p, q) for p, q in zip(P, Q)])

    def lifted_distances(self, P, Q, decks, action: DeckAction | None = None) -> np.ndarray:
        """Distances ``d(P[e], g_e . Q[e])`` for deck elements ``decks[e]``."""
        if action is None:
            action = self.deck_action(decks)
        return self.distances(P, action.apply(np.asarray(Q, dtype=float)))

    def geodesic_eval(self, p, q, t: float) -> np.ndarray:
        if t == 0:
            return np.array(p, dtype=float)
        if t == 1:
            return np.array(q, dtype=float)
        return self.exp(p, t * self.log(p, q))

    def log(self, p, q) -> np.ndarray:
        raise UnsupportedOperation(f"{self.name} has no log map")

    def exp(self, p, v) -> np.ndarray:
        raise UnsupportedOperation(f"{self.name} has no exp map")

    def project(self, p) -> np.ndarray:
        return np.asarray(p, dtype=float)

    def project_tangent(self, p, v) -> np.ndarray:
        return np.asarray(v, dtype=float)

    def tangent_basis(self, p) -> np.ndarray:
        """Rows form an orthonormal basis of the tangent space at ``p``."""
        raise UnsupportedOperation(f"{self.name} has no tangent spaces")

    def tangent_norm(self, p, v) -> float:
        return float(np.linalg.norm(v))

    def random_point(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        raise NotImplementedError

    def curvature_upper_bound(self) -> float:
        raise NotImplementedError

    def point_to_json(self, p) -> list:
        return [float(x) for x in np.asarray(p).reshape(-1)]

    def point_from_json(self, data) -> np.ndarray:
        return self.check_point(data)

    # -- vectorised displacements used by the solver ------------------------
    def exp_many(self, P: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(new points, displacement)`` with ``new = P + displacement``.

        The displacement is returned separately so energy changes can be
        computed without cancellation.
        """
        new = np.array([self.exp(p, v) for p, v in zip(P, V)])
        return new, new - P

    # -- deck group ----------------------------------------------------------
    def deck_identity(self) -> Any:
        return None

    def deck_compose(self, g, h):
        """``g`` after ``h``."""
        self._identity_only(g)
        self._identity_only(h)
        return None

    def deck_inverse(self, g):
        self._identity_only(g)
        return None

    def deck_apply(self, g, p) -> np.ndarray:
        self._identity_only(g)
        return np.asarray(p, dtype=float)

    def deck_is_identity(self, g, tol: float = 1e-9) -> bool:
        self._identity_only(g)
        return True

    def deck_normalize(self, g):
        """Canonical in-memory form of a deck element (accepts JSON forms)."""
        if g is None or g == "id" or g == "" or (isinstance(g, (list, tuple)) and len(g) == 0):
            return None
        raise TargetError(f"{self.name} only has the identity deck element")

    def deck_to_json(self, g):
        return "id"

    def deck_from_json(self, data):
        return self.deck_normalize(data)

    def deck_action(self, decks) -> DeckAction:
        return DeckAction()

    def reduce_point(self, p):
        """Deck element moving ``p`` into a fixed fundamental domain."""
        return self.reduce(p)[0]

    def reduce(self, p):
        """``(h, h . p)`` with ``h`` as in :meth:`reduce_point`."""
        return self.deck_identity(), np.array(p, dtype=float)

    def deck_key(self, g):
        """Hashable key used to compare deck elements exactly."""
        return None

    def _identity_only(self, g):
        if g is not None:
            raise TargetError(f"{self.name} only has the identity deck element")

    # -- misc ----------------------------------------------------------------
    def spec(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec()})"


def curvature_upper_bound(target: GeodesicTarget) -> float:
    return target.curvature_upper_bound()


def curvature_description(target: GeodesicTarget) -> str:
    k = target.curvature_upper_bound()
    if k == -math.inf:
        return "CAT(0), no smooth bound"
    return f"sectional curvature <= {k:g}"
