"""Hyperbolic space ``H^n`` (n <= 3) in the hyperboloid model.

Points are ``x = (x0, x1, ..., xn)`` with ``<x, x> = -1`` and ``x0 > 0`` for
the Minkowski form ``<x, y> = -x0*y0 + x1*y1 + ... + xn*yn``.  Every exp is
followed by re-projection onto the quadric.
"""
from __future__ import annotations

import math

import numpy as np

from .._kernels import HYPERBOLOID
from .base import GeodesicTarget, TargetError


def mdot(x, y) -> float:
    return float(-x[0] * y[0] + np.dot(x[1:], y[1:]))


def mdot_rows(X, Y) -> np.ndarray:
    return -X[:, 0] * Y[:, 0] + np.einsum("ij,ij->i", X[:, 1:], Y[:, 1:])


def lift(spatial) -> np.ndarray:
    """Point of the hyperboloid with the given spatial coordinates."""
    s = np.asarray(spatial, dtype=float)
    return np.concatenate([[math.sqrt(1.0 + float(np.dot(s, s)))], s])


def project_rows(X: np.ndarray) -> np.ndarray:
    S = X[:, 1:]
    x0 = np.sqrt(1.0 + np.einsum("ij,ij->i", S, S))
    return np.concatenate([x0[:, None], S], axis=1)


def poincare(x) -> np.ndarray:
    """Poincare-ball coordinates ``x_i / (1 + x0)``."""
    x = np.asarray(x, dtype=float)
    return x[..., 1:] / (1.0 + x[..., :1])


def from_poincare(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    r2 = float(np.dot(y, y))
    if r2 >= 1.0:
        raise TargetError("Poincare point must lie in the open unit ball")
    return np.concatenate([[(1.0 + r2) / (1.0 - r2)], 2.0 * y / (1.0 - r2)])


def boost(phi: float, d: float) -> np.ndarray:
    """Hyperbolic translation of ``H^2`` by ``d`` along direction ``phi``."""
    return rotation(phi) @ _boost_x(d) @ rotation(-phi)


def _boost_x(d: float) -> np.ndarray:
    ch, sh = math.cosh(d), math.sinh(d)
    return np.array([[ch, sh, 0.0], [sh, ch, 0.0], [0.0, 0.0, 1.0]])


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def lorentz_inverse(g: np.ndarray) -> np.ndarray:
    J = np.diag([-1.0] + [1.0] * (g.shape[0] - 1))
    return J @ g.T @ J


class Hyperbolic(GeodesicTarget):
    """Simply connected ``H^n`` with the trivial deck group."""

    kind = HYPERBOLOID

    def __init__(self, n: int = 2):
        n = int(n)
        if not 1 <= n <= 3:
            raise TargetError("hyperbolic dimension must be 1, 2 or 3")
        self.dim = n
        self.ambient_dim = n + 1
        self.name = f"hyperbolic({n})"

    def check_point(self, p) -> np.ndarray:
        p = super().check_point(p)
        if p[0] <= 0 or abs(mdot(p, p) + 1.0) > 1e-8 * max(1.0, p[0] * p[0]):
            raise TargetError(f"{self.name}: point {p!r} is off the hyperboloid")
        return p

    def project(self, p) -> np.ndarray:
        return lift(np.asarray(p, dtype=float)[1:])

    def project_tangent(self, p, v) -> np.ndarray:
        p = np.asarray(p, float)
        v = np.asarray(v, float)
        return v + mdot(p, v) * p

    def tangent_norm(self, p, v) -> float:
        return math.sqrt(max(mdot(v, v), 0.0))

    def distance(self, p, q) -> float:
        d = np.asarray(q, float) - np.asarray(p, float)
        # chord form: |q - p|_L = 2 sinh(d/2), accurate at short range
        return 2.0 * math.asinh(0.5 * math.sqrt(max(mdot(d, d), 0.0)))

    def distances(self, P, Q) -> np.ndarray:
        D = np.asarray(Q, float) - np.asarray(P, float)
        return 2.0 * np.arcsinh(0.5 * np.sqrt(np.maximum(mdot_rows(D, D), 0.0)))

    def log(self, p, q) -> np.ndarray:
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        d = self.distance(p, q)
        u = q + mdot(p, q) * p  # q - cosh(d) p, tangent at p
        n = math.sqrt(max(mdot(u, u), 0.0))
        if n == 0.0 or d == 0.0:
            return np.zeros_like(p)
        return (d / n) * u

    def exp(self, p, v) -> np.ndarray:
        p = np.asarray(p, float)
        v = np.asarray(v, float)
        n = self.tangent_norm(p, v)
        if n == 0.0:
            return p.copy()
        return self.project(math.cosh(n) * p + (math.sinh(n) / n) * v)

    def exp_many(self, P, V):
        P = np.asarray(P, float)
        V = np.asarray(V, float)
        n = np.sqrt(np.maximum(mdot_rows(V, V), 0.0))
        # cosh(n) - 1 = 2 sinh^2(n/2) keeps small displacements exact-ish
        a = 2.0 * np.sinh(0.5 * n) ** 2
        small = n < 1e-8
        b = np.where(small, 1.0 + n * n / 6.0, np.sinh(n) / np.where(small, 1.0, n))
        dP = a[:, None] * P + b[:, None] * V
        new = project_rows(P + dP)
        return new, new - P

    def geodesic_eval(self, p, q, t: float) -> np.ndarray:
        if t == 0:
            return np.array(p, dtype=float)
        if t == 1:
            return np.array(q, dtype=float)
        return self.exp(p, t * self.log(p, q))

    def tangent_basis(self, p) -> np.ndarray:
        p = np.asarray(p, float)
        basis = []
        for k in range(1, self.ambient_dim):
            v = np.zeros(self.ambient_dim)
            v[k] = 1.0
            v = self.project_tangent(p, v)
            for b in basis:
                v = v - mdot(v, b) * b
            basis.append(v / math.sqrt(mdot(v, v)))
        return np.array(basis)

    def random_point(self, rng, scale: float = 1.0) -> np.ndarray:
        return lift(scale * rng.standard_normal(self.dim))

    def curvature_upper_bound(self) -> float:
        return -1.0

    def spec(self) -> dict:
        return {"type": "hyperbolic", "dim": self.dim}
