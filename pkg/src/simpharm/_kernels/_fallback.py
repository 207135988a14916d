"""Pure numpy implementations of the per-edge kernels.

Every function here has a twin in ``_core.pyx`` with the same signature and
the same floating-point contract; tests compare the two backends.

Geometry kinds: ``EUCLID`` (flat coordinates, also used for lifted torus
points) and ``HYPERBOLOID`` (time coordinate first, Minkowski form
``-x0*y0 + x1*y1 + ...``).
"""
from __future__ import annotations

import numpy as np

EUCLID = 0
HYPERBOLOID = 1


def _mdot(x, y):
    return -x[:, 0] * y[:, 0] + np.einsum("ij,ij->i", x[:, 1:], y[:, 1:])


def edge_lengths(kind, P, Q):
    """Distances between matching rows of ``P`` and ``Q``."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    D = Q - P
    if kind == EUCLID:
        return np.sqrt(np.einsum("ij,ij->i", D, D))
    # |Q-P|_L = 2 sinh(d/2); accurate for short edges.
    r2 = np.maximum(_mdot(D, D), 0.0)
    return 2.0 * np.arcsinh(0.5 * np.sqrt(r2))


def energy_grad(kind, P, Q, w):
    """Return ``(sum w*d^2, grad_P, grad_Q)`` for the weighted squared distances.

    ``grad_P[e]`` is the Riemannian gradient of ``w[e]*d(P[e],Q[e])**2`` with
    respect to ``P[e]`` (a tangent vector at ``P[e]``); likewise ``grad_Q``.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    w = np.asarray(w, dtype=float)
    if kind == EUCLID:
        D = P - Q
        L2 = np.einsum("ij,ij->i", D, D)
        G = 2.0 * w[:, None] * D
        return float(np.dot(w, L2)), G, -G
    D = Q - P
    r2 = np.maximum(_mdot(D, D), 0.0)
    L = 2.0 * np.arcsinh(0.5 * np.sqrt(r2))
    c = -_mdot(P, Q)
    sh = np.sinh(L)
    small = L < 1e-8
    ratio = np.where(small, 1.0, L / np.where(small, 1.0, sh))
    # log_P(Q) = d/sinh(d) * (Q - cosh(d) P)
    logPQ = ratio[:, None] * (Q - c[:, None] * P)
    logQP = ratio[:, None] * (P - c[:, None] * Q)
    coef = -2.0 * w[:, None]
    return float(np.dot(w, L * L)), coef * logPQ, coef * logQP


def energy_delta(kind, P, Q, dP, dQ, w):
    """Change of ``sum w*d(P,Q)^2`` when ``P += dP`` and ``Q += dQ``.

    Computed from the displacements rather than as a difference of two
    energies, so it stays accurate when the change is far below the rounding
    level of the energy itself.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    dP = np.asarray(dP, dtype=float)
    dQ = np.asarray(dQ, dtype=float)
    w = np.asarray(w, dtype=float)
    if kind == EUCLID:
        A = P - Q
        B = dP - dQ
        dL2 = 2.0 * np.einsum("ij,ij->i", A, B) + np.einsum("ij,ij->i", B, B)
        return float(np.dot(w, dL2))
    # work with the chord D = Q - P so nothing cancels at short range
    D = Q - P
    dD = dQ - dP
    x2 = 0.25 * np.maximum(_mdot(D, D), 0.0)
    x = np.sqrt(x2)
    dc = 0.5 * _mdot(D, dD) + 0.25 * _mdot(dD, dD)
    xn2 = x2 + dc
    dc = np.where(xn2 < 0.0, -x2, dc)
    xn2 = np.maximum(xn2, 0.0)
    xn = np.sqrt(xn2)
    den = xn * np.sqrt(1.0 + x2) + x * np.sqrt(1.0 + xn2)
    safe = den > 0.0
    dL = np.where(safe, 2.0 * np.arcsinh(dc / np.where(safe, den, 1.0)), 0.0)
    L = 2.0 * np.arcsinh(x)
    return float(np.dot(w, dL * (2.0 * L + dL)))


def scatter_add(out, idx, vals):
    """``out[idx[k]] += vals[k]`` with repeated indices accumulated."""
    np.add.at(out, np.asarray(idx, dtype=np.intp), vals)
    return out
