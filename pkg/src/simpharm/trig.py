"""Angles and areas of Euclidean and hyperbolic (curvature -1) triangles.

Angles use half-angle forms of the laws of cosines, which stay accurate for
thin triangles where ``arccos`` of the raw law loses half the digits.
Arguments are clamped to the valid range, and degenerate triangles get
angles of 0 or pi and area 0.
"""
from __future__ import annotations

import math

from .metric import heron


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def euclidean_angle(a: float, b: float, c: float) -> float:
    """Angle opposite side ``a`` in a triangle with sides ``a, b, c``."""
    if b == 0.0 or c == 0.0:
        return math.nan
    s = 0.5 * (a + b + c)
    s2 = _clamp01((s - b) * (s - c) / (b * c))
    return 2.0 * math.asin(math.sqrt(s2))


def hyperbolic_angle(a: float, b: float, c: float) -> float:
    """Angle opposite side ``a`` of a hyperbolic triangle.

    Half-angle form of ``cosh a = cosh b cosh c - sinh b sinh c cos(alpha)``.
    """
    if b == 0.0 or c == 0.0:
        return math.nan
    s = 0.5 * (a + b + c)
    s2 = _clamp01(math.sinh(s - b) * math.sinh(s - c) / (math.sinh(b) * math.sinh(c)))
    return 2.0 * math.asin(math.sqrt(s2))


def angle(a: float, b: float, c: float, hyperbolic: bool) -> float:
    return hyperbolic_angle(a, b, c) if hyperbolic else euclidean_angle(a, b, c)


def hyperbolic_area(a: float, b: float, c: float) -> float:
    """Area of a hyperbolic triangle, i.e. its angle defect (L'Huilier form)."""
    a, b, c = sorted((float(a), float(b), float(c)), reverse=True)
    if c <= 0.0 or a >= b + c:
        return 0.0
    s = 0.5 * (a + b + c)
    prod = (
        math.tanh(0.5 * s)
        * math.tanh(0.5 * (s - a))
        * math.tanh(0.5 * (s - b))
        * math.tanh(0.5 * (s - c))
    )
    return 4.0 * math.atan(math.sqrt(max(prod, 0.0)))


def triangle_area(a: float, b: float, c: float, hyperbolic: bool) -> float:
    return hyperbolic_area(a, b, c) if hyperbolic else heron(a, b, c)
