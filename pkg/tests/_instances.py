"""Random (complex, metric, map) generators shared by the test modules."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from simpharm.complex import annulus_quad_complex, complex_from_polygons
from simpharm.fixtures import (
    genus2_map,
    hex_disk,
    perturbed,
    pillow_complex,
    random_planar_instance,
    torus_complex,
    wheel_complex,
)
from simpharm.metric import SimplicialMetric, induced_quasimetric
from simpharm.smap import SimplicialMap, gauge_transform, normalize_gauge, random_map
from simpharm.targets import Euclidean, FlatTorus, Hyperbolic, MetricTree
from simpharm.targets.genus2 import LETTERS


@lru_cache(maxsize=None)
def plain_complexes():
    """Complexes without essential loops: any target with trivial decks works."""
    return (
        wheel_complex(5),
        wheel_complex(7),
        hex_disk(1)[0],
        hex_disk(2)[0],
        pillow_complex(),
        annulus_quad_complex(3),
        annulus_quad_complex(5),
        complex_from_polygons([(0, 1, 2, 3), (0, 3, 4), (3, 2, 5, 6, 4)]),
        complex_from_polygons([(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)]),  # tetrahedron
    )


@lru_cache(maxsize=None)
def _genus2_base():
    return genus2_map(0)


def euclid_metric(K, rng) -> SimplicialMetric:
    """Lengths of a random placement of the vertices in R^3 (always valid)."""
    g = random_map(K, Euclidean(3), rng)
    return induced_quasimetric(K, g)


def random_torus_map(rng, scale: float = 0.3) -> SimplicialMap:
    K = torus_complex()
    while True:
        a, b = rng.integers(-2, 3, 2), rng.integers(-2, 3, 2)
        if a[0] * b[1] - a[1] * b[0] != 0:
            break
    decks = (tuple(a), tuple(b), tuple(a + b))
    return SimplicialMap(K, FlatTorus(2), scale * rng.standard_normal((1, 2)), decks)


def random_genus2_map(rng, scale: float = 0.3) -> SimplicialMap:
    _, _, f = _genus2_base()
    f = perturbed(f, rng, scale)
    # a random gauge change keeps the class but scrambles the decks; the
    # lift is then brought back next to the fundamental octagon
    word = "".join(rng.choice(list(LETTERS), size=int(rng.integers(0, 3))))
    return normalize_gauge(gauge_transform(f, 0, word))


def random_instance(rng, family: str, conformal: bool):
    """``(map, metric)`` for one of the target families.

    ``conformal`` instances use ``l = L / c`` for a random ``c``, so all
    stretch factors equal ``c``; otherwise the metric comes from an
    independent random configuration.
    """
    if family == "torus":
        f = random_torus_map(rng)
        # lengths only depend on the decks here, so take another lattice
        other = random_torus_map(rng)
        while other.decks == f.decks:
            other = random_torus_map(rng)
        l_other = induced_quasimetric(other.complex, other)
    elif family == "genus2":
        f = random_genus2_map(rng)
        l_other = induced_quasimetric(f.complex, random_genus2_map(rng))
    else:
        Ks = plain_complexes()
        K = Ks[int(rng.integers(len(Ks)))]
        if family == "euclidean":
            T = Euclidean(int(rng.integers(1, 4)))
        elif family == "hyperbolic":
            T = Hyperbolic(int(rng.integers(2, 4)))
        elif family == "tree":
            T = MetricTree([(0, 1), (1, 2), (1, 3), (3, 4)], [1.0, 0.5, 2.0, 1.5])
        else:
            raise ValueError(family)
        f = random_map(K, T, rng)
        l_other = euclid_metric(K, rng)
    if conformal:
        c = float(rng.uniform(0.5, 2.0))
        return f, SimplicialMetric(f.edge_lengths() / c)
    return f, l_other


FAMILIES = ("euclidean", "hyperbolic", "torus", "genus2", "tree")


def dirichlet_instance(rng, n_interior: int = 12, n_boundary: int = 10, dim: int = 2):
    """Random planar disk with boundary data on the unit circle and a random interior start.

    Returns ``(map, metric, fixed)``.
    """
    K, l, pts, fixed = random_planar_instance(rng, n_interior, n_boundary, jitter=0.0)
    imgs = np.zeros((K.n_vertices, dim))
    if dim == 2:
        imgs[:] = pts
        free = np.setdiff1d(np.arange(K.n_vertices), fixed)
        imgs[free] = 0.5 * rng.uniform(-1, 1, (free.size, 2))
    else:
        imgs[fixed, 0] = rng.uniform(-1, 1, len(fixed))
        free = np.setdiff1d(np.arange(K.n_vertices), fixed)
        imgs[free, 0] = rng.uniform(-3, 3, free.size)
    return SimplicialMap(K, Euclidean(dim), imgs, None), l, fixed
