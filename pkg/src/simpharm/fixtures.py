"""Builders for the standard example complexes, metrics and maps."""
from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources

import numpy as np

from .complex import SKELETON, DeltaComplex, annulus_quad_complex, build_complex, complex_from_polygons
from .metric import SimplicialMetric, as_lengths
from .smap import SimplicialMap, standard_type_map, subdivide
from .targets import Euclidean, FlatTorus, Genus2Octagon, MetricTree
from .targets.genus2 import LETTERS, octagon_vertices, reduce_word


# -- torus -----------------------------------------------------------------


def torus_complex() -> DeltaComplex:
    """One vertex, loops ``a, b, c`` and two triangles ``a b c^-1`` and ``c a^-1 b^-1``."""
    return build_complex(
        [(0, 0), (0, 0), (0, 0)],
        [[(0, 1), (1, 1), (2, -1)], [(2, 1), (0, -1), (1, -1)]],
    )


TORUS_DECKS = ((1, 0), (0, 1), (1, 1))


def torus_map(point=(0.0, 0.0)) -> SimplicialMap:
    """The identity-class map of the unit square torus."""
    return SimplicialMap(torus_complex(), FlatTorus(2), np.array([point], float), TORUS_DECKS)


def torus_metric() -> SimplicialMetric:
    return SimplicialMetric([1.0, 1.0, math.sqrt(2.0)])


# -- small closed surfaces and disks ----------------------------------------------


def pillow_complex() -> DeltaComplex:
    """Two triangles glued along all three edges: a sphere."""
    return build_complex([(0, 1), (1, 2), (0, 2)], [[(0, 1), (1, 1), (2, -1)], [(2, 1), (1, -1), (0, -1)]])


def wheel_complex(n: int = 6) -> DeltaComplex:
    """A disk made of ``n`` triangles around interior vertex 0."""
    polys = [(0, 1 + k, 1 + (k + 1) % n) for k in range(n)]
    return complex_from_polygons(polys)


def hex_disk(rings: int = 3):
    """Triangulated hexagonal patch of the triangular lattice.

    Returns ``(complex, planar positions)``; positions sit on the unit-spacing
    lattice, so the Euclidean edge lengths form a valid metric.
    """
    pts = []
    index = {}
    for i in range(-rings, rings + 1):
        for j in range(-rings, rings + 1):
            if abs(i) <= rings and abs(j) <= rings and abs(i + j) <= rings:
                index[(i, j)] = len(pts)
                pts.append((i + 0.5 * j, j * math.sqrt(3) / 2))
    polys = []
    for (i, j), v in index.items():
        a, b = index.get((i + 1, j)), index.get((i, j + 1))
        c = index.get((i - 1, j + 1))
        if a is not None and b is not None:
            polys.append((v, a, b))
        if b is not None and c is not None:
            polys.append((v, b, c))
    return complex_from_polygons(polys), np.array(pts)


def dirichlet_disk(rings: int = 3, seed: int = 0):
    """Disk with boundary pinned to the regular hexagon and a random interior start.

    Returns ``(complex, metric, map, fixed vertex list)``.
    """
    K, pos = hex_disk(rings)
    rng = np.random.default_rng(seed)
    lengths = np.linalg.norm(pos[K.heads] - pos[K.tails], axis=1)
    fixed = sorted(K.boundary_vertices)
    imgs = pos.copy()
    free = np.setdiff1d(np.arange(K.n_vertices), fixed)
    imgs[free] = 0.5 * rings * rng.uniform(-1, 1, size=(free.size, 2))
    return K, SimplicialMetric(lengths), SimplicialMap(K, Euclidean(2), imgs, None), fixed


def random_planar_instance(rng: np.random.Generator, n_interior: int = 12, n_boundary: int = 10,
                           jitter: float = 0.0):
    """Random Delaunay disk with the boundary on the unit circle.

    The metric comes from the point positions (optionally perturbed by
    ``jitter`` and re-realised), so the triangle inequality holds.  Returns
    ``(complex, metric, positions, fixed vertex list)``.
    """
    from scipy.spatial import Delaunay

    ang = np.sort(rng.uniform(0, 2 * math.pi, n_boundary))
    bnd = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    r = 0.8 * np.sqrt(rng.uniform(0, 1, n_interior))
    t = rng.uniform(0, 2 * math.pi, n_interior)
    inner = np.stack([r * np.cos(t), r * np.sin(t)], axis=1)
    pts = np.vstack([bnd, inner])
    tri = Delaunay(pts)
    simplices = []
    for s in tri.simplices:
        a, b, c = pts[s]
        if (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) < 0:
            s = s[[0, 2, 1]]
        simplices.append(tuple(int(x) for x in s))
    K = complex_from_polygons(simplices, n_vertices=len(pts))
    realised = pts + jitter * rng.standard_normal(pts.shape)
    lengths = np.linalg.norm(realised[K.heads] - realised[K.tails], axis=1)
    fixed = sorted(K.boundary_vertices)
    return K, SimplicialMetric(lengths), pts, fixed


# -- genus two -------------------------------------------------------------------


@lru_cache(maxsize=1)
def octagon_corner_words() -> tuple[str, ...]:
    """Shortest words ``w_k`` with ``w_k . V_0 = V_k`` for the octagon vertices."""
    T = Genus2Octagon()
    V = octagon_vertices()
    found = {0: ""}
    frontier = [""]
    while len(found) < 8:
        nxt = []
        for w in frontier:
            for ch in LETTERS:
                w2 = reduce_word(w + ch)
                if len(w2) <= len(w):
                    continue
                nxt.append(w2)
                y = T.word_matrix(w2) @ V[0]
                for k in range(8):
                    if k not in found and np.abs(y - V[k]).max() < 1e-8:
                        found[k] = w2
        frontier = nxt
    return tuple(found[k] for k in range(8))


def genus2_complex() -> tuple[DeltaComplex, tuple[str, ...]]:
    """One-vertex triangulation of the octagon by the fan from ``V_0``.

    Edges 0..3 are the octagon sides 0, 1, 4, 5; sides 2, 3, 6, 7 are glued
    to them reversed.  Edges 4..8 are the diagonals ``V_0 V_k`` for
    ``k = 2..6``.  Returns ``(complex, decks)`` of the map sending the vertex
    to ``V_0``.
    """
    T = Genus2Octagon()
    gam = octagon_corner_words()
    side_edge = {0: (0, 1), 1: (1, 1), 4: (2, 1), 5: (3, 1), 2: (0, -1), 3: (1, -1), 6: (2, -1), 7: (3, -1)}
    decks = [T.deck_compose(T.deck_inverse(gam[k]), gam[(k + 1) % 8]) for k in (0, 1, 4, 5)]
    decks += [gam[k] for k in range(2, 7)]

    def spoke(k):  # directed edge V_0 -> V_k for k = 1..7
        if k == 1:
            return (0, 1)
        if k == 7:
            e, sgn = side_edge[7]
            return (e, -sgn)
        return (k + 2, 1)

    faces = []
    for k in range(1, 7):
        e, sgn = spoke(k + 1)
        faces.append([spoke(k), side_edge[k], (e, -sgn)])
    K = build_complex([(0, 0)] * 9, faces)
    return K, tuple(decks)


def genus2_map(levels: int = 0):
    """Genus-2 complex, its induced metric and the geometric octagon map.

    ``levels`` rounds of conformal subdivision are applied to the complex,
    the metric and the map.  Returns ``(complex, metric, map)``.
    """
    K, decks = genus2_complex()
    T = Genus2Octagon()
    f = SimplicialMap(K, T, octagon_vertices()[:1], decks)
    l = SimplicialMetric(f.edge_lengths())
    for _ in range(levels):
        _, f, l = subdivide(f, l)
    return f.complex, l, f


def perturbed(f: SimplicialMap, rng: np.random.Generator, scale: float = 0.3) -> SimplicialMap:
    """Move every vertex image by a random tangent vector of size ``~scale``."""
    T = f.target
    imgs = []
    for p in f.images:
        B = T.tangent_basis(p)
        imgs.append(T.exp(p, scale * rng.standard_normal(B.shape[0]) @ B))
    return f.with_images(np.array(imgs))


# -- skeleton and trees --------------------------------------------------------------


def bipyramid_skeleton() -> DeltaComplex:
    """2-skeleton of two tetrahedra glued along a face (5 vertices, 7 triangles)."""
    polys = [
        (0, 1, 2),  # shared face
        (0, 1, 3), (1, 2, 3), (0, 2, 3),
        (0, 1, 4), (1, 2, 4), (0, 2, 4),
    ]
    return complex_from_polygons(polys, mode=SKELETON)


def annulus_tree_fixture(n: int = 4):
    """Annulus of ``n`` quads stretched across the unit tree edge ``0 - 1``.

    Returns ``(complex, tree, map)``.
    """
    K = annulus_quad_complex(n)
    tree = MetricTree([(0, 1), (1, 2)], [1.0, 1.0])
    f = standard_type_map(K, tree, [(list(range(n)), 0)], [0, 1])
    return K, tree, f


# -- shipped JSON documents ------------------------------------------------------------

GENUS2_LEVELS = 3
GENUS2_SEED = 0


def _bundle(K, l, f, fixed=(), **extra) -> dict:
    doc = {"complex": K.to_json(), "metric": SimplicialMetric(as_lengths(l)).to_json(), "target": f.target.spec(),
           "map": f.to_json()}
    if fixed:
        doc["fixed"] = [int(v) for v in fixed]
    doc.update(extra)
    return doc


def fixture_documents() -> dict[str, dict]:
    """Every shipped fixture as a bundle document, keyed by file name."""
    from .verify import compare_weights

    docs = {}
    docs["torus.json"] = _bundle(torus_complex(), torus_metric(), torus_map())

    K, l, f = genus2_map(GENUS2_LEVELS)
    f = perturbed(f, np.random.default_rng(GENUS2_SEED))
    docs["genus2.json"] = _bundle(K, l, f)

    K, l, f, fixed = dirichlet_disk()
    docs["dirichlet_disk.json"] = _bundle(K, l, f, fixed)

    K, tree, f = annulus_tree_fixture()
    docs["annulus_tree.json"] = {"complex": K.to_json(), "target": tree.spec(), "map": f.to_json()}

    K = bipyramid_skeleton()
    rng = np.random.default_rng(1)
    domain = rng.standard_normal((K.n_vertices, 3))
    lengths = np.linalg.norm(domain[K.heads] - domain[K.tails], axis=1)
    f = SimplicialMap(K, Euclidean(3), rng.standard_normal((K.n_vertices, 3)), None)
    docs["skeleton.json"] = _bundle(K, lengths, f)

    # one triangle whose zero-length side is stretched: infinite energy
    K = complex_from_polygons([(0, 1, 2)])
    pos = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    lengths = np.array([0.0, 1.0, 1.0])
    docs["infinite_energy.json"] = _bundle(K, lengths, SimplicialMap(K, Euclidean(2), pos, None))

    cmp = compare_weights(n_instances=100, seed=0)
    w = cmp.witnesses[0]
    f = SimplicialMap(w["complex"], Euclidean(2), w["images"], None)
    docs["cotangent_witness.json"] = _bundle(
        w["complex"], w["metric"], f, w["fixed"],
        cotangent_weights=[float(x) for x in w["weights"]], violating_vertex=int(w["vertex"]))
    return docs


def write_fixtures(directory) -> list[str]:
    """Regenerate the shipped fixtures into ``directory``; returns the file names."""
    from pathlib import Path

    from .io import write_json

    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    docs = fixture_documents()
    for name, doc in docs.items():
        write_json(out / name, doc)
    return sorted(docs)


def load_json(name: str) -> dict:
    with resources.files(__package__).joinpath("data", name).open("r") as fh:
        return json.load(fh)


def fixture_names() -> list[str]:
    return sorted(p.name for p in resources.files(__package__).joinpath("data").iterdir()
                  if p.name.endswith(".json"))


__all__ = [
    "TORUS_DECKS",
    "annulus_tree_fixture",
    "bipyramid_skeleton",
    "dirichlet_disk",
    "fixture_names",
    "genus2_complex",
    "genus2_map",
    "hex_disk",
    "fixture_documents",
    "load_json",
    "octagon_corner_words",
    "perturbed",
    "pillow_complex",
    "random_planar_instance",
    "torus_complex",
    "torus_map",
    "torus_metric",
    "wheel_complex",
    "write_fixtures",
]


if __name__ == "__main__":
    import sys

    target_dir = sys.argv[1] if len(sys.argv) > 1 else str(resources.files(__package__).joinpath("data"))
    for name in write_fixtures(target_dir):
        print(name)
