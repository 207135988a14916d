"""Simplicial maps: vertex images plus per-edge deck elements.

An edge ``e = (t -> h)`` with deck element ``g_e`` is mapped to the geodesic
from ``p(t)`` to ``g_e . p(h)`` in the model space, so its image length is
``L_e = d(p(t), g_e . p(h))``.  Walking around a face from a base vertex, a
running frame ``G`` is updated by ``G <- G g_e`` along ``(e, +1)`` and by
``G <- G g_e^-1`` along ``(e, -1)``; the vertex reached is lifted to
``G . p(v)``.  The face cocycle condition says ``G`` returns to the identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .complex import SKELETON, DeltaComplex, Subdivision, subdivided_lengths
from .metric import SimplicialMetric, as_lengths, edge_weights, neighbor_sums
from .targets import GeodesicTarget, MetricTree, TargetError, make_target
from .trig import triangle_area

INFINITE = math.inf


class MapError(ValueError):
    """Raised for inconsistent simplicial maps."""


@dataclass(frozen=True, eq=False)
class SimplicialMap:
    complex: DeltaComplex
    target: GeodesicTarget
    images: np.ndarray
    decks: tuple
    check: bool = True

    def __post_init__(self):
        K, T = self.complex, self.target
        imgs = np.array(self.images, dtype=float, copy=True)
        if imgs.ndim != 2 or imgs.shape[0] != K.n_vertices:
            raise MapError(f"need one image per vertex ({K.n_vertices})")
        if self.decks is None:
            decks = (T.deck_identity(),) * K.n_edges
        else:
            if len(self.decks) != K.n_edges:
                raise MapError(f"need one deck element per edge ({K.n_edges})")
            decks = tuple(T.deck_normalize(g) for g in self.decks)
        if self.check:
            for v in range(K.n_vertices):
                T.check_point(imgs[v])
        imgs.setflags(write=False)
        object.__setattr__(self, "images", imgs)
        object.__setattr__(self, "decks", decks)
        if self.check and T.has_decks:
            bad = self.cocycle_violations()
            if bad:
                raise MapError(f"face cocycle condition fails on face {bad[0]}")

    # -- derived data ----------------------------------------------------------
    @cached_property
    def deck_action(self):
        return self.target.deck_action(self.decks)

    def lifted_heads(self, images: np.ndarray | None = None) -> np.ndarray:
        X = self.images if images is None else images
        return self.deck_action.apply(X[self.complex.heads])

    def edge_lengths(self) -> np.ndarray:
        return self._lengths

    @cached_property
    def _relifted(self) -> "SimplicialMap":
        # the same map with every lift moved next to the fundamental domain;
        # used for intrinsic quantities when far lifts would cost precision
        if not self.target.far_lifts_lose_precision:
            return self
        g = normalize_gauge(self)
        # the reduced map is its own re-lift; without this every level would reduce again
        g.__dict__["_relifted"] = g
        return g

    @cached_property
    def _lengths(self) -> np.ndarray:
        K, T = self.complex, self.target
        if isinstance(T, MetricTree):
            out = np.array([T.distance(p, q) for p, q in zip(self.images[K.tails], self.images[K.heads])])
        else:
            g = self._relifted
            out = T.lifted_distances(g.images[K.tails], g.images[K.heads], g.decks, g.deck_action)
        out.setflags(write=False)
        return out

    def signed_deck(self, e: int, s: int):
        g = self.decks[e]
        return g if s > 0 else self.target.deck_inverse(g)

    def face_frames(self, face: int) -> list:
        """Frames ``G_k`` in which vertex ``k`` of the face is lifted."""
        T = self.target
        G = T.deck_identity()
        out = []
        for e, s in self.complex.faces[face]:
            out.append(G)
            G = T.deck_compose(G, self.signed_deck(e, s))
        out.append(G)
        return out

    def face_lifts(self, face: int) -> np.ndarray:
        """Lifts of the face's vertices into one sheet, in face order.

        Only defined up to an isometry: for targets flagged with
        ``far_lifts_lose_precision`` the sheet is that of the re-lifted map.
        """
        if self._relifted is not self:
            return self._relifted.face_lifts(face)
        T = self.target
        verts = self.complex.face_vertices[face]
        frames = self.face_frames(face)
        return np.array([T.deck_apply(G, self.images[v]) for G, v in zip(frames, verts)])

    def cocycle_violations(self) -> list[int]:
        T = self.target
        return [
            f for f in range(self.complex.n_faces)
            if not T.deck_is_identity(self.face_frames(f)[-1])
        ]

    # -- copies ----------------------------------------------------------------
    def with_images(self, images, check: bool = False) -> "SimplicialMap":
        out = SimplicialMap(self.complex, self.target, images, self.decks, check=False)
        if check:
            for v in range(self.complex.n_vertices):
                self.target.check_point(out.images[v])
        return out

    def to_json(self) -> dict:
        T = self.target
        return {
            "vertex_images": [T.point_to_json(p) for p in self.images],
            "edge_decks": [T.deck_to_json(g) for g in self.decks],
        }

    @classmethod
    def from_json(cls, K: DeltaComplex, target, data: dict) -> "SimplicialMap":
        T = make_target(target)
        try:
            imgs = [T.point_from_json(p) for p in data["vertex_images"]]
            decks = data.get("edge_decks")
            decks = None if decks is None else [T.deck_from_json(g) for g in decks]
        except (KeyError, TypeError) as exc:
            raise MapError(f"malformed map document: {exc}") from exc
        return cls(K, T, np.array(imgs, dtype=float).reshape(len(imgs), -1), decks)


def constant_map(K: DeltaComplex, target, point=None) -> SimplicialMap:
    T = make_target(target)
    if point is None:
        point = T.project(np.eye(T.ambient_dim)[0]) if T.kind == 1 else np.zeros(T.ambient_dim)
    return SimplicialMap(K, T, np.tile(np.asarray(point, float), (K.n_vertices, 1)), None)


# -- lengths, stretch and area -------------------------------------------------


def edge_lengths(f: SimplicialMap) -> np.ndarray:
    return f.edge_lengths()


@dataclass(frozen=True)
class StretchProfile:
    """Per-edge stretch factors; ``INFINITE`` marks ``l = 0 < L``."""

    sigma: np.ndarray

    @property
    def infinite(self) -> bool:
        return bool(np.isinf(self.sigma).any())

    def stats(self) -> dict:
        fin = self.sigma[np.isfinite(self.sigma)]
        return {
            "min": float(fin.min()) if fin.size else None,
            "max": float(fin.max()) if fin.size else None,
            "mean": float(fin.mean()) if fin.size else None,
            "n_infinite": int(np.isinf(self.sigma).sum()),
        }


def stretch_values(L: np.ndarray, l: np.ndarray) -> np.ndarray:
    sigma = np.zeros_like(L)
    pos = l > 0
    sigma[pos] = L[pos] / l[pos]
    sigma[(~pos) & (L > 0)] = INFINITE
    return sigma


def stretch_factors(f: SimplicialMap, l) -> StretchProfile:
    return StretchProfile(stretch_values(f.edge_lengths(), _check_lengths(f, l)))


def _check_lengths(f: SimplicialMap, l) -> np.ndarray:
    lengths = as_lengths(l)
    if lengths.size != f.complex.n_edges:
        raise MapError("metric size does not match the complex")
    return lengths


def simplicial_area_of_map(f: SimplicialMap) -> float:
    a, b = f.complex.corners
    L = f.edge_lengths()
    return float(np.sum(L[a] * L[b]))


def _corner_energy(K: DeltaComplex, L: np.ndarray, l: np.ndarray) -> float:
    sigma = stretch_values(L, l)
    if np.isinf(sigma).any():
        return INFINITE
    s2 = sigma * sigma
    a, b = K.corners
    return float(np.sum(0.5 * (s2[a] + s2[b]) * (l[a] * l[b])))


def _edge_energy(K: DeltaComplex, L: np.ndarray, l: np.ndarray) -> float:
    if ((l == 0) & (L > 0)).any():
        return INFINITE
    pos = l > 0
    w = neighbor_sums(K, l)[pos] / (2.0 * l[pos])
    return float(np.sum(w * L[pos] ** 2))


def simplicial_energy(f: SimplicialMap, l) -> float:
    """Corner-sum simplicial energy ``1/2 sum (s_i^2 + s_j^2) l_i l_j``.

    Returns ``INFINITE`` when an edge of length zero has an image of positive
    length.  Corners touching a zero-length edge with a point image add 0.
    """
    return _corner_energy(f.complex, f.edge_lengths(), _check_lengths(f, l))


def simplicial_energy_edge(f: SimplicialMap, l) -> float:
    """Edge-sum form ``sum w_i L_i^2`` of the simplicial energy."""
    return _edge_energy(f.complex, f.edge_lengths(), _check_lengths(f, l))


def energy_forms(f: SimplicialMap, l) -> tuple[float, float]:
    return simplicial_energy(f, l), simplicial_energy_edge(f, l)


@dataclass(frozen=True)
class ConformalVerdict:
    conformal: bool
    components: tuple[tuple[int, ...], ...]
    sigma: tuple[float, ...]
    max_deviation: float


def positive_components(K: DeltaComplex, l: np.ndarray) -> list[list[int]]:
    """Components of the complex with the zero-length subcomplex removed.

    Positive edges are joined when they bound a common face or share a
    vertex that no zero-length edge touches.
    """
    pos = l > 0
    parent = list(range(K.n_edges))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        parent[find(i)] = find(j)

    for cyc in K.faces:
        es = [e for e, _ in cyc if pos[e]]
        for e in es[1:]:
            union(es[0], e)
    zero_v = set()
    for e in np.flatnonzero(~pos):
        zero_v.update(K.edges[e])
    first: dict[int, int] = {}
    for e in np.flatnonzero(pos):
        for v in K.edges[e]:
            if v in zero_v:
                continue
            if v in first:
                union(first[v], int(e))
            else:
                first[v] = int(e)
    comps: dict[int, list[int]] = {}
    for e in np.flatnonzero(pos):
        comps.setdefault(find(int(e)), []).append(int(e))
    return sorted(comps.values())


def is_conformal(f: SimplicialMap, l, tol: float = 1e-9) -> ConformalVerdict:
    """Stretch factors constant (within ``tol``, relative) on each component."""
    lengths = _check_lengths(f, l)
    sigma = stretch_values(f.edge_lengths(), lengths)
    comps = positive_components(f.complex, lengths)
    dev = 0.0
    means = []
    for comp in comps:
        s = sigma[comp]
        means.append(float(s.mean()))
        dev = max(dev, float((s.max() - s.min()) / max(1.0, s.max())))
    zero_ok = not np.isinf(sigma).any()
    return ConformalVerdict(zero_ok and dev <= tol, tuple(map(tuple, comps)), tuple(means), dev)


# -- Riemannian area -----------------------------------------------------------


def _fan(K: DeltaComplex, face: int):
    n = len(K.faces[face])
    k0 = K.preferred_position(face)
    return [(k0, (k0 + j) % n, (k0 + j + 1) % n) for j in range(1, n - 1)]


def face_riemannian_areas(f: SimplicialMap) -> np.ndarray:
    K, T = f.complex, f.target
    out = np.zeros(K.n_faces)
    if isinstance(T, MetricTree):
        return out
    hyper = T.kind == 1
    L = f.edge_lengths()
    for face, cyc in enumerate(K.faces):
        if len(cyc) == 3:
            out[face] = triangle_area(*L[[e for e, _ in cyc]], hyperbolic=hyper)
            continue
        X = f.face_lifts(face)
        # cone from the preferred vertex: a fan of geodesic triangles
        tot = 0.0
        for i, j, k in _fan(K, face):
            a = T.distance(X[j], X[k])
            b = T.distance(X[i], X[k])
            c = T.distance(X[i], X[j])
            tot += triangle_area(a, b, c, hyperbolic=hyper)
        out[face] = tot
    return out


def riemannian_area(f: SimplicialMap) -> float:
    """Area of the ruled image surface (0 for tree targets)."""
    return math.fsum(face_riemannian_areas(f))


# -- maps to trees of standard type --------------------------------------------


def annulus_structure(K: DeltaComplex, faces):
    """Rungs and the two boundary circles of an annulus made of quads.

    Rungs are the edges shared by two faces of the annulus; the remaining
    edges of its faces form the two side circles.
    """
    faces = list(faces)
    count: dict[int, int] = {}
    for fc in faces:
        if len(K.faces[fc]) != 4:
            raise MapError("annulus faces must be quadrilaterals")
        for e, _ in K.faces[fc]:
            count[e] = count.get(e, 0) + 1
    rungs = sorted(e for e, c in count.items() if c == 2)
    sides = sorted(e for e, c in count.items() if c == 1)
    if len(rungs) != len(faces) or len(sides) != 2 * len(faces):
        raise MapError("faces do not form a standard annulus subdivision")
    return rungs, sides


def standard_regions(K: DeltaComplex, annuli) -> np.ndarray:
    """Region label per vertex after cutting every annulus along its rungs.

    Regions are numbered in order of their smallest vertex id.
    """
    rung = set()
    for faces, _ in annuli:
        rung.update(annulus_structure(K, faces)[0])
    parent = list(range(K.n_vertices))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for e, (t, h) in enumerate(K.edges):
        if e not in rung:
            parent[find(t)] = find(h)
    roots: dict[int, int] = {}
    labels = np.empty(K.n_vertices, dtype=np.intp)
    for v in range(K.n_vertices):
        labels[v] = roots.setdefault(find(v), len(roots))
    return labels


def standard_type_map(K: DeltaComplex, tree: MetricTree, annuli, region_vertex) -> SimplicialMap:
    """Map constant on each region and stretching each annulus across a tree edge.

    ``annuli`` is a list of ``(face_ids, tree_edge)``.  ``region_vertex[r]``
    is the tree vertex for region ``r`` of :func:`standard_regions`.  The two
    sides of every annulus must lie in regions sent to the two endpoints of
    its tree edge.
    """
    if not isinstance(tree, MetricTree):
        raise MapError("standard-type maps take a metric tree target")
    labels = standard_regions(K, annuli)
    nreg = int(labels.max()) + 1
    region_vertex = [int(x) for x in region_vertex]
    if len(region_vertex) != nreg:
        raise MapError(f"need a tree vertex for each of the {nreg} regions")
    for r, tv in enumerate(region_vertex):
        if not 0 <= tv < tree.n_vertices:
            raise MapError(f"region {r} assigned to missing tree vertex {tv}")
    for faces, te in annuli:
        if not 0 <= te < len(tree.edges):
            raise MapError(f"annulus assigned to missing tree edge {te}")
        rungs, _ = annulus_structure(K, faces)
        ends = set()
        for e in rungs:
            t, h = K.edges[e]
            ends.add(frozenset((region_vertex[labels[t]], region_vertex[labels[h]])))
        if ends != {frozenset(tree.edges[te])}:
            raise MapError(f"annulus sides are not mapped to the endpoints of tree edge {te}")
    images = np.array([tree.vertex_point(region_vertex[labels[v]]) for v in range(K.n_vertices)])
    return SimplicialMap(K, tree, images, None)


# -- 2-skeleta of 3-complexes --------------------------------------------------


def _require_skeleton(K: DeltaComplex):
    if K.mode != SKELETON:
        raise MapError("2-volume and 2-energy are defined on skeleton-mode complexes")


def volume2_metric(K: DeltaComplex, l) -> float:
    """``V_2 = sum l_i l_j`` over all corners of all 2-simplices."""
    _require_skeleton(K)
    a, b = K.corners
    lengths = as_lengths(l)
    return float(np.sum(lengths[a] * lengths[b]))


def volume2(f: SimplicialMap) -> float:
    _require_skeleton(f.complex)
    return simplicial_area_of_map(f)


def energy2(f: SimplicialMap, l) -> float:
    """``E_2 = 1/2 sum (s_i^2 + s_j^2) l_i l_j`` over all corners."""
    _require_skeleton(f.complex)
    return simplicial_energy(f, l)


# -- gauge changes and subdivision -----------------------------------------------


def gauge_transform(f: SimplicialMap, v: int, h) -> SimplicialMap:
    """Replace ``p(v)`` by ``h.p(v)`` and re-express incident decks.

    Tail edges get ``h g``, head edges ``g h^-1`` and loops ``h g h^-1``, so
    every image length is unchanged.
    """
    K, T = f.complex, f.target
    h = T.deck_normalize(h)
    hinv = T.deck_inverse(h)
    imgs = np.array(f.images)
    imgs[v] = T.deck_apply(h, imgs[v])
    decks = list(f.decks)
    for e, (t, hd) in enumerate(K.edges):
        g = decks[e]
        if t == v:
            g = T.deck_compose(h, g)
        if hd == v:
            g = T.deck_compose(g, hinv)
        decks[e] = g
    return SimplicialMap(K, T, imgs, decks, check=False)


def normalize_gauge(f: SimplicialMap) -> SimplicialMap:
    """Gauge-transform every vertex image into the target's fundamental domain.

    Image lengths, energies and areas are unchanged; lifts stay close to the
    origin, which keeps hyperboloid coordinates small.
    """
    K, T = f.complex, f.target
    if not T.has_decks:
        return f
    reduced = [T.reduce(p) for p in f.images]
    hs = [h for h, _ in reduced]
    imgs = np.array([y for _, y in reduced])
    decks = [
        T.deck_compose(T.deck_compose(hs[t], g), T.deck_inverse(hs[h]))
        for (t, h), g in zip(K.edges, f.decks)
    ]
    return SimplicialMap(K, T, imgs, decks, check=True)


def subdivide_map(f: SimplicialMap, sub: Subdivision, normalize: bool = True) -> SimplicialMap:
    """Extend ``f`` to the subdivided complex.

    Each edge midpoint goes to the midpoint of the image geodesic (lifted in
    the tail's frame).  A quad centre goes to the midpoint of the geodesic
    joining the images of the midpoints of sides 0 and 2.  With
    ``normalize`` the result is passed through :func:`normalize_gauge`.
    """
    K, T = f.complex, f.target
    if sub.parent is not K:
        raise MapError("subdivision does not belong to this map's complex")
    child = sub.complex
    imgs = np.zeros((child.n_vertices, f.images.shape[1]))
    imgs[: K.n_vertices] = f.images
    Q = f.lifted_heads() if not isinstance(T, MetricTree) else f.images[K.heads]
    for e, (t, _) in enumerate(K.edges):
        imgs[sub.midpoint[e]] = T.geodesic_eval(f.images[t], Q[e], 0.5)
    ident = T.deck_identity()
    decks = [ident] * child.n_edges
    for e in range(K.n_edges):
        decks[sub.halves[e, 1]] = f.decks[e]

    def mid_frame(face, k, frames):
        e, s = K.faces[face][k]
        return frames[k] if s > 0 else T.deck_compose(frames[k], T.deck_inverse(f.decks[e]))

    frames_cache: dict[int, list] = {}
    for j, (face, a, b) in zip(sub.inner_ids, sub.inner):
        frames = frames_cache.get(face)
        if frames is None:
            frames = frames_cache[face] = f.face_frames(face)
        Ma = mid_frame(face, a, frames)
        if b >= 0:
            Mb = mid_frame(face, b, frames)
            decks[j] = T.deck_compose(T.deck_inverse(Ma), Mb)
        else:
            decks[j] = T.deck_inverse(Ma)
    if sub.kind == "quad":
        for face in range(K.n_faces):
            frames = frames_cache[face]
            m0 = T.deck_apply(mid_frame(face, 0, frames), imgs[sub.midpoint[K.faces[face][0][0]]])
            m2 = T.deck_apply(mid_frame(face, 2, frames), imgs[sub.midpoint[K.faces[face][2][0]]])
            imgs[sub.centers[face]] = T.geodesic_eval(m0, m2, 0.5)
    out = SimplicialMap(child, T, imgs, decks, check=True)
    return normalize_gauge(out) if normalize else out


def subdivide(f: SimplicialMap, l=None):
    """Conformally subdivide ``f`` (and ``l`` if given) on its complex.

    Returns ``(subdivision, child map, child metric or None)``.
    """
    from .complex import quad_subdivision, triangle_subdivision

    K = f.complex
    sub = triangle_subdivision(K) if K.is_triangulation() else quad_subdivision(K)
    child = subdivide_map(f, sub)
    metric = None if l is None else SimplicialMetric(subdivided_lengths(sub, as_lengths(l)))
    return sub, child, metric


# -- collapsing the zero-length subcomplex --------------------------------------


class CollapseError(MapError):
    """Raised when the zero-length subcomplex cannot be collapsed."""


@dataclass(frozen=True)
class CollapseReport:
    """Bookkeeping for :func:`collapse_zero_subcomplex`.

    ``digon_energy`` is the corner energy carried by faces that degenerate to
    2-gons; collapsing a 2-gon to an arc removes exactly this amount.
    """

    merged_vertices: int
    removed_edges: int
    removed_faces: int
    digon_faces: tuple[int, ...]
    digon_energy: float
    chi_before: int
    chi_after: int
    energy_before: float
    energy_after: float

    def to_json(self) -> dict:
        return {
            "merged_vertices": self.merged_vertices,
            "removed_edges": self.removed_edges,
            "removed_faces": self.removed_faces,
            "digon_faces": list(self.digon_faces),
            "digon_energy": self.digon_energy,
            "chi_before": self.chi_before,
            "chi_after": self.chi_after,
            "energy_before": self.energy_before,
            "energy_after": self.energy_after,
        }


def _zero_components(K: DeltaComplex, zero: np.ndarray):
    parent = list(range(K.n_vertices))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for e in np.flatnonzero(zero):
        a, b = find(K.edges[e][0]), find(K.edges[e][1])
        if a != b:
            parent[max(a, b)] = min(a, b)
    return np.array([find(v) for v in range(K.n_vertices)])


def collapse_zero_subcomplex(K: DeltaComplex, l, f: SimplicialMap, tol: float = 1e-12,
                             report: bool = False):
    """Collapse zero-length edges and all-zero faces, then 2-gons to arcs.

    Each component of the zero subcomplex (zero edges plus faces whose
    boundary is entirely zero) must be contractible: Euler characteristic 1
    and trivial holonomy once vertex lifts are aligned along a spanning tree.
    Its vertices merge into the lowest id.  A face left with two positive
    edges becomes a 2-gon whose edges are identified, keeping the lower edge
    id; a face left with no positive edge is dropped.

    Returns ``(K', l', f')``, plus a :class:`CollapseReport` when ``report``.
    Image lengths of surviving edges are unchanged.  The energy changes by
    minus the corner energy of the collapsed 2-gons.
    """
    T = f.target
    if f.complex is not K:
        raise CollapseError("map is not defined on this complex")
    lengths = as_lengths(l)
    if lengths.size != K.n_edges:
        raise CollapseError("metric size does not match the complex")
    L = f.edge_lengths()
    zero = lengths == 0
    bad = np.flatnonzero(zero & (L > tol))
    if bad.size:
        raise CollapseError(f"zero-length edge {bad[0]} has image length {L[bad[0]]:.3g}")
    comp = _zero_components(K, zero)

    # contractibility: chi = 1 for every component of the zero subcomplex
    zero_faces = [i for i, fc in enumerate(K.faces) if all(zero[e] for e, _ in fc)]
    chi: dict[int, int] = {}
    for v in range(K.n_vertices):
        chi[comp[v]] = chi.get(comp[v], 0) + 1
    for e in np.flatnonzero(zero):
        chi[comp[K.edges[e][0]]] -= 1
    for i in zero_faces:
        chi[comp[K.face_vertices[i][0]]] += 1
    for r, c in chi.items():
        if c != 1:
            raise CollapseError(f"zero component at vertex {r} is not contractible (chi = {c})")

    # align lifts along a spanning tree of zero edges
    adj: list[list[tuple[int, int, int]]] = [[] for _ in range(K.n_vertices)]
    for e in np.flatnonzero(zero):
        t, h = K.edges[e]
        adj[t].append((h, int(e), 1))
        adj[h].append((t, int(e), -1))
    gauge: list = [T.deck_identity()] * K.n_vertices
    seen = np.zeros(K.n_vertices, dtype=bool)
    for r in sorted(set(comp.tolist())):
        seen[r] = True
        stack = [r]
        while stack:
            u = stack.pop()
            for v, e, s in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    g = f.decks[e]
                    gauge[v] = T.deck_compose(gauge[u], g if s > 0 else T.deck_inverse(g))
                    stack.append(v)
    decks = [
        T.deck_compose(T.deck_compose(gauge[t], g), T.deck_inverse(gauge[h]))
        for (t, h), g in zip(K.edges, f.decks)
    ]
    for e in np.flatnonzero(zero):
        if not T.deck_is_identity(decks[e]):
            raise CollapseError(f"zero edge {e} closes an essential loop in the target")

    # identify the two edges of every 2-gon, tracking relative orientation
    eparent = list(range(K.n_edges))
    eflip = [1] * K.n_edges

    def efind(e):
        s = 1
        while eparent[e] != e:
            s *= eflip[e]
            e = eparent[e]
        return e, s

    digons, dropped, kept = [], [], []
    for i, fc in enumerate(K.faces):
        pos = [(e, s) for e, s in fc if not zero[e]]
        if len(pos) >= 3:
            kept.append((i, pos))
            continue
        if len(pos) == 1:
            raise CollapseError(f"face {i} violates the polygon inequality")
        if len(pos) == 0:
            dropped.append(i)
            continue
        digons.append(i)
        (e1, s1), (e2, s2) = pos
        r1, p1 = efind(e1)
        r2, p2 = efind(e2)
        # the 2-gon reads e1^s1 e2^s2 = 1, so e2 = e1^(-s1 s2) as oriented arcs
        rel = -s1 * s2
        if r1 == r2:
            if p1 * p2 != rel:
                raise CollapseError(f"2-gon {i} identifies an edge with its reverse")
            continue
        lo, hi = (r1, r2) if r1 < r2 else (r2, r1)
        eparent[hi] = lo
        eflip[hi] = p1 * p2 * rel

    # new vertex and edge numbering
    roots = sorted(set(comp.tolist()))
    vnew = {r: k for k, r in enumerate(roots)}
    vmap = np.array([vnew[c] for c in comp])
    reps = sorted({efind(e)[0] for e in range(K.n_edges) if not zero[e]})
    enew = {r: k for k, r in enumerate(reps)}
    edges = [(int(vmap[K.edges[r][0]]), int(vmap[K.edges[r][1]])) for r in reps]
    faces = []
    for _, pos in kept:
        cyc = []
        for e, s in pos:
            r, p = efind(e)
            cyc.append((enew[r], s * p))
        faces.append(cyc)
    K2 = DeltaComplex(len(roots), tuple(edges), tuple(tuple(c) for c in faces), K.mode)

    for e in range(K.n_edges):
        if zero[e]:
            continue
        r, p = efind(e)
        if lengths[e] != lengths[r]:
            raise CollapseError(f"edges {r} and {e} are identified but have different lengths")
        g = decks[e] if p > 0 else T.deck_inverse(decks[e])
        if not T.deck_is_identity(T.deck_compose(g, T.deck_inverse(decks[r]))):
            raise CollapseError(f"edges {r} and {e} are identified but have different images")
    l2 = SimplicialMetric(np.array([lengths[r] for r in reps]))
    imgs = np.array([T.deck_apply(gauge[r], f.images[r]) for r in roots])
    f2 = SimplicialMap(K2, T, imgs, [decks[r] for r in reps], check=True)
    if not report:
        return K2, l2, f2
    a, b = K.corners
    s2 = stretch_values(L, lengths) ** 2
    corner = 0.5 * (s2[a] + s2[b]) * (lengths[a] * lengths[b])
    owner = np.repeat(np.arange(K.n_faces), K.arities)
    digon_energy = float(corner[np.isin(owner, digons)].sum())
    rep = CollapseReport(
        merged_vertices=K.n_vertices - len(roots),
        removed_edges=K.n_edges - len(reps),
        removed_faces=K.n_faces - len(kept),
        digon_faces=tuple(digons),
        digon_energy=digon_energy,
        chi_before=K.euler_characteristic(),
        chi_after=K2.euler_characteristic(),
        energy_before=simplicial_energy(f, lengths),
        energy_after=simplicial_energy(f2, l2),
    )
    return K2, l2, f2, rep


def random_map(K: DeltaComplex, target, rng: np.random.Generator, scale: float = 1.0,
               decks=None) -> SimplicialMap:
    T = make_target(target)
    imgs = np.array([T.random_point(rng, scale) for _ in range(K.n_vertices)])
    return SimplicialMap(K, T, imgs, decks)


__all__ = [
    "INFINITE",
    "CollapseError",
    "CollapseReport",
    "collapse_zero_subcomplex",
    "ConformalVerdict",
    "MapError",
    "SimplicialMap",
    "StretchProfile",
    "TargetError",
    "annulus_structure",
    "constant_map",
    "edge_lengths",
    "edge_weights",
    "energy2",
    "energy_forms",
    "face_riemannian_areas",
    "gauge_transform",
    "normalize_gauge",
    "is_conformal",
    "positive_components",
    "random_map",
    "riemannian_area",
    "simplicial_area_of_map",
    "simplicial_energy",
    "simplicial_energy_edge",
    "standard_regions",
    "standard_type_map",
    "stretch_factors",
    "subdivide",
    "subdivide_map",
    "volume2",
    "volume2_metric",
]
