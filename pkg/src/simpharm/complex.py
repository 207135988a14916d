"""Delta-complexes and polygonal decompositions of compact surfaces.

Faces are stored as cyclic sequences of directed edges ``(edge_id, sign)``
where ``sign == +1`` traverses the edge from its tail to its head.  Loops and
parallel edges are allowed, so a vertex tuple would not determine a face.

A complex is in ``"surface"`` mode (every edge lies in one or two face slots)
or ``"skeleton"`` mode (the 2-skeleton of a 3-complex, any positive number of
face slots per edge).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

SURFACE = "surface"
SKELETON = "skeleton"


class ComplexError(ValueError):
    """Raised for malformed or inconsistent complexes."""


@dataclass(frozen=True, eq=False)
class DeltaComplex:
    """Combinatorial surface with ordered vertices and oriented face cycles."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    faces: tuple[tuple[tuple[int, int], ...], ...]
    mode: str = SURFACE

    def __post_init__(self):
        if self.mode not in (SURFACE, SKELETON):
            raise ComplexError(f"unknown mode {self.mode!r}")
        nv, ne = self.n_vertices, len(self.edges)
        for e, (t, h) in enumerate(self.edges):
            if not (0 <= t < nv and 0 <= h < nv):
                raise ComplexError(f"edge {e} references a missing vertex")
        used = np.zeros(nv, dtype=bool)
        for f, cyc in enumerate(self.faces):
            if len(cyc) < 3:
                raise ComplexError(f"face {f} has fewer than 3 sides")
            for e, s in cyc:
                if not 0 <= e < ne:
                    raise ComplexError(f"face {f} references missing edge {e}")
                if s not in (1, -1):
                    raise ComplexError(f"face {f}: direction flag must be +1 or -1")
            verts = _cycle_vertices(self.edges, cyc)
            if verts is None:
                raise ComplexError(f"face {f}: edge cycle is not vertex-consistent")
            used[list(verts)] = True
        for t, h in self.edges:
            used[t] = used[h] = True
        if not used.all():
            raise ComplexError("vertex ids must be dense: some vertex is unused")
        counts = self.slot_counts
        if self.mode == SURFACE:
            bad = np.flatnonzero((counts < 1) | (counts > 2))
            if bad.size:
                e = int(bad[0])
                raise ComplexError(
                    f"surface mode: edge {e} lies in {int(counts[e])} face slots"
                )
        elif (counts < 1).any():
            raise ComplexError("skeleton mode: every edge must lie in some face")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @cached_property
    def tails(self) -> np.ndarray:
        return np.array([t for t, _ in self.edges], dtype=np.intp)

    @cached_property
    def heads(self) -> np.ndarray:
        return np.array([h for _, h in self.edges], dtype=np.intp)

    @cached_property
    def face_vertices(self) -> tuple[tuple[int, ...], ...]:
        """Vertex sequence of each face; entry ``k`` is the start of side ``k``."""
        return tuple(_cycle_vertices(self.edges, cyc) for cyc in self.faces)

    @cached_property
    def arities(self) -> np.ndarray:
        return np.array([len(c) for c in self.faces], dtype=np.intp)

    @cached_property
    def edge_slots(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """For each edge, the ``(face, position)`` slots it occupies."""
        slots: list[list[tuple[int, int]]] = [[] for _ in self.edges]
        for f, cyc in enumerate(self.faces):
            for k, (e, _) in enumerate(cyc):
                slots[e].append((f, k))
        return tuple(tuple(s) for s in slots)

    @cached_property
    def slot_counts(self) -> np.ndarray:
        return np.array([len(s) for s in self.edge_slots], dtype=np.intp)

    @cached_property
    def boundary_edges(self) -> frozenset[int]:
        return frozenset(int(e) for e in np.flatnonzero(self.slot_counts == 1))

    @cached_property
    def boundary_vertices(self) -> frozenset[int]:
        out = set()
        for e in self.boundary_edges:
            out.update(self.edges[e])
        return frozenset(out)

    @cached_property
    def corners(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge ids of the cyclically adjacent side pairs of every face.

        Row ``c`` of the pair ``(first, second)`` is the corner between side
        ``k`` and side ``k+1`` of some face, in face order.
        """
        a, b = [], []
        for cyc in self.faces:
            n = len(cyc)
            for k in range(n):
                a.append(cyc[k][0])
                b.append(cyc[(k + 1) % n][0])
        return np.array(a, dtype=np.intp), np.array(b, dtype=np.intp)

    @cached_property
    def neighbor_length_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Pairs ``(edge, neighbour_edge)`` over all in-face neighbours of all slots.

        Summing neighbour lengths grouped by ``edge`` gives the numerator of
        the edge weight.
        """
        a, b = self.corners
        return np.concatenate([a, b]), np.concatenate([b, a])

    def preferred_vertex(self, face: int) -> int:
        """Minimum vertex id on the boundary of ``face``."""
        return min(self.face_vertices[face])

    def preferred_position(self, face: int) -> int:
        verts = self.face_vertices[face]
        return verts.index(min(verts))

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def is_triangulation(self) -> bool:
        return bool((self.arities == 3).all())

    def is_quad(self) -> bool:
        return bool((self.arities == 4).all())

    def is_closed(self) -> bool:
        return self.mode == SURFACE and not self.boundary_edges

    def star(self, v: int) -> "Star":
        if not 0 <= v < self.n_vertices:
            raise ComplexError(f"vertex {v} does not exist")
        faces = tuple(f for f, vs in enumerate(self.face_vertices) if v in vs)
        edges = sorted({e for f in faces for e, _ in self.faces[f]})
        verts = sorted({u for f in faces for u in self.face_vertices[f]})
        return Star(v, faces, tuple(edges), tuple(verts), self.link(v))

    def link(self, v: int) -> "Link":
        """Link of ``v`` as a graph on the edge ends at ``v``.

        Nodes are ``(edge, end)`` with ``end`` 0 for the tail and 1 for the
        head; each corner of a face at ``v`` contributes one arc.  An interior
        surface vertex has a link that is a single cycle.
        """
        nodes = []
        for e, (t, h) in enumerate(self.edges):
            if t == v:
                nodes.append((e, 0))
            if h == v:
                nodes.append((e, 1))
        arcs = []
        for f, cyc in enumerate(self.faces):
            verts = self.face_vertices[f]
            n = len(cyc)
            for k in range(n):
                if verts[k] != v:
                    continue
                e_in, s_in = cyc[(k - 1) % n]
                e_out, s_out = cyc[k]
                arcs.append(((e_in, 1 if s_in > 0 else 0), (e_out, 0 if s_out > 0 else 1), f, k))
        index = {nd: i for i, nd in enumerate(nodes)}
        parent = list(range(len(nodes)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        deg = [0] * len(nodes)
        for a, b, _, _ in arcs:
            ia, ib = index[a], index[b]
            deg[ia] += 1
            deg[ib] += 1
            parent[find(ia)] = find(ib)
        ncomp = len({find(i) for i in range(len(nodes))}) if nodes else 0
        is_cycle = bool(nodes) and ncomp == 1 and all(d == 2 for d in deg)
        return Link(v, tuple(nodes), tuple(arcs), ncomp == 1, ncomp, is_cycle)

    def is_interior_vertex(self, v: int) -> bool:
        return self.mode == SURFACE and self.link(v).is_cycle

    @cached_property
    def interior_vertices(self) -> frozenset[int]:
        return frozenset(v for v in range(self.n_vertices) if self.is_interior_vertex(v))

    def to_json(self) -> dict:
        return {
            "vertices": self.n_vertices,
            "edges": [list(e) for e in self.edges],
            "faces": [[[e, s] for e, s in cyc] for cyc in self.faces],
            "mode": self.mode,
        }

    @classmethod
    def from_json(cls, data: dict) -> "DeltaComplex":
        try:
            return build_complex(
                data["edges"],
                data["faces"],
                mode=data.get("mode", SURFACE),
                n_vertices=data.get("vertices"),
            )
        except (KeyError, TypeError) as exc:
            raise ComplexError(f"malformed complex document: {exc}") from exc


@dataclass(frozen=True)
class Link:
    vertex: int
    nodes: tuple[tuple[int, int], ...]
    arcs: tuple
    connected: bool
    n_components: int
    is_cycle: bool

    @property
    def length(self) -> int:
        return len(self.arcs)


@dataclass(frozen=True)
class Star:
    vertex: int
    faces: tuple[int, ...]
    edges: tuple[int, ...]
    vertices: tuple[int, ...]
    link: Link


def _cycle_vertices(edges, cyc):
    verts = []
    for e, s in cyc:
        t, h = edges[e]
        start, end = (t, h) if s > 0 else (h, t)
        verts.append((start, end))
    n = len(verts)
    for k in range(n):
        if verts[k][1] != verts[(k + 1) % n][0]:
            return None
    return tuple(v[0] for v in verts)


def build_complex(
    edge_list: Iterable[Sequence[int]],
    face_list: Iterable[Iterable[Sequence[int]]],
    mode: str = SURFACE,
    n_vertices: int | None = None,
) -> DeltaComplex:
    """Validate and build a :class:`DeltaComplex` from edge and face lists."""
    edges = tuple((int(t), int(h)) for t, h in edge_list)
    faces = tuple(tuple((int(e), int(s)) for e, s in cyc) for cyc in face_list)
    if n_vertices is None:
        n_vertices = 1 + max((max(e) for e in edges), default=-1)
    return DeltaComplex(int(n_vertices), edges, faces, mode)


def complex_from_polygons(
    polygons: Iterable[Sequence[int]], mode: str = SURFACE, n_vertices: int | None = None
) -> DeltaComplex:
    """Build a complex from vertex cycles, one edge per unordered vertex pair.

    Edges are oriented from the smaller to the larger vertex id.  Only usable
    when no two distinct edges join the same pair of vertices.
    """
    index: dict[tuple[int, int], int] = {}
    edges: list[tuple[int, int]] = []
    faces = []
    for poly in polygons:
        cyc = []
        n = len(poly)
        for k in range(n):
            a, b = int(poly[k]), int(poly[(k + 1) % n])
            if a == b:
                raise ComplexError("polygon with a repeated consecutive vertex")
            key = (min(a, b), max(a, b))
            if key not in index:
                index[key] = len(edges)
                edges.append(key)
            cyc.append((index[key], 1 if a < b else -1))
        faces.append(cyc)
    return build_complex(edges, faces, mode=mode, n_vertices=n_vertices)


def euler_characteristic(K: DeltaComplex) -> int:
    return K.euler_characteristic()


# -- subdivisions ------------------------------------------------------------


@dataclass(frozen=True)
class Subdivision:
    """A subdivided complex plus the provenance of its new cells.

    ``midpoint[e]`` is the vertex inserted on parent edge ``e``;
    ``halves[e] = (first, second)`` are the child edges ``tail -> midpoint``
    and ``midpoint -> head``.  ``centers[f]`` is the vertex inserted in parent
    face ``f`` (quad scheme only, else -1).  ``inner[k] = (face, a, b)`` says
    child edge ``inner_ids[k]`` joins the point inserted for side ``a`` of
    parent ``face`` to that for side ``b`` (``b == -1`` means the centre).
    """

    parent: DeltaComplex
    complex: DeltaComplex
    kind: str
    midpoint: np.ndarray
    halves: np.ndarray
    centers: np.ndarray
    inner_ids: np.ndarray
    inner: tuple[tuple[int, int, int], ...] = field(repr=False)


def _half_in(halves, e, s):
    # child directed edge of (e, s) that ends at the far vertex
    return (int(halves[e, 1]), 1) if s > 0 else (int(halves[e, 0]), -1)


def _half_out(halves, e, s):
    # child directed edge of (e, s) that starts at the near vertex
    return (int(halves[e, 0]), 1) if s > 0 else (int(halves[e, 1]), -1)


def _split_edges(K: DeltaComplex):
    nv, ne = K.n_vertices, K.n_edges
    midpoint = nv + np.arange(ne, dtype=np.intp)
    halves = np.stack([2 * np.arange(ne), 2 * np.arange(ne) + 1], axis=1).astype(np.intp)
    edges: list[tuple[int, int]] = []
    for e, (t, h) in enumerate(K.edges):
        m = int(midpoint[e])
        edges.append((t, m))
        edges.append((m, h))
    return midpoint, halves, edges


def triangle_subdivision(K: DeltaComplex) -> Subdivision:
    """Split every triangle into four by joining the midpoints of its sides."""
    if not K.is_triangulation():
        raise ComplexError("triangle subdivision needs a triangulation")
    midpoint, halves, edges = _split_edges(K)
    faces = []
    inner = []
    inner_ids = []
    for f, cyc in enumerate(K.faces):
        base = len(edges)
        ids = []
        for k in range(3):
            a = int(midpoint[cyc[k][0]])
            b = int(midpoint[cyc[(k + 1) % 3][0]])
            edges.append((a, b))
            ids.append((base + k, 1))
            inner.append((f, k, (k + 1) % 3))
            inner_ids.append(base + k)
        for k in range(3):
            e_in, s_in = cyc[k]
            e_out, s_out = cyc[(k + 1) % 3]
            j, sj = ids[k]
            faces.append([_half_in(halves, e_in, s_in), _half_out(halves, e_out, s_out), (j, -sj)])
        faces.append([ids[0], ids[1], ids[2]])
    child = build_complex(edges, faces, mode=K.mode, n_vertices=K.n_vertices + K.n_edges)
    return Subdivision(
        K, child, "triangle", midpoint, halves,
        np.full(K.n_faces, -1, dtype=np.intp), np.array(inner_ids, dtype=np.intp), tuple(inner),
    )


def quad_subdivision(K: DeltaComplex) -> Subdivision:
    """Split every quadrilateral into four along the two midlines."""
    if not K.is_quad():
        raise ComplexError("quad subdivision needs a decomposition into quadrilaterals")
    midpoint, halves, edges = _split_edges(K)
    nv0 = K.n_vertices + K.n_edges
    centers = nv0 + np.arange(K.n_faces, dtype=np.intp)
    faces = []
    inner = []
    inner_ids = []
    for f, cyc in enumerate(K.faces):
        c = int(centers[f])
        base = len(edges)
        for k in range(4):
            edges.append((int(midpoint[cyc[k][0]]), c))
            inner.append((f, k, -1))
            inner_ids.append(base + k)
        for k in range(4):
            e_in, s_in = cyc[k]
            e_out, s_out = cyc[(k + 1) % 4]
            faces.append([
                _half_in(halves, e_in, s_in),
                _half_out(halves, e_out, s_out),
                (base + (k + 1) % 4, 1),
                (base + k, -1),
            ])
    child = build_complex(edges, faces, mode=K.mode, n_vertices=nv0 + K.n_faces)
    return Subdivision(
        K, child, "quad", midpoint, halves, centers,
        np.array(inner_ids, dtype=np.intp), tuple(inner),
    )


def subdivided_lengths(sub: Subdivision, lengths) -> np.ndarray:
    """Edge lengths of the child complex under conformal subdivision.

    Half edges get half the parent length.  In a triangle the midline from
    side ``k`` to side ``k+1`` is parallel to side ``k+2`` and gets half its
    length.  In a quadrilateral with sides ``l0..l3`` the two halves of the
    cut through the midpoints of sides 1 and 3 get ``(l0+l2)/4`` each, and
    the halves of the other cut get ``(l1+l3)/4``.
    """
    l = np.asarray(lengths, dtype=float)
    K = sub.parent
    out = np.empty(sub.complex.n_edges)
    out[sub.halves[:, 0]] = 0.5 * l
    out[sub.halves[:, 1]] = 0.5 * l
    for j, (f, a, b) in zip(sub.inner_ids, sub.inner):
        cyc = K.faces[f]
        if sub.kind == "triangle":
            out[j] = 0.5 * l[cyc[3 - a - b][0]]
        else:
            out[j] = 0.25 * (l[cyc[(a + 1) % 4][0]] + l[cyc[(a + 3) % 4][0]])
    return out


def conformal_subdivide_triangle(K: DeltaComplex, l):
    """Conformal subdivision of a triangulation and its (quasi-)metric.

    Returns ``(K', l')``; simplicial area is unchanged.
    """
    from .metric import SimplicialMetric

    sub = triangle_subdivision(K)
    return sub.complex, SimplicialMetric(subdivided_lengths(sub, _lengths(l)))


def conformal_subdivide_quad(K: DeltaComplex, l):
    """Conformal subdivision of a quadrilateral decomposition and its metric."""
    from .metric import SimplicialMetric

    sub = quad_subdivision(K)
    return sub.complex, SimplicialMetric(subdivided_lengths(sub, _lengths(l)))


def _lengths(l):
    return np.asarray(getattr(l, "lengths", l), dtype=float)


def annulus_quad_complex(n: int) -> DeltaComplex:
    """Standard subdivision of ``S^1 x I`` into ``n`` quadrilaterals.

    Vertices ``0..n-1`` lie on the bottom circle and ``n..2n-1`` on the top.
    Edges ``0..n-1`` are bottom arcs ``i -> i+1``, ``n..2n-1`` top arcs and
    ``2n..3n-1`` the rungs ``i -> n+i``.
    """
    if n < 3:
        raise ComplexError("an annulus needs at least 3 quadrilaterals")
    edges = []
    for i in range(n):
        edges.append((i, (i + 1) % n))
    for i in range(n):
        edges.append((n + i, n + (i + 1) % n))
    for i in range(n):
        edges.append((i, n + i))
    faces = []
    for i in range(n):
        j = (i + 1) % n
        faces.append([(i, 1), (2 * n + j, 1), (n + i, -1), (2 * n + i, -1)])
    return build_complex(edges, faces)


def collapse_zero_subcomplex(K: DeltaComplex, l, f, tol: float = 1e-12, report: bool = False):
    """Collapse the zero-length subcomplex of ``(K, l)`` together with ``f``.

    The work needs the map's homotopy data and lives in
    :func:`simpharm.smap.collapse_zero_subcomplex`; see there.
    """
    from .smap import collapse_zero_subcomplex as _collapse

    return _collapse(K, l, f, tol=tol, report=report)
