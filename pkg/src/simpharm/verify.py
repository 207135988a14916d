"""Executable checks of the structural properties of simplicial energy.

Every check returns a :class:`CheckResult` holding a pass flag, the
worst-case residual and the id of the vertex or face where it occurs.
Checks are pure functions of their inputs; randomised helpers take an
explicit seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .complex import DeltaComplex, complex_from_polygons
from .metric import SimplicialMetric, as_lengths, heron, neighbor_sums
from .smap import (
    SimplicialMap,
    face_riemannian_areas,
    is_conformal,
    riemannian_area,
    simplicial_area_of_map,
    simplicial_energy,
)
from .targets import Euclidean, MetricTree
from .trig import angle

TWO_PI = 2.0 * math.pi


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    witness: int | None = None
    detail: str = ""
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.residual >= 0 and not math.isinf(self.residual):
            raise ValueError(f"{self.name}: residual must be >= 0, got {self.residual}")

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "passed": bool(self.passed),
            "residual": float(self.residual) if math.isfinite(self.residual) else "infinite",
            "witness": self.witness,
            "detail": self.detail,
        }
        if self.data:
            out["data"] = self.data
        return out


# -- shared helpers ---------------------------------------------------------------------


def _star_neighbours(f: SimplicialMap, lengths: np.ndarray):
    """Per vertex: list of (lifted neighbour image, weight) over positive edges."""
    K, T = f.complex, f.target
    w = np.zeros(K.n_edges)
    pos = lengths > 0
    w[pos] = neighbor_sums(K, lengths)[pos] / (2.0 * lengths[pos])
    heads = f.lifted_heads()
    out: list[list[tuple[np.ndarray, float]]] = [[] for _ in range(K.n_vertices)]
    for e in np.flatnonzero(pos):
        t, h = K.edges[e]
        out[t].append((heads[e], w[e]))
        out[h].append((T.deck_apply(T.deck_inverse(f.decks[e]), f.images[t]), w[e]))
    return out


def _free_vertices(K: DeltaComplex, fixed) -> list[int]:
    if fixed is None:
        return sorted(K.interior_vertices)
    fixed = set(int(v) for v in fixed)
    return [v for v in range(K.n_vertices) if v not in fixed]


def _require_euclidean(f: SimplicialMap, name: str):
    if not isinstance(f.target, Euclidean):
        raise TypeError(f"{name} needs a Euclidean target, got {f.target.name}")


# -- energy versus area -------------------------------------------------------------------


def check_E_ge_A(f: SimplicialMap, l, tol: float = 1e-9) -> CheckResult:
    """``E_S >= A_S``, with equality exactly for conformal maps.

    Passes when ``E >= A - tol`` and ``|E - A| <= tol`` holds if and only if
    the stretch factors are constant (to ``tol``) on every component.
    """
    lengths = as_lengths(l)
    E = simplicial_energy(f, lengths)
    A = simplicial_area_of_map(f)
    verdict = is_conformal(f, lengths, tol)
    if math.isinf(E):
        return CheckResult("E_ge_A", True, 0.0, None, "infinite energy", {"energy": "infinite", "area": A})
    gap = E - A
    equal = abs(gap) <= tol
    consistent = equal == verdict.conformal
    ok = gap >= -tol and consistent
    detail = "equality, conformal" if equal and verdict.conformal else (
        "strict inequality" if not equal and not verdict.conformal else
        "equality case does not match conformality"
    )
    return CheckResult(
        "E_ge_A", ok, max(0.0, -gap), None, detail,
        {"energy": E, "area": A, "gap": gap, "conformal": verdict.conformal,
         "sigma_deviation": verdict.max_deviation},
    )


# -- mean value, convex hull, maximum principle ---------------------------------------------


def check_mean_value(f: SimplicialMap, l, tol: float = 1e-8, fixed=None) -> CheckResult:
    """Each free vertex image is the weighted centroid of its neighbours' images."""
    _require_euclidean(f, "check_mean_value")
    lengths = as_lengths(l)
    nbrs = _star_neighbours(f, lengths)
    worst, witness = 0.0, None
    for v in _free_vertices(f.complex, fixed):
        if not nbrs[v]:
            continue
        W = sum(w for _, w in nbrs[v])
        c = sum(w * q for q, w in nbrs[v]) / W
        r = float(np.linalg.norm(f.images[v] - c))
        if witness is None or r > worst:
            worst, witness = r, v
    return CheckResult("mean_value", worst <= tol, worst, witness)


def _hull_distance(U: np.ndarray) -> float:
    """L1 distance from the origin to the convex hull of the rows of ``U``."""
    from scipy.optimize import linprog

    k, d = U.shape
    # variables: lambda (k), s_plus (d), s_minus (d)
    c = np.concatenate([np.zeros(k), np.ones(2 * d)])
    A_eq = np.zeros((d + 1, k + 2 * d))
    A_eq[:d, :k] = U.T
    A_eq[:d, k:k + d] = np.eye(d)
    A_eq[:d, k + d:] = -np.eye(d)
    A_eq[d, :k] = 1.0
    b_eq = np.concatenate([np.zeros(d), [1.0]])
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"hull test failed: {res.message}")
    return float(res.fun)


def check_convex_hull(f: SimplicialMap, l, tol: float = 1e-9, fixed=None) -> CheckResult:
    """Each free vertex image lies in the convex hull of its neighbours' images.

    The test runs in the tangent space at ``f(v)``: the image lies in the
    (geodesic) hull exactly when the origin lies in the convex hull of the
    unit directions ``log_{f(v)} q_j``.  This covers Euclidean space and the
    hyperboloid alike.  The residual is the L1 distance from the origin to
    that hull, in units of the unit directions.
    """
    T = f.target
    if isinstance(T, MetricTree):
        raise TypeError("convex hull check needs a manifold target")
    lengths = as_lengths(l)
    nbrs = _star_neighbours(f, lengths)
    worst, witness = 0.0, None
    for v in _free_vertices(f.complex, fixed):
        if not nbrs[v]:
            continue
        p = f.images[v]
        dirs = []
        inside = False
        for q, _ in nbrs[v]:
            u = T.log(p, q)
            n = T.tangent_norm(p, u)
            if n <= 1e-14:
                inside = True
                break
            dirs.append(u / n)
        if inside:
            continue
        U = np.array(dirs)
        if T.kind == 1:
            U = _tangent_coords(T, p, U)
        r = 0.0 if U.shape[1] == 2 and _max_gap(U) < math.pi - 1e-12 else _hull_distance(U)
        if witness is None or r > worst:
            worst, witness = r, v
    return CheckResult("convex_hull", worst <= tol, worst, witness)


def _max_gap(U: np.ndarray) -> float:
    """Largest angular gap between planar unit directions (``< pi`` iff 0 is inside)."""
    th = np.sort(np.arctan2(U[:, 1], U[:, 0]))
    gaps = np.diff(np.concatenate([th, [th[0] + 2.0 * math.pi]]))
    return float(gaps.max())


def _mdot(u, v) -> float:
    return float(-u[0] * v[0] + np.dot(u[1:], v[1:]))


def _tangent_coords(T, p, U):
    B = T.tangent_basis(p)
    return np.array([[_mdot(u, b) for b in B] for u in U])


def check_max_principle(f: SimplicialMap, l=None, fixed=None, tol: float = 1e-9) -> CheckResult:
    """Interior values of a real-valued harmonic map lie strictly inside the boundary range.

    ``fixed`` lists the boundary vertices of the subcomplex (defaults to the
    boundary of the complex).  An interior value within ``tol`` of a bound is
    a tie and fails strictness; the detail string says which.
    """
    _require_euclidean(f, "check_max_principle")
    if f.target.dim != 1:
        raise TypeError("maximum principle check needs a real-valued map (euclidean(1))")
    K = f.complex
    x = f.images[:, 0]
    bnd = sorted(K.boundary_vertices) if fixed is None else sorted(set(int(v) for v in fixed))
    inner = _free_vertices(K, bnd)
    if not bnd or not inner:
        return CheckResult("max_principle", True, 0.0, None, "no interior or no boundary, principle vacuous")
    lo, hi = float(x[bnd].min()), float(x[bnd].max())
    if float(x.max() - x.min()) <= tol:
        return CheckResult("max_principle", True, 0.0, None, "constant, principle vacuous")
    xi = x[inner]
    over = np.maximum(xi - hi, lo - xi)
    k = int(np.argmax(over))
    residual = max(0.0, float(over[k]))
    ties = [inner[j] for j in np.flatnonzero(np.abs(over) <= tol)]
    ok = bool((over < -tol).all())
    detail = "strictly inside" if ok else ("tie with a boundary bound" if residual <= tol else "interior extremum")
    return CheckResult("max_principle", ok, residual, inner[k], detail,
                       {"boundary_min": lo, "boundary_max": hi, "ties": ties})


# -- area bounds ------------------------------------------------------------------------------


def check_area_bound(f: SimplicialMap, a: float | None = None, l=None, tol: float = 1e-6,
                     quad_tol: float = 1e-9) -> CheckResult:
    """Riemannian area against ``2 pi |chi| / a`` and, on quad meshes, ``E_S / 2``.

    ``a`` defaults to minus the target's curvature bound.  With ``a <= 0``
    or a domain with boundary the first bound does not apply and is
    reported as vacuous.  The quad bound
    needs the domain metric ``l``.
    """
    K, T = f.complex, f.target
    if a is None:
        k = T.curvature_upper_bound()
        a = -k if math.isfinite(k) else math.inf
    area = riemannian_area(f)
    faces = face_riemannian_areas(f)
    witness = int(np.argmax(faces)) if faces.size else None
    chi = K.euler_characteristic()
    data: dict = {"area": area, "chi": chi}
    residual = 0.0
    ok = True
    notes = []
    if not K.is_closed():
        notes.append("domain has boundary, 2 pi |chi| / a bound vacuous")
    elif a > 0 and math.isfinite(a):
        bound = TWO_PI * abs(chi) / a
        data["chi_bound"] = bound
        residual = max(residual, area - bound)
        ok &= area <= bound + tol
    else:
        notes.append("2 pi |chi| / a bound vacuous")
    if K.is_quad() and l is not None:
        E = simplicial_energy(f, l)
        data["energy"] = E if math.isfinite(E) else "infinite"
        residual = max(residual, area - 0.5 * E)
        ok &= area <= 0.5 * E + quad_tol
    return CheckResult("area_bound", bool(ok), max(0.0, residual), witness, "; ".join(notes), data)


# -- angle sums and embedding ------------------------------------------------------------------


def vertex_angle_sums(f: SimplicialMap):
    """Sum of image corner angles at every vertex, and the degenerate vertices.

    Polygons are fanned from their preferred vertex.  A corner with a
    zero-length side has no angle; its vertex is reported as degenerate.
    """
    K, T = f.complex, f.target
    hyper = T.kind == 1
    sums = np.zeros(K.n_vertices)
    degenerate: set[int] = set()
    L = f.edge_lengths()
    for face, cyc in enumerate(K.faces):
        verts = K.face_vertices[face]
        n = len(cyc)
        if n == 3:
            tris = [((0, 1, 2), (L[cyc[1][0]], L[cyc[2][0]], L[cyc[0][0]]))]
        else:
            X = f.face_lifts(face)
            k0 = K.preferred_position(face)
            tris = []
            for j in range(1, n - 1):
                i1, i2 = (k0 + j) % n, (k0 + j + 1) % n
                tris.append(((k0, i1, i2), (T.distance(X[i1], X[i2]), T.distance(X[k0], X[i2]),
                                            T.distance(X[k0], X[i1]))))
        for (i, j, k), (a, b, c) in tris:
            # a is opposite corner i, b opposite j, c opposite k
            for corner, opp, s1, s2 in ((i, a, b, c), (j, b, a, c), (k, c, a, b)):
                ang = angle(opp, s1, s2, hyper)
                if math.isnan(ang):
                    degenerate.add(verts[corner])
                else:
                    sums[verts[corner]] += ang
    return sums, sorted(degenerate)


def check_vertex_angle_sums(f: SimplicialMap, mode: str = "immersion", tol: float = 1e-6) -> CheckResult:
    """Angle sums at interior vertices: ``>= 2 pi`` (immersion) or ``= 2 pi`` (embedding)."""
    if mode not in ("immersion", "embedding"):
        raise ValueError("mode must be 'immersion' or 'embedding'")
    K = f.complex
    sums, degenerate = vertex_angle_sums(f)
    inner = sorted(K.interior_vertices)
    if mode == "immersion":
        res = np.array([max(0.0, TWO_PI - sums[v]) for v in inner])
    else:
        res = np.array([abs(sums[v] - TWO_PI) for v in inner])
    k = int(np.argmax(res)) if res.size else 0
    worst = float(res[k]) if res.size else 0.0
    deg = [v for v in degenerate if v in K.interior_vertices]
    ok = worst <= tol and not deg
    detail = f"degenerate corners at vertices {deg}" if deg else ""
    return CheckResult("angle_sums", ok, worst, inner[k] if inner else None, detail,
                       {"mode": mode, "degenerate": deg})


def _orientation(T, A, B, C) -> float:
    if T.kind == 1:
        return float(np.linalg.det(np.array([A, B, C])))
    return float((B[0] - A[0]) * (C[1] - A[1]) - (B[1] - A[1]) * (C[0] - A[0]))


def bad_loops(f: SimplicialMap) -> list[tuple[int, ...]]:
    """Edges and edge pairs whose union is a loop with trivial image holonomy."""
    K, T = f.complex, f.target
    out = []
    by_pair: dict[tuple[int, int], list[int]] = {}
    for e, (t, h) in enumerate(K.edges):
        if t == h:
            if T.deck_is_identity(f.decks[e]):
                out.append((e,))
        else:
            by_pair.setdefault((min(t, h), max(t, h)), []).append(e)
    for (u, _), es in by_pair.items():
        for i, e1 in enumerate(es):
            for e2 in es[i + 1:]:
                g1 = f.decks[e1] if K.edges[e1][0] == u else T.deck_inverse(f.decks[e1])
                g2 = f.decks[e2] if K.edges[e2][0] == u else T.deck_inverse(f.decks[e2])
                if T.deck_is_identity(T.deck_compose(g1, T.deck_inverse(g2))):
                    out.append((e1, e2))
    return out


def check_embedding(f: SimplicialMap, tol: float = 1e-6) -> CheckResult:
    """Numerical embedding test for maps of surfaces into 2-dimensional targets.

    Passes iff (i) no image edge has zero length, (ii) every image triangle
    (polygons fanned from the preferred vertex) is nondegenerate and all have
    the same orientation, (iii) interior angle sums equal ``2 pi`` within
    ``tol`` and (iv) no edge or pair of edges closes a loop with trivial
    holonomy.
    """
    K, T = f.complex, f.target
    if T.dim != 2 or isinstance(T, MetricTree):
        raise TypeError("embedding check needs a 2-dimensional manifold target")
    L = f.edge_lengths()
    fails = []
    zero = np.flatnonzero(L <= 0.0)
    if zero.size:
        fails.append(f"(i) edge {int(zero[0])} has zero image length")
    signs = []
    witness = None
    for face, cyc in enumerate(K.faces):
        X = f.face_lifts(face)
        k0 = K.preferred_position(face)
        n = len(cyc)
        for j in range(1, n - 1):
            signs.append((face, _orientation(T, X[k0], X[(k0 + j) % n], X[(k0 + j + 1) % n])))
    vals = np.array([s for _, s in signs])
    if vals.size and not ((vals > 0).all() or (vals < 0).all()):
        majority = 1.0 if (vals > 0).sum() >= (vals < 0).sum() else -1.0
        bad = next(fc for fc, s in signs if not s * majority > 0)
        witness = bad
        fails.append(f"(ii) face {bad} is degenerate or inverted")
    angles = check_vertex_angle_sums(f, "embedding", tol)
    if not angles.passed:
        fails.append(f"(iii) angle sum off by {angles.residual:.3g} at vertex {angles.witness}")
        witness = angles.witness if witness is None else witness
    loops = bad_loops(f)
    if loops:
        fails.append(f"(iv) edges {loops[0]} bound a null-homotopic loop")
    return CheckResult("embedding", not fails, angles.residual, witness, "; ".join(fails),
                       {"angle_residual": angles.residual, "n_bad_loops": len(loops)})


# -- simplicial versus cotangent weights -----------------------------------------------------------


def cotangent_weights(K: DeltaComplex, l) -> np.ndarray:
    """``(cot a + cot b) / 4`` from the Euclidean realisations of the faces.

    Returns ``nan`` on edges touching a degenerate triangle.
    """
    if not K.is_triangulation():
        raise ValueError("cotangent weights need a triangulation")
    lengths = as_lengths(l)
    w = np.zeros(K.n_edges)
    for cyc in K.faces:
        es = [e for e, _ in cyc]
        a, b, c = lengths[es]
        area4 = 4.0 * heron(a, b, c)
        for k in range(3):
            e = es[k]
            x, y = lengths[es[(k + 1) % 3]], lengths[es[(k + 2) % 3]]
            opp = lengths[e]
            w[e] += (x * x + y * y - opp * opp) / area4 / 4.0 if area4 > 0 else math.nan
    return w


def flipped_planar_instance(rng: np.random.Generator, n_interior: int = 8, n_boundary: int = 8,
                            flips: int = 6):
    """Random Delaunay disk followed by random edge flips of convex quads.

    Flips destroy the Delaunay property, which is what produces obtuse
    angle pairs and negative cotangent weights.  Returns
    ``(complex, metric, positions, fixed vertex list)``.
    """
    from scipy.spatial import Delaunay

    ang = np.sort(rng.uniform(0, TWO_PI, n_boundary))
    bnd = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    r = 0.85 * np.sqrt(rng.uniform(0, 1, n_interior))
    t = rng.uniform(0, TWO_PI, n_interior)
    pts = np.vstack([bnd, np.stack([r * np.cos(t), r * np.sin(t)], axis=1)])
    tris = [list(s) for s in Delaunay(pts).simplices]

    def orient(s):
        a, b, c = pts[s]
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    tris = [s if orient(s) > 0 else [s[0], s[2], s[1]] for s in tris]
    for _ in range(flips):
        owner: dict[tuple[int, int], int] = {}
        shared = []
        for i, s in enumerate(tris):
            for k in range(3):
                u, v = s[k], s[(k + 1) % 3]
                if (v, u) in owner:
                    shared.append((owner[(v, u)], i, u, v))
                owner[(u, v)] = i
        rng.shuffle(shared)
        for i, j, u, v in shared:
            a = next(x for x in tris[i] if x not in (u, v))
            b = next(x for x in tris[j] if x not in (u, v))
            # triangle i contains v -> u, triangle j contains u -> v
            t1, t2 = [a, b, u], [b, a, v]
            if orient(t1) > 1e-9 and orient(t2) > 1e-9:
                tris[i], tris[j] = t1, t2
                break
    K = complex_from_polygons([tuple(int(x) for x in s) for s in tris], n_vertices=len(pts))
    lengths = np.linalg.norm(pts[K.heads] - pts[K.tails], axis=1)
    return K, SimplicialMetric(lengths), pts, sorted(K.boundary_vertices)


@dataclass
class WeightComparison:
    instances: int
    skipped: int
    simplicial_violations: int
    cotangent_violations: int
    negative_cotangent_instances: int
    witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "instances": self.instances,
            "skipped": self.skipped,
            "simplicial_violations": self.simplicial_violations,
            "cotangent_violations": self.cotangent_violations,
            "negative_cotangent_instances": self.negative_cotangent_instances,
            "n_witnesses": len(self.witnesses),
        }


def compare_weights(n_instances: int = 100, seed: int = 0, n_interior: int = 5, n_boundary: int = 8,
                    flips: int = 30, tol: float = 1e-9, keep_witnesses: int = 1) -> WeightComparison:
    """Solve random Dirichlet problems with simplicial and with cotangent weights.

    Boundary vertices are pinned to random points of the unit circle (in
    their cyclic order) and the interior is solved exactly.  Each solution is tested with
    :func:`check_convex_hull`.  Instances with a degenerate triangle are
    skipped.  Cotangent violations are kept as ``(complex, metric, images,
    fixed, vertex)`` witnesses.
    """
    from .solver import solve_dirichlet, simplicial_weights

    rng = np.random.default_rng(seed)
    target = Euclidean(2)
    out = WeightComparison(0, 0, 0, 0, 0)
    for _ in range(n_instances):
        K, l, pts, fixed = flipped_planar_instance(rng, n_interior, n_boundary, flips)
        cot = cotangent_weights(K, l)
        if not np.isfinite(cot).all():
            out.skipped += 1
            continue
        out.instances += 1
        interior = np.setdiff1d(np.arange(K.n_edges), sorted(K.boundary_edges))
        if (cot[interior] < 0).any():
            out.negative_cotangent_instances += 1
        # boundary data on the circle at fresh angles, in the same cyclic
        # order; pinning the domain positions themselves would make the
        # cotangent solution the identity, which is always embedded
        start = pts.copy()
        order = np.argsort(np.arctan2(pts[fixed, 1], pts[fixed, 0]))
        ang = np.sort(rng.uniform(0, TWO_PI, len(fixed)))
        start[np.asarray(fixed)[order]] = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        Xs = solve_dirichlet(K, simplicial_weights(K, l), start, fixed)
        if not check_convex_hull(SimplicialMap(K, target, Xs, None), l, tol, fixed).passed:
            out.simplicial_violations += 1
        Xc = solve_dirichlet(K, cot, start, fixed)
        # the hull test only uses neighbour sets, so any positive metric will do
        res = check_convex_hull(SimplicialMap(K, target, Xc, None), l, tol, fixed)
        if not res.passed:
            out.cotangent_violations += 1
            if len(out.witnesses) < keep_witnesses:
                out.witnesses.append({"complex": K, "metric": l, "images": Xc, "fixed": fixed,
                                      "weights": cot, "vertex": res.witness, "residual": res.residual})
    return out


__all__ = [
    "CheckResult",
    "WeightComparison",
    "bad_loops",
    "check_E_ge_A",
    "check_area_bound",
    "check_convex_hull",
    "check_embedding",
    "check_max_principle",
    "check_mean_value",
    "check_vertex_angle_sums",
    "compare_weights",
    "cotangent_weights",
    "flipped_planar_instance",
    "vertex_angle_sums",
]
