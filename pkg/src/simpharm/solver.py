"""Gradient flow of the simplicial energy and the algorithms built on it.

The flow is discretised as Riemannian gradient descent: every free vertex
moves by ``exp_p(-step * grad)``.  Trial steps come from the Barzilai-Borwein
rule and are backtracked until the Armijo condition holds, so every accepted
step strictly lowers the energy.  Energy changes are evaluated from the
displacements themselves (``energy_delta``), which keeps the monotonicity
test meaningful far below the rounding level of the energy.

Edges of length zero carry no weight.  Their endpoints must have the same
image, so vertices joined by zero-length edges move together as one rigid
cluster.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels as kern
from .metric import SimplicialMetric, as_lengths, induced_quasimetric, neighbor_sums
from .smap import INFINITE, SimplicialMap, simplicial_area_of_map, simplicial_energy
from .targets import MetricTree

CONVERGED = "converged"
MAX_ITERS = "max_iters"
INFINITE_ENERGY = "infinite_energy"
STALLED = "stalled"


class FlowError(ValueError):
    """Raised when a flow cannot be started."""


class InfiniteEnergyError(FlowError):
    pass


class UniquenessRefused(FlowError):
    """Raised when uniqueness is not expected for the target."""


@dataclass(frozen=True)
class FlowConfig:
    grad_tol: float = 1e-8
    max_iters: int = 100_000
    initial_step: float | None = None
    shrink: float = 0.5
    armijo: float = 1e-4
    min_step: float = 1e-16
    fixed_vertices: frozenset[int] = frozenset()
    barzilai_borwein: bool = True

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if not 0 < self.armijo < 1:
            raise ValueError("armijo constant must lie in (0, 1)")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if self.initial_step is not None and not self.initial_step > 0:
            raise ValueError("initial_step must be positive")
        object.__setattr__(self, "fixed_vertices", frozenset(int(v) for v in self.fixed_vertices))

    def replace(self, **kw) -> "FlowConfig":
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d.update(kw)
        return FlowConfig(**d)


@dataclass
class FlowReport:
    energies: list[float] = field(default_factory=list)
    grad_norms: list[float] = field(default_factory=list)
    steps: list[float] = field(default_factory=list)
    reason: str = CONVERGED
    iterations: int = 0
    monitor: list[float] = field(default_factory=list)

    @property
    def final_energy(self) -> float:
        return self.energies[-1] if self.energies else math.nan

    def is_monotone(self) -> bool:
        e = self.energies
        return all(b <= a for a, b in zip(e[:-1], e[1:]))

    def to_json(self) -> dict:
        return {
            "reason": self.reason,
            "iterations": self.iterations,
            "final_energy": _json_float(self.final_energy),
            "final_grad_norm": _json_float(self.grad_norms[-1]) if self.grad_norms else None,
            "monotone": self.is_monotone(),
        }

    def csv_rows(self):
        for k, e in enumerate(self.energies):
            g = self.grad_norms[k] if k < len(self.grad_norms) else math.nan
            s = self.steps[k - 1] if 0 < k <= len(self.steps) else 0.0
            if self.monitor:
                yield k, e, g, s, self.monitor[k]
            else:
                yield k, e, g, s


def _json_float(x: float):
    if x is None or math.isnan(x):
        return None
    if math.isinf(x):
        return "infinite"
    return float(x)


# -- the energy as a function of vertex positions ------------------------------------


class EnergyProblem:
    """Energy ``sum w_e d(x_t, g_e x_h)^2`` over positive-length edges.

    Vertices are grouped into clusters joined by zero-length edges; each
    cluster has a root ``r`` and every member satisfies ``x_v = h_v x_r``.
    """

    def __init__(self, f: SimplicialMap, l, fixed=()):
        T = f.target
        if isinstance(T, MetricTree) or T.kind is None:
            raise FlowError("gradient flow needs a smooth manifold target")
        K = f.complex
        lengths = as_lengths(l)
        if lengths.size != K.n_edges:
            raise FlowError("metric size does not match the complex")
        L = f.edge_lengths()
        if ((lengths == 0) & (L > 0)).any():
            raise InfiniteEnergyError("a zero-length edge has an image of positive length")
        self.f = f
        self.target = T
        self.kind = T.kind
        pos = lengths > 0
        self.edges = np.flatnonzero(pos)
        self.w = neighbor_sums(K, lengths)[pos] / (2.0 * lengths[pos])
        self.tails = K.tails[pos]
        self.heads = K.heads[pos]
        self.action = T.deck_action([f.decks[e] for e in self.edges])
        self._build_clusters(K, lengths, f, fixed)

    def _build_clusters(self, K, lengths, f, fixed):
        T = self.target
        nv = K.n_vertices
        adj: list[list[tuple[int, int, int]]] = [[] for _ in range(nv)]
        for e in np.flatnonzero(lengths == 0):
            t, h = K.edges[e]
            adj[t].append((h, int(e), 1))
            adj[h].append((t, int(e), -1))
        root = np.arange(nv)
        hv: list = [T.deck_identity()] * nv
        seen = np.zeros(nv, dtype=bool)
        for r in range(nv):
            if seen[r]:
                continue
            seen[r] = True
            stack = [r]
            while stack:
                u = stack.pop()
                for v, e, s in adj[u]:
                    if seen[v]:
                        continue
                    seen[v] = True
                    g = f.decks[e]
                    # x_t = g x_h along a zero edge
                    hv[v] = T.deck_compose(T.deck_inverse(g), hv[u]) if s > 0 else T.deck_compose(g, hv[u])
                    root[v] = r
                    stack.append(v)
        self.root = root
        self.roots = np.unique(root)
        fixed_roots = {int(root[v]) for v in fixed}
        self.free_roots = np.array([r for r in self.roots if r not in fixed_roots], dtype=np.intp)
        self.members = np.flatnonzero(root != np.arange(nv))
        self.member_action = T.deck_action([hv[v] for v in self.members])
        self.inactive = ~np.isin(np.arange(nv), self.free_roots)
        # Jacobi preconditioner: 2 * total incident weight of each cluster
        diag = np.zeros(nv)
        np.add.at(diag, root[self.tails], 2.0 * self.w)
        np.add.at(diag, root[self.heads], 2.0 * self.w)
        diag[diag == 0] = 1.0
        self.diag = diag

    # positions of all vertices given the roots' positions
    def expand(self, X: np.ndarray) -> np.ndarray:
        if self.members.size:
            X = X.copy()
            Y = self.member_action.apply(X[self.root[self.members]])
            X[self.members] = np.array([self.target.project(y) for y in Y])
        return X

    def energy_grad(self, X: np.ndarray):
        P = X[self.tails]
        Q = self.action.apply(X[self.heads])
        E, gP, gQ = kern.energy_grad(self.kind, P, Q, self.w)
        G = np.zeros_like(X)
        kern.scatter_add(G, self.tails, gP)
        kern.scatter_add(G, self.heads, self.action.pull(gQ))
        return E, G

    def vertex_grad(self, X: np.ndarray) -> np.ndarray:
        return self.energy_grad(X)[1]

    def cluster_grad(self, G: np.ndarray) -> np.ndarray:
        """Sum member gradients into their roots; zero on fixed clusters."""
        if self.members.size:
            G = G.copy()
            kern.scatter_add(G, self.root[self.members], self.member_action.pull(G[self.members]))
            G[self.members] = 0.0
        G[self.inactive] = 0.0
        return G

    def energy(self, X: np.ndarray) -> float:
        return self.energy_grad(X)[0]

    def delta(self, X: np.ndarray, dX: np.ndarray) -> float:
        return kern.energy_delta(
            self.kind,
            X[self.tails],
            self.action.apply(X[self.heads]),
            dX[self.tails],
            self.action.push(dX[self.heads]),
            self.w,
        )

    def norms(self, X: np.ndarray, G: np.ndarray) -> np.ndarray:
        if self.kind == kern.HYPERBOLOID:
            return np.sqrt(np.maximum(-G[:, 0] ** 2 + np.einsum("ij,ij->i", G[:, 1:], G[:, 1:]), 0.0))
        return np.sqrt(np.einsum("ij,ij->i", G, G))

    def move(self, X: np.ndarray, G: np.ndarray, step: float):
        """Move free roots by ``exp(-step * G)``; return new points and displacement."""
        V = -step * G[self.free_roots]
        new_r, d_r = self.target.exp_many(X[self.free_roots], V)
        Xn = X.copy()
        Xn[self.free_roots] = new_r
        Xn = self.expand(Xn)
        return Xn, Xn - X

    def slope_at(self, X: np.ndarray, G: np.ndarray, Z: np.ndarray, step: float) -> float:
        """Derivative of ``E(exp_X(-a Z))`` at ``a = step``.

        ``G`` is the cluster gradient at the moved point.
        """
        fr = self.free_roots
        V = -Z[fr]
        if self.kind == kern.HYPERBOLOID:
            P = X[fr]
            n = np.sqrt(np.maximum(-V[:, 0] ** 2 + np.einsum("ij,ij->i", V[:, 1:], V[:, 1:]), 0.0))
            t = step * n
            vel = (n * np.sinh(t))[:, None] * P + np.cosh(t)[:, None] * V
        else:
            vel = V
        return _inner(self.kind, G[fr], vel)


def _finite_energy(f: SimplicialMap, l) -> float:
    E = simplicial_energy(f, l)
    if math.isinf(E):
        raise InfiniteEnergyError("the map has infinite simplicial energy")
    return E


def energy_gradient(f: SimplicialMap, l) -> np.ndarray:
    """Per-vertex Riemannian gradient of ``E_S(f, l)`` (rows of ambient coords).

    Each positive-length edge contributes ``-2 w_e log_{p(v)}(q_e)`` at both
    of its endpoints, ``q_e`` being the suitably lifted other endpoint.
    """
    _finite_energy(f, l)
    prob = EnergyProblem(f, l)
    return prob.vertex_grad(np.array(f.images))


def energy_value(f: SimplicialMap, l) -> float:
    return EnergyProblem(f, l).energy(np.array(f.images))


def finite_diff_gradient(f: SimplicialMap, l, h: float = 1e-5) -> np.ndarray:
    """Central differences of ``E_S`` along an orthonormal tangent frame per vertex."""
    T = f.target
    _finite_energy(f, l)
    X0 = np.array(f.images)
    G = np.zeros_like(X0)
    for v in range(X0.shape[0]):
        B = T.tangent_basis(X0[v])
        for b in B:
            vals = []
            for sgn in (1.0, -1.0):
                X = X0.copy()
                X[v] = T.exp(X0[v], sgn * h * b)
                vals.append(simplicial_energy(f.with_images(X), l))
            G[v] += (vals[0] - vals[1]) / (2.0 * h) * b
    return G


# -- descent ---------------------------------------------------------------------------


def _inner(kind, A: np.ndarray, B: np.ndarray) -> float:
    if kind == kern.HYPERBOLOID:
        return float(np.sum(-A[:, 0] * B[:, 0]) + np.sum(A[:, 1:] * B[:, 1:]))
    return float(np.sum(A * B))


def _initial_step(prob: EnergyProblem, cfg: FlowConfig) -> float:
    if cfg.initial_step is not None:
        return cfg.initial_step
    m = float(prob.diag.max()) if prob.diag.size else 0.0
    return 1.0 / m if m > 0 else 1.0


# predicted decrements below this fraction of E are lost in rounding
_NOISE_REL = 1e-12


def _backtrack(prob, X, Z, slope, step, cfg, E=None):
    """Shrink ``step`` until moving along ``-Z`` passes the Armijo test.

    ``slope`` is the directional derivative ``<grad, Z>``.  When the predicted
    decrease ``step * slope`` is below the rounding level of ``E``, the energy
    change is estimated by the trapezoid rule on the directional derivative
    instead (the approximate Armijo condition of Hager and Zhang), which
    needs no subtraction of nearly equal energies.
    """
    noise = _NOISE_REL * abs(E) if E is not None else 0.0
    while step >= cfg.min_step:
        Xn, dX = prob.move(X, Z, step)
        dE = prob.delta(X, dX)
        if dE <= -cfg.armijo * step * slope and dE < 0:
            return Xn, dE, step
        if step * slope <= noise:
            dphi = prob.slope_at(X, prob.cluster_grad(prob.energy_grad(Xn)[1]), Z, step)
            if dphi <= (1.0 - 2.0 * cfg.armijo) * slope:
                return Xn, 0.5 * step * (dphi - slope), step
        step *= cfg.shrink
    return None, 0.0, step


def flow_step(f: SimplicialMap, l, cfg: FlowConfig = FlowConfig()):
    """One backtracking descent step from ``cfg.initial_step``.

    Returns ``(new map, accepted step)``; the step is 0 when the gradient
    already vanishes.  Decks are never modified.
    """
    _finite_energy(f, l)
    prob = EnergyProblem(f, l, cfg.fixed_vertices)
    X = np.array(f.images)
    _, G = prob.energy_grad(X)
    G = prob.cluster_grad(G)
    gsq = float(np.sum(prob.norms(X, G) ** 2))
    if gsq == 0.0:
        return f, 0.0
    Xn, dE, step = _backtrack(prob, X, G, gsq, _initial_step(prob, cfg), cfg)
    if Xn is None:
        raise FlowError("step underflow: line search stalled")
    return f.with_images(Xn), step


def flow_to_harmonic(f: SimplicialMap, l, cfg: FlowConfig = FlowConfig(), monitor=None):
    """Flow ``f`` to a simplicial harmonic map in its homotopy class.

    Returns ``(map, FlowReport)``.  A map of zero energy, or with zero
    gradient, is returned unchanged.  A map of infinite energy is returned
    unchanged with reason ``"infinite_energy"``.

    ``monitor``, if given, is called on the map at every recorded iterate
    and its float results are kept in ``FlowReport.monitor`` (for example
    the Riemannian area of each iterate).
    """
    report = FlowReport()

    def observe(X):
        if monitor is not None:
            report.monitor.append(float(monitor(f.with_images(X))))

    E0 = simplicial_energy(f, l)
    if math.isinf(E0):
        report.energies.append(INFINITE)
        report.reason = INFINITE_ENERGY
        return f, report
    if E0 == 0.0:
        report.energies.append(0.0)
        report.grad_norms.append(0.0)
        if monitor is not None:
            report.monitor.append(float(monitor(f)))
        return f, report
    prob = EnergyProblem(f, l, cfg.fixed_vertices)
    X = np.array(f.images)
    E, G = prob.energy_grad(X)
    G = prob.cluster_grad(G)
    norms = prob.norms(X, G)
    report.energies.append(E)
    report.grad_norms.append(float(norms.max()) if norms.size else 0.0)
    observe(X)
    if report.grad_norms[-1] == 0.0:
        return f, report
    # descent along the Jacobi-preconditioned gradient Z = G / diag
    dinv = (1.0 / prob.diag)[:, None]
    step = 1.0 if cfg.initial_step is None else cfg.initial_step
    tracked = E
    moved = False
    X_prev = G_prev = None
    free = prob.free_roots
    for it in range(cfg.max_iters):
        if report.grad_norms[-1] <= cfg.grad_tol:
            report.reason = CONVERGED
            break
        Z = G * dinv
        slope = _inner(prob.kind, G[free], Z[free])
        if cfg.barzilai_borwein and X_prev is not None:
            S = (X - X_prev)[free]
            Y = (G - G_prev)[free]
            sy = _inner(prob.kind, S, Y)
            sds = _inner(prob.kind, S, S * prob.diag[free][:, None])
            if sy > 0 and sds > 0:
                step = sds / sy
        Xn, dE, acc = _backtrack(prob, X, Z, slope, step, cfg, E)
        if Xn is None:
            report.reason = STALLED
            break
        assert dE < 0, "accepted step did not lower the energy"
        moved = True
        X_prev, G_prev = X, G
        X = Xn
        tracked = tracked + dE
        E, G = prob.energy_grad(X)
        G = prob.cluster_grad(G)
        if E <= tracked:
            tracked = E
        norms = prob.norms(X, G)
        report.energies.append(tracked)
        report.grad_norms.append(float(norms.max()))
        report.steps.append(acc)
        observe(X)
        report.iterations = it + 1
        step = acc
    else:
        report.reason = CONVERGED if report.grad_norms[-1] <= cfg.grad_tol else MAX_ITERS
    if not report.is_monotone():
        raise AssertionError("energy trace is not monotone")
    return (f.with_images(X) if moved else f), report


# -- Dirichlet problems with Euclidean targets -------------------------------------------


def laplacian(K, weights: np.ndarray):
    """Sparse weighted graph Laplacian (loops ignored)."""
    from scipy.sparse import coo_matrix

    t, h = K.tails, K.heads
    keep = t != h
    t, h, w = t[keep], h[keep], np.asarray(weights, float)[keep]
    n = K.n_vertices
    rows = np.concatenate([t, h, t, h])
    cols = np.concatenate([h, t, t, h])
    vals = np.concatenate([-w, -w, w, w])
    return coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def solve_dirichlet(K, weights, images: np.ndarray, fixed: Sequence[int]) -> np.ndarray:
    """Minimise ``sum w_e |x_t - x_h|^2`` with the ``fixed`` rows of ``images`` held.

    Exact for Euclidean targets with trivial decks, where the energy is
    quadratic.  Returns the full image array.
    """
    from scipy.sparse.linalg import spsolve

    X = np.array(images, dtype=float)
    fixed = np.asarray(sorted(set(int(v) for v in fixed)), dtype=np.intp)
    free = np.setdiff1d(np.arange(K.n_vertices), fixed)
    if free.size == 0:
        return X
    Lap = laplacian(K, weights)
    A = Lap[free][:, free]
    B = Lap[free][:, fixed]
    rhs = -(B @ X[fixed])
    sol = spsolve(A.tocsc(), rhs)
    X[free] = np.asarray(sol).reshape(free.size, -1)
    return X


def simplicial_weights(K, l) -> np.ndarray:
    lengths = as_lengths(l)
    return neighbor_sums(K, lengths) / (2.0 * lengths)


# -- families -------------------------------------------------------------------------------


@dataclass
class FamilyResult:
    maps: list[SimplicialMap]
    reports: list[FlowReport]
    adjacent_distances: list[float]


def _max_vertex_distance(a: SimplicialMap, b: SimplicialMap) -> float:
    T = a.target
    return max((T.distance(p, q) for p, q in zip(a.images, b.images)), default=0.0)


def flow_family(maps: Sequence[SimplicialMap], metrics=None, cfg: FlowConfig = FlowConfig(),
                warm_start: bool = False, max_workers: int | None = None) -> FamilyResult:
    """Flow every sample of a one-parameter family of maps.

    Metrics default to each sample's induced quasi-metric.  Samples are
    independent and run on a thread pool unless ``warm_start`` is set, in
    which case sample ``s+1`` starts from the images reached for sample ``s``
    (zero-energy samples are still returned untouched).
    """
    maps = list(maps)
    if metrics is None:
        metrics = [induced_quasimetric(f.complex, f) for f in maps]
    metrics = list(metrics)
    if len(metrics) != len(maps):
        raise FlowError("one metric per family sample is required")
    for s, (f, l) in enumerate(zip(maps, metrics)):
        if math.isinf(simplicial_energy(f, l)):
            raise InfiniteEnergyError(f"family sample {s} has infinite energy")
    if warm_start:
        out = []
        prev = None
        for f, l in zip(maps, metrics):
            start = f
            if prev is not None and simplicial_energy(f, l) != 0.0:
                cand = f.with_images(prev.images)
                if not math.isinf(simplicial_energy(cand, l)):
                    start = cand
            res = flow_to_harmonic(start, l, cfg)
            out.append(res)
            prev = res[0]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            out = list(pool.map(lambda fl: flow_to_harmonic(fl[0], fl[1], cfg), zip(maps, metrics)))
    result = [m for m, _ in out]
    dists = [_max_vertex_distance(a, b) for a, b in zip(result[:-1], result[1:])]
    return FamilyResult(result, [r for _, r in out], dists)


# -- alternating minimisation over maps and metrics ------------------------------------------


@dataclass
class MetricTrace:
    areas: list[float] = field(default_factory=list)
    energy_equals_area: list[bool] = field(default_factory=list)
    reports: list[FlowReport] = field(default_factory=list)
    reason: str = CONVERGED

    def is_monotone(self) -> bool:
        return all(b <= a for a, b in zip(self.areas[:-1], self.areas[1:]))


def minimize_over_metrics(f: SimplicialMap, K=None, outer_tol: float = 1e-10,
                          cfg: FlowConfig = FlowConfig(), max_outer: int = 100):
    """Alternate ``l <- induced metric of f`` with ``f <- harmonic map for l``.

    After each metric update every stretch factor is 1, so ``E_S(f, l)``
    equals ``A_S(f)`` exactly.  Stops when ``A_S`` decreases by less than
    ``outer_tol`` (relative).  Returns ``(map, metric, MetricTrace)``.
    """
    if K is not None and K is not f.complex:
        raise FlowError("map is defined on a different complex")
    trace = MetricTrace()
    area = simplicial_area_of_map(f)
    if math.isinf(area) or math.isnan(area):
        raise FlowError("simplicial area must be finite")
    trace.areas.append(area)
    l = induced_quasimetric(f.complex, f)
    for _ in range(max_outer):
        trace.energy_equals_area.append(simplicial_energy(f, l) == simplicial_area_of_map(f))
        g, rep = flow_to_harmonic(f, l, cfg)
        trace.reports.append(rep)
        new_area = simplicial_area_of_map(g)
        if new_area > trace.areas[-1]:
            trace.reason = STALLED
            break
        f = g
        l = induced_quasimetric(f.complex, f)
        trace.areas.append(new_area)
        if trace.areas[-2] - new_area <= outer_tol * max(1.0, trace.areas[-2]):
            trace.energy_equals_area.append(simplicial_energy(f, l) == simplicial_area_of_map(f))
            trace.reason = CONVERGED
            break
    else:
        trace.reason = MAX_ITERS
    return f, SimplicialMetric(l.lengths), trace


# -- uniqueness ---------------------------------------------------------------------------------


@dataclass
class ProbeResult:
    distance: float
    reports: tuple[FlowReport, FlowReport]
    maps: tuple[SimplicialMap, SimplicialMap]


def gauge_align(a: SimplicialMap, b: SimplicialMap) -> np.ndarray:
    """Images of ``b`` re-lifted so its decks agree with ``a`` on a spanning tree."""
    K, T = a.complex, a.target
    hv: list = [T.deck_identity()] * K.n_vertices
    seen = np.zeros(K.n_vertices, dtype=bool)
    adj: list[list[tuple[int, int, int]]] = [[] for _ in range(K.n_vertices)]
    for e, (t, h) in enumerate(K.edges):
        adj[t].append((h, e, 1))
        adj[h].append((t, e, -1))
    for r in range(K.n_vertices):
        if seen[r]:
            continue
        seen[r] = True
        stack = [r]
        while stack:
            u = stack.pop()
            for v, e, s in adj[u]:
                if seen[v]:
                    continue
                seen[v] = True
                ga, gb = a.decks[e], b.decks[e]
                if s > 0:  # u is the tail: h_v = ga^-1 h_u gb
                    hv[v] = T.deck_compose(T.deck_compose(T.deck_inverse(ga), hv[u]), gb)
                else:  # u is the head: h_v = ga h_u gb^-1
                    hv[v] = T.deck_compose(T.deck_compose(ga, hv[u]), T.deck_inverse(gb))
                stack.append(v)
    return np.array([T.deck_apply(h, p) for h, p in zip(hv, b.images)])


def uniqueness_probe(f_a: SimplicialMap, f_b: SimplicialMap, l, cfg: FlowConfig = FlowConfig()):
    """Flow two maps in the same class and report their gauge-aligned distance."""
    T = f_a.target
    if f_b.complex is not f_a.complex and f_b.complex.to_json() != f_a.complex.to_json():
        raise FlowError("maps live on different complexes")
    k = T.curvature_upper_bound()
    if isinstance(T, MetricTree) or not k < 0 or math.isinf(k):
        raise UniquenessRefused(
            f"uniqueness is not claimed for {T.name}: curvature bound {k} is not negative"
            " (flat targets admit translation families of minimisers)"
        )
    ga, ra = flow_to_harmonic(f_a, l, cfg)
    gb, rb = flow_to_harmonic(f_b, l, cfg)
    imgs = gauge_align(ga, gb)
    dist = max(T.distance(p, q) for p, q in zip(ga.images, imgs))
    return ProbeResult(float(dist), (ra, rb), (ga, gb))
