"""Finite metric trees (CAT(0) graphs) as targets for zero-energy maps.

A point is ``[edge_id, offset]`` with ``0 <= offset <= length(edge)``,
measured from the edge's first endpoint.  Only distances and geodesics are
provided: the distance is not smooth at the vertices, so there is no log or
exp map and no gradient flow into trees.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np

from .base import GeodesicTarget, TargetError


class MetricTree(GeodesicTarget):
    supports_log = False
    kind = None
    dim = 1
    ambient_dim = 2

    def __init__(self, edges, lengths):
        edges = [(int(u), int(v)) for u, v in edges]
        lengths = np.asarray(lengths, dtype=float).reshape(-1)
        if not edges:
            raise TargetError("a metric tree needs at least one edge")
        if len(lengths) != len(edges):
            raise TargetError("one length per tree edge is required")
        if not (np.isfinite(lengths).all() and (lengths > 0).all()):
            raise TargetError("tree edge lengths must be positive and finite")
        nv = 1 + max(max(e) for e in edges)
        if min(min(e) for e in edges) < 0:
            raise TargetError("tree vertex ids must be nonnegative")
        if any(u == v for u, v in edges):
            raise TargetError("metric tree contains a loop edge")
        # union-find rejects cycles
        parent = list(range(nv))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for u, v in edges:
            ru, rv = find(u), find(v)
            if ru == rv:
                raise TargetError("metric tree contains a cycle")
            parent[ru] = rv
        if len({find(i) for i in range(nv)}) != 1:
            raise TargetError("metric tree must be connected with dense vertex ids")
        self.edges = tuple(edges)
        self.lengths = lengths
        self.n_vertices = nv
        self.name = "metric_tree"
        self._adj: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
        for e, (u, v) in enumerate(edges):
            self._adj[u].append((v, e))
            self._adj[v].append((u, e))
        self._dist = np.array([self._bfs(s)[0] for s in range(nv)])

    def _bfs(self, s):
        dist = np.full(self.n_vertices, math.inf)
        via = [-1] * self.n_vertices
        dist[s] = 0.0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, e in self._adj[u]:
                if dist[v] == math.inf:
                    dist[v] = dist[u] + self.lengths[e]
                    via[v] = u
                    queue.append(v)
        return dist, via

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape != (2,):
            raise TargetError(f"tree point must be [edge, offset], got {p!r}")
        e = int(p[0])
        if e != p[0] or not 0 <= e < len(self.edges):
            raise TargetError(f"tree point refers to missing edge {p[0]!r}")
        if not 0.0 <= p[1] <= self.lengths[e]:
            raise TargetError("tree point offset outside its edge")
        return p

    def vertex_point(self, v: int) -> np.ndarray:
        """A canonical ``[edge, offset]`` representative of tree vertex ``v``."""
        for e, (a, b) in enumerate(self.edges):
            if a == v:
                return np.array([float(e), 0.0])
            if b == v:
                return np.array([float(e), float(self.lengths[e])])
        raise TargetError(f"tree vertex {v} does not exist")

    def _ends(self, p):
        e = int(p[0])
        u, v = self.edges[e]
        return ((u, float(p[1])), (v, float(self.lengths[e] - p[1])))

    def distance(self, p, q) -> float:
        p = self.check_point(p)
        q = self.check_point(q)
        if int(p[0]) == int(q[0]):
            return abs(float(p[1]) - float(q[1]))
        return min(
            dp + self._dist[a, b] + dq for a, dp in self._ends(p) for b, dq in self._ends(q)
        )

    def _path(self, a: int, b: int) -> list[int]:
        _, via = self._bfs(a)
        path = [b]
        while path[-1] != a:
            path.append(via[path[-1]])
        return path[::-1]

    def _edge_between(self, u: int, v: int) -> int:
        for w, e in self._adj[u]:
            if w == v:
                return e
        raise TargetError("vertices are not adjacent")

    def _locate(self, u: int, v: int, s: float) -> np.ndarray:
        # point at distance s from u along the tree edge u-v
        e = self._edge_between(u, v)
        off = s if self.edges[e][0] == u else self.lengths[e] - s
        return np.array([float(e), min(max(off, 0.0), float(self.lengths[e]))])

    def geodesic_eval(self, p, q, t: float) -> np.ndarray:
        p = self.check_point(p)
        q = self.check_point(q)
        if t == 0:
            return p.copy()
        if t == 1:
            return q.copy()
        total = self.distance(p, q)
        s = t * total
        if int(p[0]) == int(q[0]):
            return np.array([p[0], p[1] + t * (q[1] - p[1])])
        # pick the endpoint pair realising the distance
        best = None
        for a, dp in self._ends(p):
            for b, dq in self._ends(q):
                tot = dp + self._dist[a, b] + dq
                if best is None or tot < best[0]:
                    best = (tot, a, dp, b, dq)
        _, a, dp, b, dq = best
        if s <= dp:
            e = int(p[0])
            sign = -1.0 if self.edges[e][0] == a else 1.0
            return np.array([p[0], p[1] + sign * s])
        s -= dp
        path = self._path(a, b)
        for u, v in zip(path[:-1], path[1:]):
            le = self.lengths[self._edge_between(u, v)]
            if s <= le:
                return self._locate(u, v, s)
            s -= le
        e = int(q[0])
        sign = 1.0 if self.edges[e][0] == b else -1.0
        off = q[1] - sign * (dq - s)
        return np.array([q[0], off])

    def random_point(self, rng, scale: float = 1.0) -> np.ndarray:
        e = int(rng.integers(len(self.edges)))
        return np.array([float(e), float(rng.uniform(0.0, self.lengths[e]))])

    def curvature_upper_bound(self) -> float:
        return -math.inf

    def point_to_json(self, p) -> list:
        return [int(p[0]), float(p[1])]

    def spec(self) -> dict:
        return {
            "type": "metric_tree",
            "edges": [list(e) for e in self.edges],
            "lengths": [float(x) for x in self.lengths],
        }
