from __future__ import annotations

import math

import numpy as np
import pytest

from simpharm.complex import triangle_subdivision
from simpharm.fixtures import (
    annulus_tree_fixture,
    genus2_map,
    perturbed,
    torus_map,
    wheel_complex,
)
from simpharm.metric import SimplicialMetric, edge_weights, induced_quasimetric
from simpharm.smap import (
    SimplicialMap,
    constant_map,
    riemannian_area,
    simplicial_area_of_map,
    simplicial_energy,
    subdivide_map,
)
from simpharm.solver import (
    CONVERGED,
    INFINITE_ENERGY,
    FlowConfig,
    FlowError,
    InfiniteEnergyError,
    UniquenessRefused,
    energy_gradient,
    energy_value,
    finite_diff_gradient,
    flow_family,
    flow_step,
    flow_to_harmonic,
    minimize_over_metrics,
    simplicial_weights,
    solve_dirichlet,
    uniqueness_probe,
)
from simpharm.targets import Euclidean, FlatTorus, Hyperbolic

from _instances import dirichlet_instance, random_instance

TRI_PTS = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 0.0]])


def wheel_dirichlet(n=6, seed=0):
    """Wheel with unit lengths, rim on the unit circle at random angles, hub off-centre."""
    rng = np.random.default_rng(seed)
    K = wheel_complex(n)
    ang = np.sort(rng.uniform(0, 2 * math.pi, n))
    pts = np.vstack([[0.4, -0.3], np.stack([np.cos(ang), np.sin(ang)], axis=1)])
    f = SimplicialMap(K, Euclidean(2), pts, None)
    return f, SimplicialMetric(np.ones(K.n_edges)), list(range(1, n + 1))


class TestConfig:
    @pytest.mark.parametrize("kw", [{"grad_tol": 0}, {"shrink": 1.0}, {"armijo": 0}, {"max_iters": -1},
                                    {"initial_step": -1.0}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            FlowConfig(**kw)

    def test_replace(self):
        cfg = FlowConfig().replace(grad_tol=1e-6, fixed_vertices=[1, 2])
        assert cfg.grad_tol == 1e-6 and cfg.fixed_vertices == frozenset({1, 2})


class TestGradient:
    def test_single_edge(self):
        from simpharm.complex import complex_from_polygons

        K = complex_from_polygons([(0, 1, 2)])
        # unit triangle metric: every weight is 1; vertices 1 and 2 share an image
        f = SimplicialMap(K, Euclidean(2), TRI_PTS, None)
        assert edge_weights(K, [1, 1, 1]).tolist() == [1.0, 1.0, 1.0]
        G = energy_gradient(f, [1, 1, 1])
        assert G[1] == pytest.approx([2.0, 0.0], abs=1e-15)

    def test_euclidean_closed_form(self, rng):
        f, l = random_instance(rng, "euclidean", False)
        K = f.complex
        w = edge_weights(K, l)
        G = np.zeros_like(f.images)
        for e, (t, h) in enumerate(K.edges):
            d = f.images[t] - f.images[h]
            G[t] += 2 * w[e] * d
            G[h] -= 2 * w[e] * d
        assert energy_gradient(f, l) == pytest.approx(G, abs=1e-12)

    def test_flat_torus_zero(self, rng):
        for _ in range(100):
            f = torus_map(tuple(rng.uniform(-3, 3, 2)))
            assert np.abs(energy_gradient(f, [1.0, 1.0, math.sqrt(2)])).max() <= 1e-14

    def test_constant_map_zero(self):
        f = constant_map(wheel_complex(5), "hyperbolic(2)")
        l = np.ones(10)
        assert (finite_diff_gradient(f, l) == 0).all()
        assert (energy_gradient(f, l) == 0).all()

    # the 1-vertex torus has an identically zero gradient, tested above
    @pytest.mark.parametrize("family", ["euclidean", "hyperbolic", "genus2"])
    def test_matches_finite_differences(self, family, rng):
        for _ in range(5):
            f, l = random_instance(rng, family, False)
            G = energy_gradient(f, l)
            Gfd = finite_diff_gradient(f, l, 1e-5)
            assert np.linalg.norm(G - Gfd) <= 1e-6 * np.linalg.norm(G)

    def test_energy_value_matches(self, rng):
        f, l = random_instance(rng, "hyperbolic", False)
        assert energy_value(f, l) == pytest.approx(simplicial_energy(f, l), rel=1e-12)

    def test_tree_refused(self):
        _, _, f = annulus_tree_fixture()
        with pytest.raises(FlowError):
            energy_gradient(f, induced_quasimetric(f.complex, f))

    def test_infinite_refused(self):
        from simpharm.complex import complex_from_polygons

        K = complex_from_polygons([(0, 1, 2)])
        f = SimplicialMap(K, Euclidean(2), [[0, 0], [1, 0], [0, 1]], None)
        with pytest.raises(InfiniteEnergyError):
            energy_gradient(f, [0.0, 1.0, 1.0])


class TestFlowStep:
    def test_exact_step_to_centroid(self):
        f, l, fixed = wheel_dirichlet()
        w = edge_weights(f.complex, l)
        spokes = [e for e, (t, h) in enumerate(f.complex.edges) if 0 in (t, h)]
        W = w[spokes].sum()
        centroid = sum(w[e] * f.images[[v for v in f.complex.edges[e] if v != 0][0]] for e in spokes) / W
        cfg = FlowConfig(initial_step=1.0 / (2.0 * W), fixed_vertices=fixed)
        g, step = flow_step(f, l, cfg)
        assert step == cfg.initial_step
        assert g.images[0] == pytest.approx(centroid, abs=1e-14)
        assert np.array_equal(g.images[1:], f.images[1:])

    def test_harmonic_no_displacement(self):
        f = torus_map((0.2, 0.3))
        g, step = flow_step(f, [1.0, 1.0, math.sqrt(2)])
        assert step == 0.0 and g is f

    def test_strict_decrease(self, rng):
        for family in ("euclidean", "hyperbolic", "genus2"):
            f, l = random_instance(rng, family, False)
            g, step = flow_step(f, l)
            assert step > 0
            assert simplicial_energy(g, l) < simplicial_energy(f, l)
            assert g.decks == f.decks


class TestFlow:
    def test_circle_centroid(self):
        f, l, fixed = wheel_dirichlet(7, seed=3)
        g, rep = flow_to_harmonic(f, l, FlowConfig(fixed_vertices=fixed))
        assert rep.reason == CONVERGED and rep.is_monotone()
        # unit lengths make all spoke weights equal: the hub goes to the plain mean
        assert g.images[0] == pytest.approx(f.images[1:].mean(axis=0), abs=1e-8)

    def test_constant_map_fixed_point(self):
        f = constant_map(wheel_complex(6), "euclidean(2)")
        g, rep = flow_to_harmonic(f, np.ones(12))
        assert g is f and rep.iterations == 0 and rep.energies == [0.0]

    def test_zero_energy_tree_like_map(self):
        # zero-length image edges on a quasi-metric: energy 0, returned untouched
        K = wheel_complex(4)
        f = constant_map(K, "hyperbolic(2)")
        l = induced_quasimetric(K, f)
        g, rep = flow_to_harmonic(f, l)
        assert g is f and rep.final_energy == 0.0

    def test_infinite_energy_report(self):
        from simpharm.complex import complex_from_polygons

        K = complex_from_polygons([(0, 1, 2)])
        f = SimplicialMap(K, Euclidean(2), [[0, 0], [1, 0], [0, 1]], None)
        g, rep = flow_to_harmonic(f, [0.0, 1.0, 1.0])
        assert g is f and rep.reason == INFINITE_ENERGY

    def test_matches_linear_solve(self, rng):
        for _ in range(5):
            f, l, fixed = dirichlet_instance(rng)
            g, rep = flow_to_harmonic(f, l, FlowConfig(grad_tol=1e-10, fixed_vertices=fixed))
            X = solve_dirichlet(f.complex, simplicial_weights(f.complex, l), f.images, fixed)
            assert rep.reason == CONVERGED
            assert g.images == pytest.approx(X, abs=1e-9)

    def test_monitor(self):
        f, l, fixed = wheel_dirichlet()
        _, rep = flow_to_harmonic(f, l, FlowConfig(fixed_vertices=fixed), monitor=riemannian_area)
        assert len(rep.monitor) == len(rep.energies)
        assert all(len(row) == 5 for row in rep.csv_rows())

    def test_decks_untouched(self, rng):
        f, l = random_instance(rng, "genus2", False)
        g, _ = flow_to_harmonic(f, l, FlowConfig(max_iters=20))
        assert g.decks == f.decks

    def test_genus2_two_seeds(self):
        K, l, f0 = genus2_map(2)
        out = []
        for seed in (1, 2):
            f = perturbed(f0, np.random.default_rng(seed))
            g, rep = flow_to_harmonic(f, l, FlowConfig(grad_tol=1e-9))
            assert rep.reason == CONVERGED and rep.is_monotone()
            assert riemannian_area(g) <= 4 * math.pi + 1e-6
            out.append(g)
        assert simplicial_energy(out[0], l) == pytest.approx(simplicial_energy(out[1], l), rel=1e-9)


class TestFamily:
    def torus_family(self, n):
        """Subdivided torus, vertex 0 pinned, metric moving linearly between two lattices."""
        f = torus_map((0.0, 0.0))
        g = subdivide_map(f, triangle_subdivision(f.complex))
        g = subdivide_map(g, triangle_subdivision(g.complex))
        la = induced_quasimetric(g.complex, g).lengths
        rng = np.random.default_rng(7)
        # small per-edge rescalings keep every triangle inequality strict
        lb = la * rng.uniform(0.9, 1.1, la.size)
        s = np.linspace(0.0, 1.0, n)
        metrics = [SimplicialMetric((1 - t) * la + t * lb) for t in s]
        moved = perturbed(g, rng, 0.05).images.copy()
        moved[0] = g.images[0]
        return [g.with_images(moved)] * n, metrics

    def test_constant_family(self):
        f, l, fixed = wheel_dirichlet()
        res = flow_family([f] * 3, [l] * 3, FlowConfig(fixed_vertices=fixed))
        assert res.adjacent_distances == [0.0, 0.0]

    def test_zero_energy_endpoints(self):
        f, l, fixed = wheel_dirichlet()
        c = constant_map(f.complex, "euclidean(2)")
        lc = induced_quasimetric(c.complex, c)
        res = flow_family([c, f, f, c], [lc, l, l, lc], FlowConfig(fixed_vertices=fixed))
        assert res.maps[0] is c and res.maps[-1] is c
        res = flow_family([c, f, c], [lc, l, lc], FlowConfig(fixed_vertices=fixed), warm_start=True)
        assert res.maps[0] is c and res.maps[-1] is c

    def test_continuity(self):
        cfg = FlowConfig(grad_tol=1e-11, fixed_vertices=[0])
        d = []
        for n in (5, 9, 17):
            maps, metrics = self.torus_family(n)
            res = flow_family(maps, metrics, cfg)
            assert all(r.reason == CONVERGED for r in res.reports)
            d.append(max(res.adjacent_distances))
        assert d[0] > 0
        # halving the parameter step roughly halves the distance between neighbours
        assert d[1] == pytest.approx(d[0] / 2, rel=0.2)
        assert d[2] == pytest.approx(d[1] / 2, rel=0.2)

    def test_infinite_sample(self):
        from simpharm.complex import complex_from_polygons

        K = complex_from_polygons([(0, 1, 2)])
        f = SimplicialMap(K, Euclidean(2), [[0, 0], [1, 0], [0, 1]], None)
        with pytest.raises(InfiniteEnergyError):
            flow_family([f], [SimplicialMetric([0.0, 1.0, 1.0])])

    def test_metric_count(self):
        f, l, _ = wheel_dirichlet()
        with pytest.raises(FlowError):
            flow_family([f, f], [l])


class TestMetricOptimisation:
    def test_already_minimal(self):
        f = torus_map()
        g, l, trace = minimize_over_metrics(f)
        assert trace.areas[0] == trace.areas[-1] == simplicial_area_of_map(f)
        assert len(trace.reports) == 1
        assert all(trace.energy_equals_area)

    def test_monotone(self, rng):
        f, _ = random_instance(rng, "hyperbolic", False)
        g, l, trace = minimize_over_metrics(f, cfg=FlowConfig(grad_tol=1e-9))
        assert trace.is_monotone()
        assert all(trace.energy_equals_area)
        assert simplicial_energy(g, l) == simplicial_area_of_map(g)

    def test_other_complex(self):
        f = torus_map()
        with pytest.raises(FlowError):
            minimize_over_metrics(f, K=wheel_complex(4))


class TestUniqueness:
    def test_identical(self):
        K, l, f = genus2_map(1)
        f = perturbed(f, np.random.default_rng(0))
        res = uniqueness_probe(f, f, l)
        assert res.distance == 0.0

    def test_flat_refused(self):
        f = torus_map()
        with pytest.raises(UniquenessRefused, match="translation"):
            uniqueness_probe(f, f, [1.0, 1.0, math.sqrt(2)])

    def test_euclidean_refused(self):
        f, l, _ = wheel_dirichlet()
        with pytest.raises(UniquenessRefused):
            uniqueness_probe(f, f, l)

    def test_hyperbolic_disk_probe(self, rng):
        K = wheel_complex(5)
        T = Hyperbolic(2)
        a = SimplicialMap(K, T, [T.random_point(rng) for _ in range(6)], None)
        b = a.with_images([T.random_point(rng) for _ in range(6)])
        with pytest.raises(FlowError):
            uniqueness_probe(a, SimplicialMap(wheel_complex(6), T, [T.random_point(rng) for _ in range(7)], None),
                             np.ones(10))
        assert isinstance(uniqueness_probe(a, b, np.ones(10)).distance, float)


def test_flat_torus_target_type():
    assert isinstance(torus_map().target, FlatTorus)
