from __future__ import annotations

import math

import numpy as np
import pytest

from simpharm.complex import annulus_quad_complex, complex_from_polygons, triangle_subdivision
from simpharm.fixtures import genus2_map, load_json, perturbed, torus_map, wheel_complex
from simpharm.io import load_bundle
from simpharm.metric import SimplicialMetric, induced_quasimetric
from simpharm.smap import SimplicialMap, constant_map, random_map, subdivide_map
from simpharm.solver import FlowConfig, flow_to_harmonic, simplicial_weights, solve_dirichlet
from simpharm.targets import Euclidean, FlatTorus, Hyperbolic
from simpharm.verify import (
    CheckResult,
    bad_loops,
    check_area_bound,
    check_convex_hull,
    check_E_ge_A,
    check_embedding,
    check_max_principle,
    check_mean_value,
    check_vertex_angle_sums,
    compare_weights,
    cotangent_weights,
    vertex_angle_sums,
)

from _instances import dirichlet_instance

TRI = complex_from_polygons([(0, 1, 2)])
SQUARE = np.array([[0.0, 0.0], [1, 0], [0, 1], [-1, 0], [0, -1]])


def square_wheel(hub=(0.0, 0.0)):
    K = wheel_complex(4)
    pts = SQUARE.copy()
    pts[0] = hub
    return SimplicialMap(K, Euclidean(2), pts, None), np.ones(K.n_edges)


class TestCheckResult:
    def test_negative_residual(self):
        with pytest.raises(ValueError):
            CheckResult("x", True, -1.0)

    def test_json(self):
        js = CheckResult("x", False, math.inf, 3, "d").to_json()
        assert js == {"name": "x", "passed": False, "residual": "infinite", "witness": 3, "detail": "d"}


class TestEgeA:
    def test_isometric(self):
        f, _ = square_wheel((0.1, 0.2))
        r = check_E_ge_A(f, induced_quasimetric(f.complex, f))
        assert r.passed and r.data["conformal"] and r.detail == "equality, conformal"

    def test_strict_gap(self):
        f = SimplicialMap(TRI, Euclidean(2), [[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]], None)
        # stretch factors 1, 1, 2
        r = check_E_ge_A(f, [1.0, 1.0, 0.5])
        assert r.passed and not r.data["conformal"] and r.data["gap"] > 0.1

    def test_infinite(self):
        f = SimplicialMap(TRI, Euclidean(2), [[0, 0], [1, 0], [0, 1]], None)
        assert check_E_ge_A(f, [0.0, 1.0, 1.0]).detail == "infinite energy"


class TestMeanValueAndHull:
    def test_square_centre(self):
        f, l = square_wheel()
        r = check_mean_value(f, l)
        assert r.passed and r.residual == 0.0
        assert check_convex_hull(f, l).passed

    def test_not_harmonic(self):
        f, l = square_wheel((0.3, 0.0))
        r = check_mean_value(f, l)
        assert not r.passed and r.residual == pytest.approx(0.3) and r.witness == 0

    def test_outside_hull(self):
        f, l = square_wheel((2.0, 0.0))
        r = check_convex_hull(f, l)
        assert not r.passed and r.witness == 0 and r.residual > 0

    def test_constant(self):
        f = constant_map(wheel_complex(5), "euclidean(2)")
        assert check_convex_hull(f, np.ones(10)).passed

    def test_needs_euclidean(self):
        f = constant_map(wheel_complex(5), "hyperbolic(2)")
        with pytest.raises(TypeError):
            check_mean_value(f, np.ones(10))

    def test_harmonic_dirichlet(self, rng):
        for _ in range(10):
            f, l, fixed = dirichlet_instance(rng)
            g, rep = flow_to_harmonic(f, l, FlowConfig(fixed_vertices=fixed))
            assert check_mean_value(g, l, 10 * 1e-8, fixed).passed
            assert check_convex_hull(g, l, fixed=fixed).passed

    def test_three_dimensional_hull(self, rng):
        f, l, fixed = dirichlet_instance(rng)
        X = np.column_stack([f.images, rng.uniform(-1, 1, f.complex.n_vertices)])
        g = SimplicialMap(f.complex, Euclidean(3), X, None)
        Y = solve_dirichlet(g.complex, simplicial_weights(g.complex, l), g.images, fixed)
        assert check_convex_hull(g.with_images(Y), l, fixed=fixed).passed

    def test_hyperbolic_hull(self, rng):
        K = wheel_complex(6)
        T = Hyperbolic(2)
        f = random_map(K, T, rng)
        fixed = list(range(1, 7))
        g, _ = flow_to_harmonic(f, np.ones(K.n_edges), FlowConfig(fixed_vertices=fixed))
        assert check_convex_hull(g, np.ones(K.n_edges)).passed
        far = g.images.copy()
        far[0] = T.exp(g.images[1], 5.0 * T.log(g.images[1], g.images[0]) * -1.0)
        assert not check_convex_hull(g.with_images(far), np.ones(K.n_edges)).passed

    def test_shipped_cotangent_witness(self):
        doc = load_json("cotangent_witness.json")
        b = load_bundle_from_doc(doc)
        r = check_convex_hull(b.map, b.metric, fixed=b.fixed)
        assert not r.passed
        assert r.witness == doc["violating_vertex"]
        w = np.array(doc["cotangent_weights"])
        assert (w < 0).any()


def load_bundle_from_doc(doc, tmp=None):
    import json
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as d:
        p = Path(d) / "b.json"
        p.write_text(json.dumps(doc))
        return load_bundle(bundle=str(p))


class TestMaxPrinciple:
    def line(self, rng):
        f, l, fixed = dirichlet_instance(rng, dim=1)
        return f, l, fixed

    def test_linear_boundary(self, rng):
        f, l, fixed = dirichlet_instance(rng, dim=2)
        X = f.images.copy()
        # boundary values x + 2y, a linear function on the circle
        vals = X[:, 0] + 2 * X[:, 1]
        g = SimplicialMap(f.complex, Euclidean(1), vals[:, None], None)
        Y = solve_dirichlet(g.complex, simplicial_weights(g.complex, l), g.images, fixed)
        r = check_max_principle(g.with_images(Y), l, fixed)
        assert r.passed and r.detail == "strictly inside"

    def test_constant(self):
        f = constant_map(wheel_complex(5), "euclidean(1)")
        assert check_max_principle(f).detail == "constant, principle vacuous"

    def test_spike(self, rng):
        f, l, fixed = dirichlet_instance(rng, dim=1)
        Y = solve_dirichlet(f.complex, simplicial_weights(f.complex, l), f.images, fixed)
        free = [v for v in range(f.complex.n_vertices) if v not in fixed]
        Y[free[0], 0] = 10.0
        r = check_max_principle(f.with_images(Y), l, fixed)
        assert not r.passed and r.witness == free[0] and r.detail == "interior extremum"

    def test_tie(self):
        K = wheel_complex(4)
        f = SimplicialMap(K, Euclidean(1), [[1.0], [1.0], [0.0], [0.0], [0.0]], None)
        r = check_max_principle(f)
        assert not r.passed and r.detail == "tie with a boundary bound" and r.data["ties"] == [0]

    def test_needs_real_values(self):
        with pytest.raises(TypeError):
            check_max_principle(constant_map(wheel_complex(4), "euclidean(2)"))


class TestAreaBound:
    def test_genus2_flowed(self):
        K, l, f = genus2_map(2)
        g, rep = flow_to_harmonic(perturbed(f, np.random.default_rng(3)), l)
        r = check_area_bound(g, 1.0)
        assert r.passed and r.data["chi_bound"] == pytest.approx(4 * math.pi)

    def test_quad_maps(self, rng):
        K = annulus_quad_complex(5)
        T = Hyperbolic(2)
        for _ in range(20):
            f = random_map(K, T, rng, scale=2.0)
            l = rng.uniform(0.5, 1.5, K.n_edges)
            r = check_area_bound(f, l=l)
            assert r.passed and r.data["area"] <= 0.5 * r.data["energy"] + 1e-9

    def test_constant(self):
        assert check_area_bound(constant_map(wheel_complex(4), "hyperbolic(2)")).passed

    def test_flat_vacuous(self):
        r = check_area_bound(torus_map())
        assert r.passed and "vacuous" in r.detail


class TestAngles:
    def test_torus(self):
        sums, deg = vertex_angle_sums(torus_map())
        assert sums[0] == pytest.approx(2 * math.pi, abs=1e-12) and not deg
        assert check_vertex_angle_sums(torus_map(), "embedding").passed

    def test_collapsed(self):
        K = wheel_complex(4)
        pts = SQUARE.copy()
        pts[1] = pts[0]
        r = check_vertex_angle_sums(SimplicialMap(K, Euclidean(2), pts, None))
        assert not r.passed and r.data["degenerate"] == [0]

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            check_vertex_angle_sums(torus_map(), "flat")


class TestEmbedding:
    def test_torus(self):
        r = check_embedding(torus_map())
        assert r.passed and r.residual <= 1e-12

    def test_subdivided_torus(self):
        f = torus_map((0.1, 0.1))
        g = subdivide_map(f, triangle_subdivision(f.complex))
        assert check_embedding(g).passed

    def test_collapsed_edge(self):
        f = torus_map()
        sub = triangle_subdivision(f.complex)
        g = subdivide_map(f, sub, normalize=False)
        imgs = g.images.copy()
        imgs[sub.midpoint[0]] = imgs[0]
        h = g.with_images(imgs)
        r = check_embedding(h)
        assert not r.passed and "(i)" in r.detail

    def test_folded_disk(self):
        f, _ = square_wheel((2.0, 0.0))
        r = check_embedding(f)
        assert not r.passed and "(ii)" in r.detail

    def test_null_homotopic_loop(self):
        f = SimplicialMap(f_complex := torus_map().complex, FlatTorus(2), np.zeros((1, 2)), [(0, 0)] * 3)
        assert bad_loops(f) == [(0,), (1,), (2,)]
        assert f_complex.n_edges == 3

    def test_needs_surface_target(self):
        with pytest.raises(TypeError):
            check_embedding(constant_map(wheel_complex(4), "euclidean(3)"))


class TestWeights:
    def test_equilateral(self):
        w = cotangent_weights(TRI, [1, 1, 1])
        assert w == pytest.approx([1 / math.sqrt(3) / 4] * 3, rel=1e-14)

    def test_right_triangle_zero(self):
        # the hypotenuse faces the right angle: cot 90 = 0
        w = cotangent_weights(TRI, [3, 4, 5])
        assert abs(w[2]) < 1e-15

    def test_degenerate_nan(self):
        assert np.isnan(cotangent_weights(TRI, [1, 1, 2])).all()

    def test_compare(self):
        cmp = compare_weights(n_instances=100, seed=0)
        assert cmp.simplicial_violations == 0
        assert cmp.cotangent_violations >= 1
        assert cmp.negative_cotangent_instances >= cmp.cotangent_violations
        assert cmp.to_json()["n_witnesses"] == 1

    def test_deterministic(self):
        a = compare_weights(n_instances=20, seed=4).to_json()
        b = compare_weights(n_instances=20, seed=4).to_json()
        assert a == b

    def test_acute_both_pass(self):
        # regular hexagon wheel: all triangles equilateral, all cot weights positive
        K = wheel_complex(6)
        l = SimplicialMetric(np.ones(K.n_edges))
        assert (cotangent_weights(K, l) > 0).all()
        ang = np.linspace(0, 2 * math.pi, 7)[:-1] + 0.3
        X = np.vstack([[0.5, 0.2], np.stack([np.cos(ang), np.sin(ang)], axis=1)])
        fixed = list(range(1, 7))
        for w in (simplicial_weights(K, l), cotangent_weights(K, l)):
            Y = solve_dirichlet(K, w, X, fixed)
            assert check_convex_hull(SimplicialMap(K, Euclidean(2), Y, None), l, fixed=fixed).passed
