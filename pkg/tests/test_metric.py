from __future__ import annotations

import math

import numpy as np
import pytest

from simpharm.complex import complex_from_polygons
from simpharm.fixtures import torus_complex, torus_map, wheel_complex
from simpharm.metric import (
    MetricError,
    SimplicialMetric,
    edge_weights,
    euclidean_area,
    heron,
    induced_quasimetric,
    scale_metric,
    simplicial_area,
    validate_metric,
)
from simpharm.smap import SimplicialMap, constant_map
from simpharm.targets import Euclidean

from _instances import euclid_metric, plain_complexes

TRI = complex_from_polygons([(0, 1, 2)])
QUAD = complex_from_polygons([(0, 1, 2, 3)])


class TestSimplicialMetric:
    def test_negative_rejected(self):
        with pytest.raises(MetricError, match="negative"):
            SimplicialMetric([1.0, -1.0, 1.0])

    def test_nonfinite_rejected(self):
        with pytest.raises(MetricError):
            SimplicialMetric([1.0, np.inf, 1.0])
        with pytest.raises(MetricError):
            SimplicialMetric([1.0, np.nan, 1.0])

    def test_quasi_flag(self):
        assert SimplicialMetric([0.0, 1.0, 1.0]).quasi
        assert not SimplicialMetric([1.0, 1.0, 1.0]).quasi

    def test_immutable(self):
        l = SimplicialMetric([1.0, 2.0, 2.0])
        with pytest.raises(ValueError):
            l.lengths[0] = 5.0

    def test_json(self):
        l = SimplicialMetric([3.0, 4.0, 5.0])
        assert SimplicialMetric.from_json(l.to_json()).lengths.tolist() == [3.0, 4.0, 5.0]
        with pytest.raises(MetricError):
            SimplicialMetric.from_json({"len": []})

    def test_wrong_size(self):
        with pytest.raises(MetricError):
            simplicial_area(TRI, [1.0, 1.0])


class TestValidate:
    def test_equality_case_valid(self):
        assert validate_metric(TRI, [1, 1, 2]).valid

    def test_violation(self):
        r = validate_metric(TRI, [1, 1, 3])
        assert not r.valid
        assert r.violations == (0,)
        assert r.excess == (1.0,)

    def test_quasi_valid(self):
        r = validate_metric(TRI, [0, 1, 1])
        assert r.valid and r.quasi

    def test_polygon_rule(self):
        assert validate_metric(QUAD, [3, 1, 1, 1]).valid
        assert not validate_metric(QUAD, [3.5, 1, 1, 1]).valid

    def test_report_json(self):
        js = validate_metric(TRI, [1, 1, 3]).to_json()
        assert js == {"valid": False, "quasi": False, "violations": [{"face": 0, "excess": 1.0}]}


class TestAreas:
    def test_simplicial_area_examples(self):
        assert simplicial_area(TRI, [1, 1, 1]) == 3.0
        assert simplicial_area(TRI, [3, 4, 5]) == 47.0
        assert simplicial_area(QUAD, [1, 1, 1, 1]) == 4.0

    def test_heron(self):
        assert heron(3, 4, 5) == 6.0
        assert heron(1, 1, 2) == 0.0
        assert euclidean_area(TRI, [3, 4, 5]) == 6.0
        assert 6.0 < 47.0 / 6.0

    def test_heron_equilateral(self):
        assert heron(2, 2, 2) == pytest.approx(math.sqrt(3), rel=1e-15)

    def test_euclidean_area_needs_triangles(self):
        with pytest.raises(MetricError):
            euclidean_area(QUAD, [1, 1, 1, 1])

    def test_area_ratio_bound(self, rng):
        for K in plain_complexes():
            if not K.is_triangulation():
                continue
            for _ in range(20):
                l = euclid_metric(K, rng)
                assert simplicial_area(K, l) >= 6 * euclidean_area(K, l) * (1 - 1e-12)


class TestWeights:
    def test_interior_edge_unit(self):
        # interior edge of two unit triangles: four neighbours of length 1
        K = complex_from_polygons([(0, 1, 2), (0, 2, 3)])
        e = next(i for i, (t, h) in enumerate(K.edges) if {t, h} == {0, 2})
        assert edge_weights(K, np.ones(K.n_edges))[e] == 2.0

    def test_boundary_edge(self):
        assert edge_weights(TRI, [1, 1, 1]).tolist() == [1.0, 1.0, 1.0]

    def test_long_edge(self):
        K = complex_from_polygons([(0, 1, 2), (0, 2, 3)])
        l = np.ones(K.n_edges)
        e = next(i for i, (t, h) in enumerate(K.edges) if {t, h} == {0, 2})
        l[e] = 2.0
        assert edge_weights(K, l)[e] == 1.0

    def test_zero_edge_has_no_weight(self):
        w = edge_weights(TRI, [0, 1, 1])
        assert math.isnan(w[0]) and w[1] == w[2] == 0.5

    def test_torus_weights(self):
        # both triangles are (1, 1, sqrt 2): w = 2 (1 + sqrt 2) / 2 on the unit edges
        w = edge_weights(torus_complex(), [1.0, 1.0, math.sqrt(2)])
        assert w[0] == pytest.approx(1 + math.sqrt(2), rel=1e-15)
        assert w[2] == pytest.approx(2.0 / math.sqrt(2), rel=1e-15)

    def test_positive_on_random_metrics(self, rng):
        n = 0
        for K in plain_complexes():
            for _ in range(1000 // len(plain_complexes()) + 1):
                w = edge_weights(K, euclid_metric(K, rng))
                assert (w > 0).all()
                n += 1
        assert n >= 1000


class TestScale:
    def test_identity(self):
        assert scale_metric([3, 4, 5], 1.0).lengths.tolist() == [3, 4, 5]

    def test_double(self):
        l = scale_metric([3, 4, 5], 2.0)
        assert l.lengths.tolist() == [6, 8, 10]
        assert simplicial_area(TRI, l) == 4 * 47.0

    def test_tiny_keeps_validity(self):
        assert validate_metric(TRI, scale_metric([3, 4, 5], 1e-3)).valid

    @pytest.mark.parametrize("lam", [0.0, -1.0, math.inf, math.nan])
    def test_bad_factor(self, lam):
        with pytest.raises(MetricError):
            scale_metric([1, 1, 1], lam)

    def test_quadratic_scaling(self, rng):
        for K in plain_complexes():
            l = euclid_metric(K, rng)
            for lam in (1e-3, 0.37, 1e3):
                assert simplicial_area(K, scale_metric(l, lam)) == pytest.approx(
                    lam * lam * simplicial_area(K, l), rel=1e-12)


class TestInduced:
    def test_isometric(self, rng):
        K = wheel_complex(6)
        f = SimplicialMap(K, Euclidean(2), rng.standard_normal((K.n_vertices, 2)), None)
        l = induced_quasimetric(K, f)
        l2 = induced_quasimetric(K, f.with_images(f.images))
        assert np.array_equal(l.lengths, l2.lengths)
        assert np.array_equal(l.lengths, f.edge_lengths())

    def test_constant(self):
        K = wheel_complex(5)
        l = induced_quasimetric(K, constant_map(K, "euclidean(2)"))
        assert (l.lengths == 0).all() and l.quasi

    def test_torus(self):
        l = induced_quasimetric(torus_complex(), torus_map())
        assert l.lengths == pytest.approx([1.0, 1.0, math.sqrt(2)], rel=1e-15)
