from __future__ import annotations

import numpy as np
import pytest
import sympy as sp

from simpharm.complex import (
    SKELETON,
    ComplexError,
    DeltaComplex,
    annulus_quad_complex,
    build_complex,
    complex_from_polygons,
    conformal_subdivide_quad,
    conformal_subdivide_triangle,
    euler_characteristic,
    quad_subdivision,
    triangle_subdivision,
)
from simpharm.fixtures import genus2_complex, hex_disk, pillow_complex, torus_complex, wheel_complex
from simpharm.metric import simplicial_area, validate_metric


def single_triangle():
    return complex_from_polygons([(0, 1, 2)])


def single_quad():
    return complex_from_polygons([(0, 1, 2, 3)])


class TestBuild:
    def test_torus_counts(self):
        K = torus_complex()
        assert (K.n_vertices, K.n_edges, K.n_faces) == (1, 3, 2)
        assert euler_characteristic(K) == 0
        assert K.is_closed()

    def test_pillow_is_a_sphere(self):
        K = pillow_complex()
        assert euler_characteristic(K) == 2
        assert K.is_closed()

    def test_genus2_counts(self):
        K, _ = genus2_complex()
        # cell count of the fan triangulation of the octagon: 1 - 9 + 6
        assert (K.n_vertices, K.n_edges, K.n_faces) == (1, 9, 6)
        assert euler_characteristic(K) == 2 - 2 * 2
        assert K.is_closed()

    def test_inconsistent_cycle_rejected(self):
        # edge 0 ends at 1 but edge 2 starts at 2
        with pytest.raises(ComplexError, match="vertex-consistent"):
            build_complex([(0, 1), (1, 2), (2, 0)], [[(0, 1), (2, 1), (1, 1)]])

    def test_dangling_edge_rejected(self):
        with pytest.raises(ComplexError, match="missing edge"):
            build_complex([(0, 1), (1, 2), (2, 0)], [[(0, 1), (1, 1), (5, 1)]])

    def test_missing_vertex_rejected(self):
        with pytest.raises(ComplexError):
            DeltaComplex(2, ((0, 1), (1, 2), (2, 0)), (((0, 1), (1, 1), (2, 1)),))

    def test_surface_edge_in_three_faces_rejected(self):
        polys = [(0, 1, 2), (0, 1, 3), (0, 1, 4)]
        with pytest.raises(ComplexError, match="face slots"):
            complex_from_polygons(polys)
        K = complex_from_polygons(polys, mode=SKELETON)
        assert int(K.slot_counts.max()) == 3

    def test_two_gon_rejected(self):
        with pytest.raises(ComplexError, match="fewer than 3"):
            build_complex([(0, 1), (1, 0)], [[(0, 1), (1, 1)]])

    def test_bad_direction_flag(self):
        with pytest.raises(ComplexError, match="direction flag"):
            build_complex([(0, 1), (1, 2), (2, 0)], [[(0, 1), (1, 1), (2, 2)]])

    def test_unknown_mode(self):
        with pytest.raises(ComplexError, match="mode"):
            DeltaComplex(1, ((0, 0),), (), "volume")

    def test_loops_and_parallel_edges_allowed(self):
        K = torus_complex()
        assert all(t == h == 0 for t, h in K.edges)

    def test_preferred_vertex_is_minimum_id(self):
        K = complex_from_polygons([(3, 1, 2), (3, 2, 0)])
        assert K.preferred_vertex(0) == 1
        assert K.preferred_vertex(1) == 0

    def test_boundary_edges(self):
        K = wheel_complex(6)
        assert len(K.boundary_edges) == 6
        assert K.boundary_vertices == frozenset(range(1, 7))
        assert not K.is_closed()

    def test_json_round_trip(self):
        for K in (torus_complex(), wheel_complex(5), genus2_complex()[0], annulus_quad_complex(4)):
            K2 = DeltaComplex.from_json(K.to_json())
            assert K2.to_json() == K.to_json()
            assert (K2.n_vertices, K2.edges, K2.faces, K2.mode) == (K.n_vertices, K.edges, K.faces, K.mode)

    def test_malformed_json(self):
        with pytest.raises(ComplexError):
            DeltaComplex.from_json({"faces": []})


class TestStarLink:
    def test_wheel_centre(self):
        K = wheel_complex(6)
        st = K.star(0)
        assert len(st.faces) == 6
        assert st.link.is_cycle and st.link.length == 6
        assert K.is_interior_vertex(0)

    def test_boundary_vertex_link_is_arc(self):
        K = wheel_complex(6)
        lk = K.link(1)
        assert lk.connected and not lk.is_cycle
        assert not K.is_interior_vertex(1)

    def test_torus_star_is_everything(self):
        K = torus_complex()
        st = K.star(0)
        assert st.faces == (0, 1)
        assert st.link.is_cycle and st.link.length == 6

    def test_missing_vertex(self):
        with pytest.raises(ComplexError):
            wheel_complex(4).star(9)

    def test_hex_disk_interior(self):
        K, pos = hex_disk(2)
        interior = {v for v in range(K.n_vertices) if np.hypot(*pos[v]) < 1.5}
        assert K.interior_vertices == frozenset(interior)


class TestTriangleSubdivision:
    def test_equilateral(self):
        K = single_triangle()
        K2, l2 = conformal_subdivide_triangle(K, [1.0, 1.0, 1.0])
        assert K2.n_faces == 4
        assert np.allclose(l2.lengths, 0.5)
        assert simplicial_area(K2, l2) == 3.0 == simplicial_area(K, [1, 1, 1])

    def test_345(self):
        K = single_triangle()
        _, l2 = conformal_subdivide_triangle(K, [3.0, 4.0, 5.0])
        K2 = triangle_subdivision(K).complex
        assert simplicial_area(K, [3, 4, 5]) == 47.0
        assert simplicial_area(K2, l2) == pytest.approx(47.0, rel=1e-15)

    def test_degenerate_symbolic(self):
        # each child is a half-size copy, so A_S(child) = A_S(parent) / 4
        a, b, c = sp.symbols("a b c", nonnegative=True)
        child = (a * b + b * c + c * a) / 4
        assert sp.expand(4 * child - (a * b + b * c + c * a)) == 0
        K = single_triangle()
        K2, l2 = conformal_subdivide_triangle(K, [0.0, 1.0, 1.0])
        assert sorted(np.round(l2.lengths, 12).tolist()).count(0.0) == 3
        assert simplicial_area(K2, l2) == simplicial_area(K, [0.0, 1.0, 1.0]) == 1.0
        assert validate_metric(K2, l2).valid

    def test_cell_counts(self):
        K = torus_complex()
        sub = triangle_subdivision(K)
        K2 = sub.complex
        assert (K2.n_vertices, K2.n_edges, K2.n_faces) == (4, 12, 8)
        assert euler_characteristic(K2) == 0

    def test_rejects_quads(self):
        with pytest.raises(ComplexError):
            triangle_subdivision(single_quad())


def quad_children_area(a, b, c, d):
    """Sum of the four child areas, from the child side lengths written out by hand."""
    ia, ib, ic, id_ = (b + d) / 4, (a + c) / 4, (b + d) / 4, (a + c) / 4  # half-cuts from each side
    sides = [a, b, c, d]
    inner = [ia, ib, ic, id_]
    total = 0
    for k in range(4):
        # child at the corner between side k and side k+1
        s1, s2 = sides[k] / 2, sides[(k + 1) % 4] / 2
        c2, c1 = inner[(k + 1) % 4], inner[k]
        total += s1 * s2 + s2 * c2 + c2 * c1 + c1 * s1
    return total


class TestQuadSubdivision:
    def test_identity_symbolic(self):
        a, b, c, d = sp.symbols("a b c d", nonnegative=True)
        assert sp.expand(quad_children_area(a, b, c, d) - (a + c) * (b + d)) == 0

    def test_unit_square(self):
        K = single_quad()
        K2, l2 = conformal_subdivide_quad(K, [1, 1, 1, 1])
        assert np.allclose(l2.lengths, 0.5)
        assert simplicial_area(K, [1, 1, 1, 1]) == 4.0
        areas = [simplicial_area(complex_from_polygons([(0, 1, 2, 3)]), l2.lengths[[e for e, _ in cyc]])
                 for cyc in K2.faces]
        assert areas == [1.0] * 4
        assert simplicial_area(K2, l2) == 4.0

    def test_2121(self):
        K = single_quad()
        K2, l2 = conformal_subdivide_quad(K, [2, 1, 2, 1])
        assert simplicial_area(K, [2, 1, 2, 1]) == 8.0
        assert simplicial_area(K2, l2) == pytest.approx(8.0, rel=1e-15)
        assert quad_children_area(2.0, 1.0, 2.0, 1.0) == 8.0

    def test_opposite_zero(self):
        K = single_quad()
        K2, l2 = conformal_subdivide_quad(K, [0.0, 3.0, 0.0, 2.0])
        assert simplicial_area(K, [0.0, 3.0, 0.0, 2.0]) == 0.0
        for cyc in K2.faces:
            side = l2.lengths[[e for e, _ in cyc]]
            assert sum(side[k] * side[(k + 1) % 4] for k in range(4)) == 0.0

    def test_matches_hand_formula(self, rng):
        K = single_quad()
        for _ in range(50):
            l = rng.uniform(0.1, 2.0, 4)
            K2, l2 = conformal_subdivide_quad(K, l)
            assert simplicial_area(K2, l2) == pytest.approx(quad_children_area(*l), rel=1e-14)

    def test_cell_counts_annulus(self):
        K = annulus_quad_complex(4)
        K2 = quad_subdivision(K).complex
        assert K2.is_quad()
        assert euler_characteristic(K2) == 0
        assert K2.n_faces == 16

    def test_rejects_triangles(self):
        with pytest.raises(ComplexError):
            quad_subdivision(single_triangle())


class TestAnnulus:
    def test_n3(self):
        K = annulus_quad_complex(3)
        assert (K.n_vertices, K.n_edges, K.n_faces) == (6, 9, 3)
        assert euler_characteristic(K) == 0
        assert len(K.boundary_edges) == 6

    def test_n4(self):
        assert euler_characteristic(annulus_quad_complex(4)) == 0

    def test_n2_rejected(self):
        with pytest.raises(ComplexError):
            annulus_quad_complex(2)
