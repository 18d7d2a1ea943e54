from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import edges2d, lattice_points2d, min_width2d, vertex_set_of_sum, vertices2d, width_along2d
from polyretract import linalg as la
from polyretract.geometry import (
    AffineLatticeMap,
    DimensionMismatch,
    LatticePolytope,
    affine_lattice_iso,
    dilate,
    faces,
    homothety_check,
    hull,
    image,
    join,
    lattice_length,
    lattice_points,
    lattice_width,
    minimal_lattice_width,
    minkowski_sum,
    minkowski_summand_check,
    pyramid_apex,
    segment_embeddings,
    simplex_segment,
    symmetries,
    translate,
)

TRIANGLE_Q = LatticePolytope([(0, -1), (-1, 0), (1, 1)])
SQUARE = LatticePolytope([(0, 0), (1, 0), (0, 1), (1, 1)])
UNIT_TRIANGLE = LatticePolytope([(0, 0), (1, 0), (0, 1)])
DELTA1 = simplex_segment(1)

point2 = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
point_sets = st.lists(point2, min_size=1, max_size=6)


def polygons(min_size=3):
    return st.lists(point2, min_size=min_size, max_size=6).map(LatticePolytope).filter(lambda P: P.dim == 2)


# hull ---------------------------------------------------------------------------


def test_hull_drops_interior_point():
    P = hull([(0, -1), (-1, 0), (1, 1), (0, 0)])
    assert set(P.vertices) == {(0, -1), (-1, 0), (1, 1)}


def test_hull_of_collinear_points_is_a_segment():
    P = hull([(0, 0), (2, 0), (1, 0)])
    assert P.vertices == ((0, 0), (2, 0))
    assert P.dim == 1


def test_hull_unit_triangle():
    assert set(hull([(0, 0), (1, 0), (0, 1)]).vertices) == {(0, 0), (1, 0), (0, 1)}


def test_hull_rejects_mixed_dimensions():
    with pytest.raises(DimensionMismatch):
        hull([(0, 0), (1, 0, 0)])


@given(point_sets)
@settings(max_examples=60, deadline=None)
def test_vertices_match_monotone_chain(pts):
    assert set(LatticePolytope(pts).vertices) == vertices2d(pts)


# lattice points -----------------------------------------------------------------


def test_lattice_points_triangle_q():
    assert lattice_points(TRIANGLE_Q) == ((-1, 0), (0, -1), (0, 0), (1, 1))


def test_lattice_points_small_cases():
    assert lattice_points(dilate(DELTA1, 2)) == ((0,), (1,), (2,))
    assert len(lattice_points(SQUARE)) == 4


@given(point_sets)
@settings(max_examples=60, deadline=None)
def test_lattice_points_match_brute_force(pts):
    P = LatticePolytope(pts)
    assert set(P.lattice_points) == lattice_points2d(pts)
    assert list(P.lattice_points) == sorted(P.lattice_points)


def test_lattice_points_of_tilted_segment_in_space():
    P = LatticePolytope([(0, 0, 0), (2, 4, 6)])
    assert P.lattice_points == ((0, 0, 0), (1, 2, 3), (2, 4, 6))


# faces --------------------------------------------------------------------------


def _face_counts(P):
    out = {}
    for f in faces(P):
        out[f.polytope.dim] = out.get(f.polytope.dim, 0) + 1
    return out


def test_face_counts():
    assert _face_counts(DELTA1) == {1: 1, 0: 2}
    assert _face_counts(SQUARE) == {2: 1, 1: 4, 0: 4}
    assert _face_counts(TRIANGLE_Q) == {2: 1, 1: 3, 0: 3}


def test_face_lattice_of_cube():
    cube = LatticePolytope([(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)])
    assert _face_counts(cube) == {3: 1, 2: 6, 1: 12, 0: 8}


@given(polygons())
@settings(max_examples=40, deadline=None)
def test_edges_match_oracle(P):
    pts = list(P.vertices)
    ours = sorted(sorted(f.polytope.lattice_points) for f in faces(P) if f.polytope.dim == 1)
    theirs = sorted(sorted(e) for e in edges2d(pts))
    assert ours == theirs


# Minkowski arithmetic -----------------------------------------------------------


def test_minkowski_examples():
    assert minkowski_sum(DELTA1, dilate(DELTA1, 2)) == dilate(DELTA1, 3)
    assert minkowski_sum(SQUARE, SQUARE) == dilate(SQUARE, 2)
    seg = LatticePolytope([(0, 0), (1, 0)])
    assert set(minkowski_sum(UNIT_TRIANGLE, seg).vertices) == {(0, 0), (2, 0), (1, 1), (0, 1)}


def test_dilate_examples():
    assert len(dilate(DELTA1, 2).lattice_points) == 3
    assert len(dilate(UNIT_TRIANGLE, 3).lattice_points) == 10
    with pytest.raises(ValueError):
        dilate(SQUARE, 0)


@given(polygons(), polygons())
@settings(max_examples=40, deadline=None)
def test_minkowski_sum_properties(P, Q):
    S = minkowski_sum(P, Q)
    assert set(S.vertices) == vertex_set_of_sum(P.vertices, Q.vertices)
    sums = {la.vadd(p, q) for p in P.lattice_points for q in Q.lattice_points}
    assert sums <= set(S.lattice_points)


@given(polygons(), st.integers(1, 3), st.integers(1, 3))
@settings(max_examples=30, deadline=None)
def test_dilation_is_additive(P, a, b):
    assert dilate(P, a + b) == minkowski_sum(dilate(P, a), dilate(P, b))


# joins --------------------------------------------------------------------------


def test_join_wildtame():
    J = join(simplex_segment(7), simplex_segment(2))
    assert J.dim == 3
    assert len(J.lattice_points) == 11


def test_join_small():
    point = LatticePolytope([()])
    assert join(point, point) == LatticePolytope([(0,), (1,)])
    J = join(DELTA1, DELTA1)
    assert J.dim == 3 and len(J.lattice_points) == 4


@given(polygons(), st.integers(1, 3))
@settings(max_examples=25, deadline=None)
def test_join_lattice_points_are_union(P, c):
    J = join(P, simplex_segment(c))
    left = {p + (0, 0) for p in P.lattice_points}
    right = {(0, 0, k, 1) for k in range(c + 1)}
    assert set(J.lattice_points) == left | right


# widths -------------------------------------------------------------------------


def test_width_examples():
    assert lattice_width(SQUARE, (1, 0)) == 1
    assert lattice_width(TRIANGLE_Q, (1, 1)) == 2
    assert lattice_width(LatticePolytope([(0, 0), (7, 0)]), (0, 1)) == 7


def test_width_rejects_bad_directions():
    with pytest.raises(ValueError):
        lattice_width(SQUARE, (0, 0))
    with pytest.raises(ValueError):
        lattice_width(SQUARE, (2, 0))


@given(polygons(), st.sampled_from([(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2)]))
@settings(max_examples=40, deadline=None)
def test_width_matches_oracle(P, d):
    assert lattice_width(P, d) == width_along2d(P.vertices, d)


@given(polygons())
@settings(max_examples=40, deadline=None)
def test_minimal_width_matches_oracle(P):
    w, form = minimal_lattice_width(P)
    assert w == min_width2d(P.vertices)
    assert w == max(la.dot(form, x) for x in P.lattice_points) - min(la.dot(form, x) for x in P.lattice_points)


@given(polygons(), st.sampled_from([(1, 0), (0, 1), (1, 1), (2, 1)]), st.integers(-2, 2), st.integers(-2, 2))
@settings(max_examples=40, deadline=None)
def test_width_is_unimodular_invariant(P, d, k, t):
    f = AffineLatticeMap(((1, k), (0, 1)), (t, -t))
    assert lattice_width(image(P, f), f.linear(d)) == lattice_width(P, d)


# segment embeddings -------------------------------------------------------------


def test_segment_embedding_examples():
    assert len(segment_embeddings(SQUARE, 1)) == 6
    assert segment_embeddings(TRIANGLE_Q, 2) == []
    assert segment_embeddings(LatticePolytope([(0,), (3,)]), 3) == [((0,), (1,))]


def _brute_embeddings(P, c):
    pts = set(P.lattice_points)
    out = set()
    for s in pts:
        for t in pts:
            d = la.vsub(t, s)
            if s < t and all(x % c == 0 for x in d):
                step = tuple(x // c for x in d)
                if la.vgcd(step) == 1 and all(la.vadd(s, la.vscale(i, step)) in pts for i in range(c + 1)):
                    out.add((s, step))
    return out


@given(polygons(), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_segment_embeddings_match_brute_force(P, c):
    found = segment_embeddings(P, c)
    assert set(found) == _brute_embeddings(P, c)
    for s, step in found:
        form = (-step[1], step[0])
        # the form measuring along the segment spans at least c on L_P
        assert max(la.dot((step[0], step[1]), x) for x in P.lattice_points) - min(la.dot(step, x) for x in P.lattice_points) >= c
        assert lattice_length(s, la.vadd(s, la.vscale(c, step))) == c
        assert form != (0, 0)


# pyramids and homotheties -------------------------------------------------------


def test_pyramid_examples():
    assert len(pyramid_apex(UNIT_TRIANGLE)) == 3
    assert pyramid_apex(SQUARE) == []
    J = join(simplex_segment(7), LatticePolytope([()]))
    apexes = [a for a, _ in pyramid_apex(J)]
    assert (0, 1) in apexes


def test_homothety_examples():
    big = translate(dilate(UNIT_TRIANGLE, 2), (1, 1))
    assert homothety_check(UNIT_TRIANGLE, big).factor == 2
    assert homothety_check(UNIT_TRIANGLE, SQUARE) is None
    h = homothety_check(dilate(UNIT_TRIANGLE, 2), UNIT_TRIANGLE)
    assert h.factor == Fraction(1, 2)
    assert h.center == (Fraction(0), Fraction(0))


def test_homothety_to_a_point():
    h = homothety_check(SQUARE, LatticePolytope([(3, 4)]))
    assert h.factor == 0


def test_summand_examples():
    assert minkowski_summand_check(SQUARE, dilate(SQUARE, 2)) == SQUARE
    assert minkowski_summand_check(UNIT_TRIANGLE, SQUARE) is None
    big = dilate(UNIT_TRIANGLE, 2)
    R = minkowski_summand_check(UNIT_TRIANGLE, big)
    assert R == UNIT_TRIANGLE
    assert homothety_check(big, R) is not None


def test_summand_candidate_mode_in_space():
    cube = LatticePolytope([(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)])
    assert minkowski_summand_check(cube, dilate(cube, 2), candidate=cube) == cube
    with pytest.raises(ValueError):
        minkowski_summand_check(cube, dilate(cube, 2))


# isomorphisms and symmetries ----------------------------------------------------


def test_affine_iso_examples():
    f = affine_lattice_iso(DELTA1, DELTA1)
    assert f((0,)) == (0,) or f((0,)) == (1,)
    g = affine_lattice_iso(LatticePolytope([(0, 0), (1, 0)]), LatticePolytope([(0, 0), (0, 1)]))
    assert {g((0, 0)), g((1, 0))} == {(0, 0), (0, 1)}
    assert affine_lattice_iso(TRIANGLE_Q, UNIT_TRIANGLE) is None


def test_symmetry_counts():
    assert len(symmetries(DELTA1)) == 2
    assert len(symmetries(SQUARE)) == 8
    syms = symmetries(TRIANGLE_Q)
    assert len(syms) == 6


def _closed_under_composition(P, maps):
    keys = {(f.matrix, f.translation) for f in maps}
    for f in maps:
        for g in maps:
            h = f.compose(g)
            if (h.matrix, h.translation) not in keys:
                return False
    return True


def test_symmetry_groups_are_closed():
    for P in (SQUARE, TRIANGLE_Q, UNIT_TRIANGLE, dilate(DELTA1, 3)):
        maps = symmetries(P)
        assert _closed_under_composition(P, maps)
        for f in maps:
            assert {f(x) for x in P.lattice_points} == set(P.lattice_points)
