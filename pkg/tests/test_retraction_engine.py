import random
from dataclasses import replace
from fractions import Fraction

import pytest

from generators import conjugate, random_codim_one, random_fibration
from polyretract import linalg as la
from polyretract.geometry import LatticePolytope, dilate, simplex_segment
from polyretract.groups import AutomorphismWord, Elementary, Toric, column_vectors
from polyretract.laurent import LaurentPolynomial
from polyretract.retraction.bases import (
    BaseWitness,
    CorrectionError,
    correct_facet_base,
    correct_interior_base,
    find_base,
)
from polyretract.retraction.catalog import (
    a_point,
    b_point,
    square_facet_example,
    unit_square,
    wildtame_chain,
    wildtame_polytope,
    wildtame_retraction,
)
from polyretract.retraction.certificates import verify_certificate
from polyretract.retraction.maps import (
    FibrationError,
    GradedAlgebraMap,
    HomomorphismViolation,
    KernelMismatch,
    LatticeFibration,
    check_homomorphism,
    check_idempotent,
    codimension,
    face_retraction,
    facet_valuation,
    fibration_retraction,
    generator,
    identity_map,
    image_dimension,
    kernel_monomials,
)
from polyretract.retraction.tameness import PreconditionError, polygon_tameness, segment_obstruction

SQUARE = unit_square()
U, V, W, T = (0, 0), (1, 0), (0, 1), (1, 1)
RECT = LatticePolytope([(0, 0), (2, 0), (0, 1), (2, 1)])
ZERO3 = LaurentPolynomial.zero(3)
g = generator


def square_map(**moves):
    names = {"U": U, "V": V, "W": W, "T": T}
    imgs = {x: g(x) for x in SQUARE.lattice_points}
    for k, v in moves.items():
        imgs[names[k]] = g(names[v]) if v else ZERO3
    return imgs


def edge(P, points):
    F = LatticePolytope(points)
    assert any(P.facet_polytope(i) == F for i in range(len(P.facets)))
    return F


# homomorphisms -------------------------------------------------------------------


def test_wildtame_is_a_homomorphism():
    h = wildtame_retraction()
    b1, b2, b3 = (h.images[b_point(j)] for j in (1, 2, 3))
    assert b1 * b3 == b2 * b2
    # A_i sits at x^(i-1), so x^8 + 2x^9 + x^10 reads x^6 + 2x^7 + x^8 in degree 2
    assert b1 * b3 == LaurentPolynomial({(6, 0, 0, 2): 1, (7, 0, 0, 2): 2, (8, 0, 0, 2): 1}, 4)


def test_identity_is_a_homomorphism():
    h = check_homomorphism({x: g(x) for x in SQUARE.lattice_points}, SQUARE)
    assert check_idempotent(h)


def test_square_violation_is_reported():
    with pytest.raises(HomomorphismViolation) as info:
        check_homomorphism(square_map(T="U"), SQUARE)
    err = info.value
    # generator order U, W, V, T: the relation is UT = VW
    assert (err.relation.left, err.relation.right) == ((0, 3), (1, 2))
    assert err.left == g(U) * g(U) and err.right == g(V) * g(W)


def test_images_must_be_degree_one():
    imgs = {x: g(x) for x in SQUARE.lattice_points}
    imgs[U] = LaurentPolynomial.monomial((0, 0, 2))
    with pytest.raises(ValueError):
        GradedAlgebraMap(SQUARE, imgs)
    with pytest.raises(ValueError):
        GradedAlgebraMap(SQUARE, {U: g(U)})


def test_evaluation_on_higher_degree():
    h = square_facet_example()
    assert h.image_of_monomial((1, 1, 2)) == g(U) * g(V)
    assert h(g(W) * g(T) - g(U) * g(V)) == ZERO3


# idempotence, dimension, kernel monomials -----------------------------------------


def test_idempotence_examples():
    assert check_idempotent(wildtame_retraction())
    assert check_idempotent(identity_map(SQUARE))
    col = next(c for c in column_vectors(SQUARE) if c.vector == (0, -1))
    e = AutomorphismWord(SQUARE, [Elementary(col, Fraction(2))]).to_map()
    assert not check_idempotent(e)


def test_image_dimension_examples():
    assert image_dimension(identity_map(SQUARE)).dimension == 3
    assert image_dimension(wildtame_retraction()).dimension == 2
    assert codimension(wildtame_retraction()) == 2
    bottom = face_retraction(SQUARE, edge(SQUARE, [U, V]))
    assert image_dimension(bottom).dimension == 2
    report = image_dimension(bottom, trials=3, seed=7)
    assert (report.trials, report.seed) == (3, 7)


def test_kernel_monomials_examples():
    F = edge(SQUARE, [U, V])
    assert kernel_monomials(face_retraction(SQUARE, F)) == F
    assert kernel_monomials(wildtame_retraction()) is None
    # a lone vanishing vertex already breaks UT = VW, so the map is built unchecked
    lone = GradedAlgebraMap(SQUARE, square_map(T=None), check=False)
    with pytest.raises(KernelMismatch) as info:
        kernel_monomials(lone)
    assert info.value.zeros == [T]


def test_kernel_monomials_factor_through_the_face():
    for P in (SQUARE, RECT, wildtame_polytope()):
        for F in (P.facet_polytope(i) for i in range(len(P.facets))):
            h = face_retraction(P, F)
            assert kernel_monomials(h) == F
            for x in P.lattice_points:
                assert h.images[x] == (g(x) if x in F.lattice_points else LaurentPolynomial.zero(P.ambient_dim + 1))


def test_no_kernel_monomials_means_no_vanishing_monomials():
    h = wildtame_retraction(3)
    for s in h.semigroup.generators:
        assert h.image_of_monomial(s)
    for d in (2, 3):
        for x in wildtame_polytope().lattice_points:
            assert h.image_of_monomial(tuple(d * c for c in x) + (d,))


# face and fibration retractions ---------------------------------------------------


def test_face_retraction_examples():
    h = face_retraction(SQUARE, edge(SQUARE, [U, V]))
    assert h.images == square_map(W=None, T=None)
    assert check_idempotent(h)
    full = face_retraction(SQUARE, SQUARE)
    assert all(full.images[x] == g(x) for x in SQUARE.lattice_points)
    point = face_retraction(SQUARE, LatticePolytope([V]))
    assert [x for x in SQUARE.lattice_points if point.images[x]] == [V]
    with pytest.raises(ValueError):
        face_retraction(SQUARE, LatticePolytope([U, T]))


def test_fibration_retraction_examples():
    fib = LatticeFibration(RECT, (1, 0), [(0, 1)], [(1, 0)])
    h = fibration_retraction(fib)
    for (x, y), f in h.images.items():
        assert f == g((1, y))
    assert check_idempotent(h)
    sq = fibration_retraction(LatticeFibration(SQUARE, U, [(1, 0)], [(0, 1)]))
    assert sq.images == square_map(W="U", T="V")
    ident = fibration_retraction(LatticeFibration(SQUARE, U, [(1, 0), (0, 1)], []))
    assert all(ident.images[x] == g(x) for x in SQUARE.lattice_points)


def test_fibration_conditions_are_enforced():
    with pytest.raises(FibrationError):
        LatticeFibration(SQUARE, U, [(1, 0)], [(0, 1), (1, 0)])
    # W = Z(0, 2) leaves T and W uncovered
    with pytest.raises(FibrationError):
        LatticeFibration(SQUARE, U, [(1, 0)], [(0, 2)])
    # the triangle with vertices (0,0), (2,1), (1,2) has no fibration with W = Z(1, 1)
    with pytest.raises(FibrationError):
        LatticeFibration(LatticePolytope([(0, 0), (2, 1), (1, 2)]), (0, 0), [(1, -1)], [(1, 1)])


@pytest.mark.parametrize("seed", range(10))
def test_random_fibrations_give_retractions(seed):
    fib = random_fibration(random.Random(seed))
    h = fibration_retraction(fib)
    assert check_idempotent(h)
    assert codimension(h) == fib.codimension
    for x, y in fib.projection.items():
        assert fib.in_h(y) and la.in_lattice(fib.w_basis, la.vsub(x, y))


def test_retractions_commute_with_veronese():
    for P in (SQUARE, RECT, LatticePolytope([(0, 0), (3, 0), (0, 1), (1, 1)])):
        P2 = dilate(P, 2)
        for i in range(len(P.facets)):
            F = P.facet_polytope(i)
            h, h2 = face_retraction(P, F), face_retraction(P2, dilate(F, 2))
            for y in P2.lattice_points:
                assert h.image_of_monomial(y + (2,)) == h2.images[y].map_exponents(lambda e: e[:-1] + (2,))
    fib = LatticeFibration(RECT, (1, 0), [(0, 1)], [(1, 0)])
    fib2 = LatticeFibration(dilate(RECT, 2), (2, 0), [(0, 1)], [(1, 0)])
    h, h2 = fibration_retraction(fib), fibration_retraction(fib2)
    for y in dilate(RECT, 2).lattice_points:
        assert h.image_of_monomial(y + (2,)) == h2.images[y].map_exponents(lambda e: e[:-1] + (2,))


def test_facet_valuation_examples():
    assert facet_valuation(SQUARE, edge(SQUARE, [U, V])) == (0, 1, 0)
    assert facet_valuation(SQUARE, edge(SQUARE, [V, T])) == (-1, 0, 1)
    P = wildtame_polytope()
    facet = LatticePolytope([a_point(i) for i in range(1, 9)] + [b_point(1)])
    v = facet_valuation(P, facet)
    assert all(sum(a * b for a, b in zip(v, x + (1,))) == 0 for x in facet.lattice_points)
    assert sorted({sum(a * b for a, b in zip(v, x + (1,))) for x in P.lattice_points}) == [0, 1, 2]
    with pytest.raises(ValueError):
        facet_valuation(SQUARE, LatticePolytope([U]))


# bases ---------------------------------------------------------------------------


def test_find_base_examples():
    fib = LatticeFibration(RECT, (1, 0), [(0, 1)], [(1, 0)])
    w = find_base(fibration_retraction(fib)).witness
    assert w.points == ((1, 0), (1, 1)) and w.meets_interior
    F = edge(SQUARE, [U, V])
    w = find_base(face_retraction(SQUARE, F)).witness
    assert set(w.points) == {U, V} and not w.meets_interior
    w = find_base(wildtame_retraction()).witness
    assert set(w.points) == {a_point(i) for i in range(1, 9)} and not w.meets_interior


def test_interior_correction_on_a_plain_fibration():
    fib = LatticeFibration(RECT, (1, 0), [(0, 1)], [(1, 0)])
    h = fibration_retraction(fib)
    res = correct_interior_base(h, find_base(h).witness)
    assert all(x == 1 for x in res.toric.xi)
    assert res.fibration.w_basis == ((1, 0),)
    assert verify_certificate(res.certificate)


def test_interior_correction_neutralizes_a_torus_conjugation():
    fib = LatticeFibration(RECT, (1, 0), [(0, 1)], [(1, 0)])
    tau = AutomorphismWord(RECT, [Toric((Fraction(3), Fraction(-2), Fraction(1, 5)))])
    h = conjugate(fibration_retraction(fib), tau, 3)
    res = correct_interior_base(h, find_base(h).witness)
    cert = res.certificate
    assert verify_certificate(cert)
    # the recovered torus element undoes the scalars: h^tau is a plain fibration retraction
    inner = AutomorphismWord(RECT, [res.toric])
    for x in RECT.lattice_points:
        y = inner.inverse()(h(inner(g(x))))
        assert y.is_monomial() and y.single_term()[1] == 1


def test_interior_correction_needs_an_interior_base():
    h = face_retraction(SQUARE, edge(SQUARE, [U, V]))
    with pytest.raises(CorrectionError):
        correct_interior_base(h, BaseWitness((U, V), None, False))


def test_square_facet_correction():
    h = square_facet_example()
    res = correct_facet_base(h, find_base(h).witness)
    (factor,) = res.word.factors
    assert factor.column.vector == (0, -1) and factor.scalar == -1
    assert res.apex == W or res.apex == T
    conj = res.word.inverse().to_map().compose(h).compose(res.word.to_map())
    assert kernel_monomials(conj) == edge(SQUARE, [U, V])
    assert verify_certificate(res.certificate)


def test_facet_correction_cancels_a_precomposed_elementary():
    F = edge(SQUARE, [U, V])
    col = next(c for c in column_vectors(SQUARE) if c.vector == (0, -1))
    eps = AutomorphismWord(SQUARE, [Elementary(col, Fraction(5, 3))])
    h = conjugate(face_retraction(SQUARE, F), eps, 3)
    res = correct_facet_base(h, find_base(h).witness)
    assert res.word.factors[0].scalar == Fraction(5, 3)
    assert verify_certificate(res.certificate)


def test_facet_correction_rejects_face_retractions():
    h = face_retraction(SQUARE, edge(SQUARE, [U, V]))
    with pytest.raises(CorrectionError):
        correct_facet_base(h, BaseWitness((U, V), None, False))


# the polygon pipeline ------------------------------------------------------------


def test_pipeline_examples():
    fib = LatticeFibration(RECT, (1, 0), [(0, 1)], [(1, 0)])
    rep = polygon_tameness(fibration_retraction(fib, 4))
    assert rep.path == "interior" and rep.c == 1
    assert rep.certificate.inner.base.lattice_points == ((1, 0), (1, 1))
    F = edge(SQUARE, [U, V])
    rep = polygon_tameness(face_retraction(SQUARE, F, 4))
    assert rep.path == "kernel-monomials"
    rep = polygon_tameness(square_facet_example(4))
    assert rep.path == "facet" and verify_certificate(rep.certificate)


def test_pipeline_preconditions():
    with pytest.raises(PreconditionError):
        polygon_tameness(wildtame_retraction())
    with pytest.raises(PreconditionError):
        polygon_tameness(identity_map(SQUARE))
    col = next(c for c in column_vectors(SQUARE) if c.vector == (0, -1))
    with pytest.raises(PreconditionError):
        polygon_tameness(AutomorphismWord(SQUARE, [Elementary(col, 1)]).to_map())


def _frozen_subcase_instance():
    """A conjugated fibration retraction whose first candidate segment is not a base."""
    P = LatticePolytope([(-2, 1), (-1, 0), (1, 2), (3, 2)])

    def poly(terms):
        return LaurentPolynomial({e: Fraction(c) for e, c in terms.items()}, 3)

    row1 = {(0, 1, 1): 1, (1, 1, 1): 3}
    row2 = {(1, 2, 1): 1, (2, 2, 1): 6, (3, 2, 1): 9}
    imgs = {
        (-2, 1): poly({e: -8 * c for e, c in row1.items()}),
        (-1, 1): poly({e: 4 * c for e, c in row1.items()}),
        (0, 1): poly({e: -2 * c for e, c in row1.items()}),
        (1, 1): poly(row1),
        (-1, 0): poly({(-1, 0, 1): 1}),
        (1, 2): poly({e: 4 * c for e, c in row2.items()}),
        (2, 2): poly({e: -2 * c for e, c in row2.items()}),
        (3, 2): poly(row2),
    }
    return GradedAlgebraMap(P, imgs, 4)


def test_pipeline_diagnostics_on_failing_segments():
    rep = polygon_tameness(_frozen_subcase_instance())
    assert rep.certificate is not None and verify_certificate(rep.certificate)
    failing = [s for s in rep.segments if s.kernel_element is not None]
    assert failing and failing[0].points == ((-2, 1), (-1, 1), (0, 1))
    diag = failing[0]
    assert diag.width == 2 and diag.width_equals_c and diag.independent_of_base
    assert rep.subcase == "a1"
    assert rep.segments[-1].outcome == "base"


def test_obstruction_examples():
    assert segment_obstruction(LatticePolytope([(0, 0), (1, 1), (2, 1)]), 2)
    assert not segment_obstruction(SQUARE, 1)
    with pytest.raises(PreconditionError):
        segment_obstruction(simplex_segment(7), 3)


# certificates --------------------------------------------------------------------


def test_wildtame_chain_certificate():
    report = verify_certificate(wildtame_chain())
    assert report.ok and report.checked == 11


def test_tampered_certificate_names_the_generator():
    col = next(c for c in column_vectors(SQUARE) if c.vector == (0, -1))
    eps = AutomorphismWord(SQUARE, [Elementary(col, Fraction(2))])
    h = conjugate(face_retraction(SQUARE, edge(SQUARE, [U, V])), eps, 3)
    cert = polygon_tameness(h, 3).certificate
    assert verify_certificate(cert)
    factors = list(cert.conjugator.factors)
    i = next(k for k, f in enumerate(factors) if isinstance(f, Elementary))
    factors[i] = replace(factors[i], scalar=factors[i].scalar + 1)
    bad = replace(cert, conjugator=AutomorphismWord(SQUARE, factors))
    report = verify_certificate(bad)
    assert not report.ok
    assert report.divergence.generator in SQUARE.lattice_points
    assert report.divergence.expected == h.images[report.divergence.generator]


def test_certificate_with_wrong_embedding_data_fails():
    h = square_facet_example(3)
    cert = polygon_tameness(h, 3).certificate
    bad = replace(cert, embedding_images={U: g(U)})
    assert not verify_certificate(bad)


@pytest.mark.parametrize("seed", range(6))
def test_random_round_trips(seed):
    h, kind, _ = random_codim_one(random.Random(100 + seed))
    rep = polygon_tameness(h)
    assert rep.certificate is not None, rep.reason
    assert verify_certificate(rep.certificate)
    if kind == "facet":
        assert rep.path in ("kernel-monomials", "facet")
