"""Worked instances: the codimension-2 retraction of ``join(7Δ1, 2Δ1)`` and small squares."""

from __future__ import annotations

from fractions import Fraction

from ..geometry import LatticePolytope, join, simplex_segment
from ..groups import AutomorphismWord, ColumnVector, Elementary
from .certificates import AutomorphismStage, ChainCertificate, EmbeddingStage, FaceRetraction, MorphismStage, RetractionStage
from .maps import GradedAlgebraMap, generator


def wildtame_polytope() -> LatticePolytope:
    return join(simplex_segment(7), simplex_segment(2))


def a_point(i: int) -> tuple[int, int, int]:
    """``A_i`` for ``i`` in 1..8."""
    return (i - 1, 0, 0)


def b_point(j: int) -> tuple[int, int, int]:
    """``B_j`` for ``j`` in 1..3."""
    return (0, j - 1, 1)


def wildtame_retraction(degree_bound: int = 2) -> GradedAlgebraMap:
    """``A_i -> A_i`` and ``B_j -> A_{2j} + A_{2j+1}``."""
    P = wildtame_polytope()
    imgs = {a_point(i): generator(a_point(i)) for i in range(1, 9)}
    for j in range(1, 4):
        imgs[b_point(j)] = generator(a_point(2 * j)) + generator(a_point(2 * j + 1))
    return GradedAlgebraMap(P, imgs, degree_bound)


def trapezoid() -> LatticePolytope:
    """The intermediate polygon ``conv{(0,0), (7,0), (0,1), (4,1)}``."""
    return LatticePolytope([(0, 0), (7, 0), (0, 1), (4, 1)])


def wildtame_chain(degree_bound: int = 2) -> ChainCertificate:
    """``h = iota ∘ pi_bottom ∘ alpha ∘ f`` through the trapezoid."""
    P, T = wildtame_polytope(), trapezoid()
    f_imgs = {a_point(i): generator((i - 1, 0)) for i in range(1, 9)}
    f_imgs.update({b_point(j): generator((2 * j - 2, 1)) for j in range(1, 4)})
    f = GradedAlgebraMap(P, f_imgs, degree_bound, target=T)
    bottom = next(i for i in range(len(T.facets)) if T.facet_points(i) == tuple((x, 0) for x in range(8)))
    alpha = AutomorphismWord(T, [Elementary(ColumnVector((1, -1), bottom), Fraction(1)), Elementary(ColumnVector((2, -1), bottom), Fraction(1))])
    face = T.facet_polytope(bottom)
    iota = {(x, 0): generator(a_point(x + 1)) for x in range(8)}
    stages = [MorphismStage(f), AutomorphismStage(alpha), RetractionStage(T, FaceRetraction(face)), EmbeddingStage(face, P, iota)]
    return ChainCertificate(wildtame_retraction(degree_bound), stages, degree_bound)


def unit_square() -> LatticePolytope:
    return LatticePolytope([(0, 0), (1, 0), (0, 1), (1, 1)])


def square_facet_example(degree_bound: int = 3) -> GradedAlgebraMap:
    """``W -> U``, ``T -> V`` with ``U, V`` fixed (corners (0,0), (1,0), (0,1), (1,1) are U, V, W, T)."""
    sq = unit_square()
    imgs = {(0, 0): generator((0, 0)), (1, 0): generator((1, 0)), (0, 1): generator((0, 0)), (1, 1): generator((1, 0))}
    return GradedAlgebraMap(sq, imgs, degree_bound)
