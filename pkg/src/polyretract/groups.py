"""Generators of the graded automorphism group of ``k[P]`` and words in them.

Every factor acts directly on monomials of ``S_P`` in any degree, so a
word can be applied to arbitrary elements without choosing a presentation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from . import linalg as la
from .geometry import AffineLatticeMap, LatticePolytope, symmetries
from .laurent import LaurentPolynomial, binomial_expand
from .retraction.maps import GradedAlgebraMap, generator
from .semigroup import difference_group, polytopal_semigroup

Point = tuple[int, ...]


@dataclass(frozen=True)
class ColumnVector:
    vector: Point
    facet: int  # index into polytope.facets

    def base_points(self, P: LatticePolytope) -> tuple[Point, ...]:
        return P.facet_points(self.facet)


def _is_column(P: LatticePolytope, v: Point, facet: int) -> bool:
    base = set(P.facet_points(facet))
    return all(P.contains(la.vadd(x, v)) for x in P.lattice_points if x not in base)


def column_vectors(P: LatticePolytope) -> list[ColumnVector]:
    """All pairs ``(v, F)`` with ``x + v`` in ``P`` for every lattice point ``x`` off ``F``."""
    if P.dim < 1:
        return []
    pts = P.lattice_points
    cands = sorted({la.vsub(a, b) for a in pts for b in pts if a != b})
    out = []
    for v in cands:
        for i in range(len(P.facets)):
            if _is_column(P, v, i):
                out.append(ColumnVector(v, i))
    return out


def height_form(P: LatticePolytope, col: ColumnVector) -> tuple[int, ...]:
    """Linear form on ``Z^(n+1)`` computing ``ht_v``."""
    a, b = P.facet_forms()[col.facet]
    if la.dot(a, col.vector) != -1:
        raise ValueError(f"{col.vector} is not a column vector for facet {col.facet}")
    return tuple(a) + (-b,)


def height(P: LatticePolytope, col: ColumnVector, s: Sequence[int]) -> int:
    """Largest ``m`` with ``s + m v`` in ``S_P``; additive on ``S_P``."""
    if not _is_column(P, col.vector, col.facet):
        raise ValueError("invalid column vector")
    S = polytopal_semigroup(P)
    if not S.contains(s):
        raise ValueError(f"{tuple(s)} is not in S_P")
    return la.dot(height_form(P, col), s)


def character_value(P: LatticePolytope, xi: Sequence[Fraction], s: Sequence[int]) -> Fraction:
    gp = difference_group(polytopal_semigroup(P))
    coords = gp.coordinates(s)
    out = Fraction(1)
    for x, c in zip(xi, coords):
        out *= Fraction(x) ** c
    return out


# factors ---------------------------------------------------------------------


@dataclass(frozen=True)
class Elementary:
    column: ColumnVector
    scalar: Fraction

    def inverse(self) -> Elementary:
        return Elementary(self.column, -self.scalar)


@dataclass(frozen=True)
class Toric:
    xi: tuple[Fraction, ...]

    def inverse(self) -> Toric:
        return Toric(tuple(1 / x for x in self.xi))


@dataclass(frozen=True)
class Symmetry:
    map: AffineLatticeMap

    def inverse(self) -> Symmetry:
        return Symmetry(self.map.inverse())


Factor = Union[Elementary, Toric, Symmetry]


class AutomorphismWord:
    """``factors[0] ∘ factors[1] ∘ ... ∘ factors[-1]`` acting on ``k[P]``."""

    def __init__(self, polytope: LatticePolytope, factors: Sequence[Factor] = ()):
        self.polytope = polytope
        self.factors: tuple[Factor, ...] = tuple(self._normalize(f) for f in factors)
        self._semigroup = polytopal_semigroup(polytope)
        self._gp = difference_group(self._semigroup)
        self._forms: dict[ColumnVector, tuple[int, ...]] = {}
        self._validate()

    @staticmethod
    def _normalize(f: Factor) -> Factor:
        if isinstance(f, Elementary):
            return Elementary(ColumnVector(tuple(f.column.vector), f.column.facet), Fraction(f.scalar))
        if isinstance(f, Toric):
            return Toric(tuple(Fraction(x) for x in f.xi))
        return f

    def _validate(self):
        P = self.polytope
        pts = set(P.lattice_points)
        for f in self.factors:
            if isinstance(f, Elementary):
                if not (0 <= f.column.facet < len(P.facets)) or not _is_column(P, f.column.vector, f.column.facet):
                    raise ValueError(f"invalid column vector {f.column}")
                self._forms[f.column] = height_form(P, f.column)
            elif isinstance(f, Toric):
                if len(f.xi) != self._gp.rank or any(x == 0 for x in f.xi):
                    raise ValueError("toric factor needs rank-many nonzero scalars")
            elif isinstance(f, Symmetry):
                if not f.map.is_unimodular() or {f.map(x) for x in pts} != pts:
                    raise ValueError("symmetry does not preserve the lattice points")
            else:
                raise TypeError(f"unknown factor {f!r}")

    def __len__(self):
        return len(self.factors)

    def __repr__(self):
        return f"AutomorphismWord({list(self.factors)})"

    def __eq__(self, other):
        return isinstance(other, AutomorphismWord) and self.polytope == other.polytope and self.factors == other.factors

    def __hash__(self):
        return hash((self.polytope, self.factors))

    def then(self, other: AutomorphismWord) -> AutomorphismWord:
        """``self ∘ other``."""
        return AutomorphismWord(self.polytope, self.factors + other.factors)

    def inverse(self) -> AutomorphismWord:
        return AutomorphismWord(self.polytope, [f.inverse() for f in reversed(self.factors)])

    # evaluation ------------------------------------------------------

    def _apply_factor(self, f: Factor, poly: LaurentPolynomial) -> LaurentPolynomial:
        d = self.polytope.ambient_dim + 1
        out = LaurentPolynomial.zero(d)
        if isinstance(f, Elementary):
            form = self._forms[f.column]
            step = LaurentPolynomial.monomial(tuple(f.column.vector) + (0,))
            for e, c in poly.items():
                h = la.dot(form, e)
                if h < 0:
                    raise ValueError(f"{e} is not supported on S_P")
                out = out + binomial_expand(LaurentPolynomial.monomial(e, c), step, f.scalar, h)
            return out
        if isinstance(f, Toric):
            for e, c in poly.items():
                val = Fraction(1)
                for x, k in zip(f.xi, self._gp.coordinates(e)):
                    val *= x**k
                out = out + LaurentPolynomial.monomial(e, c * val)
            return out
        m = f.map
        return poly.map_exponents(lambda e: tuple(m.linear(e[:-1])[i] + e[-1] * m.translation[i] for i in range(d - 1)) + (e[-1],))

    def __call__(self, poly: LaurentPolynomial) -> LaurentPolynomial:
        for f in reversed(self.factors):
            poly = self._apply_factor(f, poly)
        return poly

    evaluate = __call__

    def to_map(self, degree_bound: int | None = None, check: bool = True) -> GradedAlgebraMap:
        imgs = {x: self(generator(x)) for x in self.polytope.lattice_points}
        return GradedAlgebraMap(self.polytope, imgs, degree_bound, check=check)

    def is_normal_form(self) -> bool:
        """Elementary factors grouped by facet with nondecreasing facet sizes,
        then at most one toric factor, then at most one symmetry."""
        stage = 0
        last = -1
        done: set[int] = set()
        current = None
        for f in self.factors:
            if isinstance(f, Elementary):
                if stage > 0:
                    return False
                facet = f.column.facet
                if facet != current:
                    if facet in done:
                        return False
                    if current is not None:
                        done.add(current)
                    current = facet
                size = len(self.polytope.facet_points(facet))
                if size < last:
                    return False
                last = size
            elif isinstance(f, Toric):
                if stage > 0:
                    return False
                stage = 1
            else:
                if stage > 1:
                    return False
                stage = 2
        return True

    def to_json(self) -> dict:
        from .io import word_to_json

        return word_to_json(self)


def elementary(P: LatticePolytope, col: ColumnVector, scalar, degree_bound: int | None = None) -> GradedAlgebraMap:
    return AutomorphismWord(P, [Elementary(col, Fraction(scalar))]).to_map(degree_bound)


def toric(P: LatticePolytope, xi: Sequence, degree_bound: int | None = None) -> GradedAlgebraMap:
    return AutomorphismWord(P, [Toric(tuple(Fraction(x) for x in xi))]).to_map(degree_bound)


def symmetry_group(P: LatticePolytope) -> list[AffineLatticeMap]:
    """``symmetries(P)`` with closure under composition verified."""
    maps = symmetries(P)
    pts = P.lattice_points
    table = {tuple(f(x) for x in pts) for f in maps}
    for f in maps:
        for g in maps:
            if tuple(f.compose(g)(x) for x in pts) not in table:
                raise AssertionError("symmetry set is not closed under composition")
    return maps


def toric_from_character(P: LatticePolytope, values: dict[Point, Fraction]) -> Toric:
    """Toric factor whose character takes prescribed values on a generating set of ``gp(S_P)``.

    ``values`` maps vectors of ``Z^(n+1)`` to scalars; the vectors must span
    ``gp`` rationally and the assignment must be consistent and solvable over Q.
    """
    gp = difference_group(polytopal_semigroup(P))
    vecs = list(values)
    coords = [gp.coordinates(v) for v in vecs]
    r = gp.rank
    # express each basis vector as an integer combination of the given vectors
    xi = []
    for i in range(r):
        target = [int(j == i) for j in range(r)]
        sol = la.solve(la.transpose(coords), target)
        if sol is None or any(Fraction(t).denominator != 1 for t in sol):
            raise ValueError("character data does not determine an integral solution")
        val = Fraction(1)
        for t, v in zip(sol, vecs):
            val *= Fraction(values[v]) ** int(t)
        xi.append(val)
    tor = Toric(tuple(xi))
    for v, val in values.items():
        if character_value(P, tor.xi, v) != Fraction(val):
            raise ValueError("inconsistent character data")
    return tor
