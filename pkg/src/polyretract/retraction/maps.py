"""Graded algebra maps between polytopal algebras and the basic retractions."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .. import linalg as la
from ..geometry import LatticePolytope, faces
from ..laurent import LaurentPolynomial
from ..semigroup import BinomialRelation, difference_group, polytopal_semigroup, toric_relations

Point = tuple[int, ...]


class HomomorphismViolation(ValueError):
    def __init__(self, relation: BinomialRelation, left: LaurentPolynomial, right: LaurentPolynomial, generators):
        self.relation = relation
        self.left = left
        self.right = right
        lhs = " * ".join(str(generators[i]) for i in relation.left)
        rhs = " * ".join(str(generators[i]) for i in relation.right)
        super().__init__(f"relation {lhs} = {rhs} is not preserved")


class KernelMismatch(ValueError):
    def __init__(self, zeros: Sequence[Point]):
        self.zeros = list(zeros)
        super().__init__(f"generators mapped to zero {self.zeros} are not the complement of a face")


def lift(x: Sequence[int], d: int = 1) -> Point:
    return tuple(x) + (d,)


def generator(x: Sequence[int], coeff=1) -> LaurentPolynomial:
    """The degree-1 monomial of ``k[P]`` attached to the lattice point ``x``."""
    return LaurentPolynomial.monomial(lift(x), coeff)


def default_degree_bound(P: LatticePolytope) -> int:
    return max(2, P.dim + 1)


def degree_one_points(f: LaurentPolynomial) -> dict[Point, Fraction]:
    """Coefficients of a degree-1 element keyed by lattice point."""
    out = {}
    for e, c in f.items():
        if e[-1] != 1:
            raise ValueError("element is not homogeneous of degree 1")
        out[e[:-1]] = c
    return out


class GradedAlgebraMap:
    """Degree-preserving algebra map ``k[P] -> k[target]`` given on ``L_P``.

    Construction verifies every binomial relation of ``S_P`` up to
    ``degree_bound`` unless ``check=False``.
    """

    def __init__(
        self,
        polytope: LatticePolytope,
        images: Mapping[Sequence[int], LaurentPolynomial],
        degree_bound: int | None = None,
        target: LatticePolytope | None = None,
        check: bool = True,
    ):
        self.polytope = polytope
        self.target = target if target is not None else polytope
        self.degree_bound = degree_bound if degree_bound is not None else default_degree_bound(polytope)
        self.semigroup = polytopal_semigroup(polytope)
        imgs = {tuple(k): v for k, v in images.items()}
        missing = [x for x in polytope.lattice_points if x not in imgs]
        if missing:
            raise ValueError(f"no image given for {missing}")
        extra = [k for k in imgs if k not in set(polytope.lattice_points)]
        if extra:
            raise ValueError(f"images given for points outside the polytope: {extra}")
        tpoints = set(self.target.lattice_points)
        n1 = self.target.ambient_dim + 1
        for x, f in imgs.items():
            if f.ambient_dim != n1:
                raise ValueError(f"image of {x} has wrong ambient dimension")
            for e in f.support:
                if e[-1] != 1 or e[:-1] not in tpoints:
                    raise ValueError(f"image of {x} is not a combination of degree-1 generators")
        self.images: dict[Point, LaurentPolynomial] = {x: imgs[x] for x in polytope.lattice_points}
        self._cache: dict[Point, LaurentPolynomial] = {}
        if check:
            self.verify()

    # structure -------------------------------------------------------

    def __repr__(self):
        return f"GradedAlgebraMap({self.polytope!r}, D={self.degree_bound})"

    def __eq__(self, other):
        return isinstance(other, GradedAlgebraMap) and self.polytope == other.polytope and self.images == other.images

    def __hash__(self):
        return hash((self.polytope, tuple(self.images.items())))

    @property
    def is_endomorphism(self) -> bool:
        return self.target == self.polytope

    def relations(self) -> list[BinomialRelation]:
        return toric_relations(self.semigroup, self.degree_bound)

    def product(self, indices: Sequence[int]) -> LaurentPolynomial:
        gens = self.polytope.lattice_points
        out = LaurentPolynomial.constant(self.target.ambient_dim + 1)
        for i in indices:
            out = out * self.images[gens[i]]
        return out

    def verify(self):
        for rel in self.relations():
            left, right = self.product(rel.left), self.product(rel.right)
            if left != right:
                raise HomomorphismViolation(rel, left, right, self.polytope.lattice_points)

    def image_of_monomial(self, s: Sequence[int]) -> LaurentPolynomial:
        s = tuple(s)
        if s in self._cache:
            return self._cache[s]
        if s[-1] == 1 and s[:-1] in self.images:
            res = self.images[s[:-1]]
        else:
            idx = self.semigroup.decompose(s)
            if idx is None:
                raise ValueError(f"{s} is not in the semigroup of the polytope")
            res = self.product(idx)
        self._cache[s] = res
        return res

    def __call__(self, f: LaurentPolynomial) -> LaurentPolynomial:
        out = LaurentPolynomial.zero(self.target.ambient_dim + 1)
        for e, c in f.items():
            out = out + self.image_of_monomial(e) * c
        return out

    apply = __call__

    def compose(self, inner: GradedAlgebraMap, check: bool = False) -> GradedAlgebraMap:
        """``self ∘ inner``."""
        if inner.target != self.polytope:
            raise ValueError("maps are not composable")
        imgs = {x: self(f) for x, f in inner.images.items()}
        return GradedAlgebraMap(inner.polytope, imgs, min(self.degree_bound, inner.degree_bound), self.target, check=check)

    def linear_matrix(self) -> list[list[Fraction]]:
        """Rows indexed by target lattice points, columns by source points."""
        tp = self.target.lattice_points
        out = [[Fraction(0)] * len(self.polytope.lattice_points) for _ in tp]
        index = {x: i for i, x in enumerate(tp)}
        for j, x in enumerate(self.polytope.lattice_points):
            for y, c in degree_one_points(self.images[x]).items():
                out[index[y]][j] = c
        return out

    def degree_one_rank(self) -> int:
        return la.rank(self.linear_matrix())

    def to_json(self) -> dict:
        from ..io import map_to_json

        return map_to_json(self)


def identity_map(P: LatticePolytope, degree_bound: int | None = None) -> GradedAlgebraMap:
    return GradedAlgebraMap(P, {x: generator(x) for x in P.lattice_points}, degree_bound, check=False)


def check_homomorphism(images: Mapping, P: LatticePolytope, degree_bound: int | None = None, target: LatticePolytope | None = None) -> GradedAlgebraMap:
    return GradedAlgebraMap(P, images, degree_bound, target)


def check_idempotent(h: GradedAlgebraMap) -> bool:
    if not h.is_endomorphism:
        return False
    return all(h(f) == f for f in h.images.values())


@dataclass(frozen=True)
class ImageDimension:
    dimension: int
    trials: int
    seed: int


def jacobian_rank(polys: Sequence[LaurentPolynomial], trials: int = 5, seed: int = 0) -> int:
    """Maximal Jacobian rank at random integer points (transcendence degree in char 0)."""
    if not polys:
        return 0
    d = polys[0].ambient_dim
    rng = random.Random(seed)
    parts = [[p.derivative(j) for j in range(d)] for p in polys]
    best = 0
    for _ in range(trials):
        pt = [Fraction(rng.randint(2, 97)) for _ in range(d)]
        jac = [[q.evaluate(pt) for q in row] for row in parts]
        best = max(best, la.rank(jac))
        if best == min(len(polys), d):
            break
    return best


def image_dimension(h: GradedAlgebraMap, trials: int = 5, seed: int = 0) -> ImageDimension:
    polys = [f for f in h.images.values() if f]
    dim = jacobian_rank(polys, trials, seed)
    return ImageDimension(min(dim, difference_group(h.semigroup).rank), trials, seed)


def codimension(h: GradedAlgebraMap, trials: int = 5, seed: int = 0) -> int:
    return difference_group(h.semigroup).rank - image_dimension(h, trials, seed).dimension


def kernel_monomials(h: GradedAlgebraMap) -> LatticePolytope | None:
    """The face ``F`` with ``h(x) = 0`` exactly for ``x`` off ``F``; ``None`` if nothing vanishes."""
    zeros = [x for x, f in h.images.items() if not f]
    if not zeros:
        return None
    keep = tuple(x for x in h.polytope.lattice_points if x not in set(zeros))
    if keep:
        for face in faces(h.polytope):
            if face.polytope.lattice_points == keep:
                return face.polytope
    raise KernelMismatch(zeros)


def is_face(P: LatticePolytope, F: LatticePolytope) -> bool:
    return any(face.polytope == F for face in faces(P))


def face_retraction(P: LatticePolytope, F: LatticePolytope, degree_bound: int | None = None) -> GradedAlgebraMap:
    if not is_face(P, F):
        raise ValueError("not a face of the polytope")
    keep = set(F.lattice_points)
    zero = LaurentPolynomial.zero(P.ambient_dim + 1)
    imgs = {x: generator(x) if x in keep else zero for x in P.lattice_points}
    return GradedAlgebraMap(P, imgs, degree_bound)


class FibrationError(ValueError):
    pass


class LatticeFibration:
    """``(P, H, W)``: ``H`` an affine subspace through ``base_point``, ``W`` a lattice.

    The three defining conditions are checked at construction.
    """

    def __init__(self, polytope: LatticePolytope, base_point: Sequence[int], h_directions: Sequence[Sequence[int]], w_basis: Sequence[Sequence[int]]):
        self.polytope = polytope
        self.base_point = tuple(base_point)
        n = polytope.ambient_dim
        self.h_directions = tuple(la.saturation_basis(h_directions, n)) if any(any(v) for v in h_directions) else ()
        self.w_basis = tuple(la.hnf(w_basis))
        if len(self.w_basis) + len(self.h_directions) != polytope.dim:
            raise FibrationError("dim W + dim H must equal dim P")
        for v in list(self.h_directions) + list(self.w_basis):
            if polytope.direction_to_intrinsic(v) is None:
                raise FibrationError("H and W must be parallel to the affine hull of P")
        if not polytope.in_affine_hull(self.base_point):
            raise FibrationError("base point must lie in the affine hull of P")
        self.base_points = tuple(x for x in polytope.lattice_points if self.in_h(x))
        self.projection: dict[Point, Point] = {}
        for x in polytope.lattice_points:
            hits = [y for y in self.base_points if la.in_lattice(self.w_basis, la.vsub(x, y))]
            if len(hits) != 1:
                raise FibrationError(f"lattice point {x} is not covered by exactly one base fiber")
            self.projection[x] = hits[0]
        lat = la.hnf([la.vsub(x, polytope.lattice_points[0]) for x in polytope.lattice_points])
        lw = la.intersect_with_subspace(lat, self.w_basis, n) if self.w_basis else []
        lh = la.intersect_with_subspace(lat, self.h_directions, n) if self.h_directions else []
        if len(lw) + len(lh) != len(lat) or la.hnf(list(lw) + list(lh)) != lat:
            raise FibrationError("lattice of P is not the direct sum of its parts in W and H")

    @property
    def codimension(self) -> int:
        return len(self.w_basis)

    def in_h(self, x: Sequence[int]) -> bool:
        rel = la.vsub(x, self.base_point)
        if not self.h_directions:
            return not any(rel)
        return la.rank(list(self.h_directions) + [rel]) == len(self.h_directions)

    def base_polytope(self) -> LatticePolytope:
        return LatticePolytope(self.base_points)

    def to_json(self) -> dict:
        from ..io import fibration_to_json

        return fibration_to_json(self)


def fibration_retraction(fib: LatticeFibration, degree_bound: int | None = None) -> GradedAlgebraMap:
    imgs = {x: generator(fib.projection[x]) for x in fib.polytope.lattice_points}
    return GradedAlgebraMap(fib.polytope, imgs, degree_bound)


def facet_valuation(P: LatticePolytope, F: LatticePolytope) -> tuple[int, ...]:
    """Primitive form on ``gp(S_P)`` vanishing on ``F`` and nonnegative on ``P``."""
    idx = P.facet_index(F)
    a, b = P.facet_forms()[idx]
    form = tuple(a) + (-b,)
    gp = difference_group(polytopal_semigroup(P))
    g = la.vgcd([la.dot(form, v) for v in gp.basis])
    return tuple(x // g for x in form)
