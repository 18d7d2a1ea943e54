"""Affine semigroups: difference groups, membership, normality, relations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Sequence

from . import linalg as la
from .geometry import LatticePolytope

Vec = tuple[int, ...]


@dataclass(frozen=True)
class LatticeSubgroup:
    basis: tuple[Vec, ...]
    ambient_dim: int

    @classmethod
    def generated_by(cls, vectors: Sequence[Sequence[int]], n: int) -> LatticeSubgroup:
        return cls(tuple(la.hnf(vectors)), n)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __contains__(self, x: Sequence[int]) -> bool:
        return la.in_lattice(self.basis, x)

    def coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        c = la.lattice_coordinates(self.basis, x)
        if c is None or any(Fraction(t).denominator != 1 for t in c):
            raise ValueError(f"{tuple(x)} is not in the subgroup")
        return tuple(int(t) for t in c)


@dataclass(frozen=True)
class BinomialRelation:
    """``prod gens[left] == prod gens[right]`` as index multisets."""

    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(sorted(self.left)))
        object.__setattr__(self, "right", tuple(sorted(self.right)))

    @property
    def degree(self) -> int:
        return len(self.left)


class AffineSemigroup:
    """Semigroup generated by finitely many vectors with a positive grading."""

    def __init__(self, generators: Sequence[Sequence[int]], grading: Sequence[int] | None, ambient_dim: int | None = None):
        gens: list[Vec] = []
        for g in generators:
            g = tuple(int(a) for a in g)
            if g not in gens:
                gens.append(g)
        if not gens:
            raise ValueError("a semigroup needs at least one generator")
        self.ambient_dim = ambient_dim if ambient_dim is not None else len(gens[0])
        if any(len(g) != self.ambient_dim for g in gens):
            raise ValueError("generator length differs from ambient dimension")
        self.generators: tuple[Vec, ...] = tuple(gens)
        self.grading: Vec | None = tuple(int(a) for a in grading) if grading is not None else None
        if self.grading is not None:
            if len(self.grading) != self.ambient_dim:
                raise ValueError("grading has wrong length")
            if any(self.degree(g) < 1 for g in gens):
                raise ValueError("grading must be positive on every generator")
        self._member = lru_cache(maxsize=None)(self._member_uncached)

    def __repr__(self):
        return f"AffineSemigroup({list(self.generators)}, grading={self.grading})"

    def __eq__(self, other):
        return isinstance(other, AffineSemigroup) and (self.generators, self.grading) == (other.generators, other.grading)

    def __hash__(self):
        return hash((self.generators, self.grading))

    def degree(self, x: Sequence[int]) -> int:
        if self.grading is None:
            raise ValueError("semigroup carries no grading")
        return la.dot(self.grading, x)

    @property
    def is_standard_graded(self) -> bool:
        return self.grading is not None and all(self.degree(g) == 1 for g in self.generators)

    def index(self, g: Sequence[int]) -> int:
        return self.generators.index(tuple(g))

    def _member_uncached(self, x: Vec) -> bool:
        d = self.degree(x)
        if d == 0:
            return not any(x)
        if d < 0:
            return False
        return any(self.degree(g) <= d and self._member(la.vsub(x, g)) for g in self.generators)

    def contains(self, x: Sequence[int]) -> bool:
        """Membership by recursion on the grading (terminates since it is positive)."""
        return self._member(tuple(x))

    __contains__ = contains

    def decompose(self, x: Sequence[int]) -> tuple[int, ...] | None:
        """Generator indices summing to ``x``, or ``None``."""
        x = tuple(x)
        if not self.contains(x):
            return None
        out = []
        while any(x):
            for i, g in enumerate(self.generators):
                rest = la.vsub(x, g)
                if self.degree(g) <= self.degree(x) and self.contains(rest):
                    out.append(i)
                    x = rest
                    break
        return tuple(sorted(out))

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "generators": [list(g) for g in self.generators],
            "grading": list(self.grading) if self.grading is not None else None,
        }

    @classmethod
    def from_json(cls, data) -> AffineSemigroup:
        return cls(data["generators"], data.get("grading"), data.get("ambient_dim"))


def polytopal_semigroup(P: LatticePolytope) -> AffineSemigroup:
    n = P.ambient_dim
    return AffineSemigroup([tuple(x) + (1,) for x in P.lattice_points], (0,) * n + (1,), n + 1)


def difference_group(S: AffineSemigroup) -> LatticeSubgroup:
    return LatticeSubgroup.generated_by(S.generators, S.ambient_dim)


def degree_elements(S: AffineSemigroup, d: int) -> list[Vec]:
    """Distinct sums of exactly ``d`` generators."""
    if d < 1:
        raise ValueError("degree must be positive")
    level = {tuple(g) for g in S.generators}
    for _ in range(d - 1):
        level = {la.vadd(x, g) for x in level for g in S.generators}
    return sorted(level)


def _multisets_of_degree(S: AffineSemigroup, d: int) -> list[tuple[int, ...]]:
    if S.is_standard_graded:
        return list(itertools.combinations_with_replacement(range(len(S.generators)), d))
    degs = [S.degree(g) for g in S.generators]
    out: list[tuple[int, ...]] = []

    def rec(start: int, remaining: int, acc: list[int]):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for i in range(start, len(degs)):
            if degs[i] <= remaining:
                acc.append(i)
                rec(i, remaining - degs[i], acc)
                acc.pop()

    rec(0, d, [])
    return out


def _cone_slice(S: AffineSemigroup, m: int) -> list[Vec]:
    """Points of ``gp(S)`` in the cone of ``S`` at grading ``m``."""
    degs = [S.degree(g) for g in S.generators]
    L = lcm(*degs)
    scaled = LatticePolytope(la.vscale(m * L // dg, g) for g, dg in zip(S.generators, degs))
    gp = difference_group(S)
    out = []
    for z in scaled.lattice_points:
        if all(a % L == 0 for a in z):
            y = tuple(a // L for a in z)
            if y in gp:
                out.append(y)
    return out


@dataclass(frozen=True)
class NormalityResult:
    normal: bool
    degree_bound: int
    witness: tuple[Vec, int] | None = None  # (x, c) with c*x in S and x not in S
    complete: bool = False  # True when the bound covers all of the normalization

    def __bool__(self):
        return self.normal


def complete_normality_bound(S: AffineSemigroup) -> int:
    """Degree below which the normalization is generated as an ``S``-module.

    Every element of the normalization is a fractional-part vector of some
    simplicial subcone plus an element of ``S``; those vectors have grading
    below ``rank * max_degree``.
    """
    rank = difference_group(S).rank
    return rank * max(S.degree(g) for g in S.generators) - 1


def normality_check(S: AffineSemigroup, degree_bound: int | None = None, exhaustive: bool = False) -> NormalityResult:
    """Search the normalization up to ``degree_bound`` for elements outside ``S``.

    Default bound is ``rank(S) - 1``; ``exhaustive`` without a bound uses the
    complete bound, making a positive answer a proof.
    """
    if S.grading is None:
        raise ValueError("normality check needs a positive grading")
    full = complete_normality_bound(S)
    if degree_bound is None:
        degree_bound = full if exhaustive else difference_group(S).rank - 1
    degree_bound = max(degree_bound, 1)
    for m in range(1, degree_bound + 1):
        for x in _cone_slice(S, m):
            if not S.contains(x):
                c = 2
                while not S.contains(la.vscale(c, x)):
                    c += 1
                return NormalityResult(False, degree_bound, (x, c), degree_bound >= full)
    return NormalityResult(True, degree_bound, None, degree_bound >= full)


def veronese(S: AffineSemigroup, n: int) -> AffineSemigroup:
    """Subsemigroup generated in degree ``n``, regraded so the new generators have degree 1.

    When the grading is a coordinate function that coordinate is divided by
    ``n`` so polytopal semigroups map to polytopal semigroups.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not S.is_standard_graded:
        raise ValueError("Veronese subsemigroups need generators of degree 1")
    gens = degree_elements(S, n)
    grading = S.grading
    assert grading is not None
    unit = [i for i, a in enumerate(grading) if a]
    if len(unit) == 1 and grading[unit[0]] == 1:
        k = unit[0]
        gens = [tuple(a // n if i == k else a for i, a in enumerate(g)) for g in gens]
        return AffineSemigroup(gens, grading, S.ambient_dim)
    if any(a % n for a in grading):
        raise ValueError("grading cannot be rescaled integrally")
    return AffineSemigroup(gens, tuple(a // n for a in grading), S.ambient_dim)


def irreducible_elements(S: AffineSemigroup) -> list[Vec]:
    out = []
    for g in S.generators:
        reducible = any(h != g and S.contains(la.vsub(g, h)) for h in S.generators)
        if not reducible:
            out.append(g)
    return out


def is_homogeneous(S: AffineSemigroup) -> bool:
    """Whether the irreducible elements lie on an affine hyperplane off the origin."""
    irr = irreducible_elements(S)
    return la.solve(irr, [1] * len(irr)) is not None


def toric_relations(S: AffineSemigroup, degree_bound: int) -> list[BinomialRelation]:
    """Binomial relations generating the toric ideal up to ``degree_bound``.

    Within each fiber (multisets with equal vector sum) two multisets sharing
    an index are already related through lower degrees; one new relation is
    emitted per additional connected component.
    """
    if degree_bound < 2:
        raise ValueError("degree_bound must be at least 2")
    if S.grading is None:
        raise ValueError("relations need a grading")
    out: list[BinomialRelation] = []
    for d in range(2, degree_bound + 1):
        fibers: dict[Vec, list[tuple[int, ...]]] = {}
        for ms in _multisets_of_degree(S, d):
            total = tuple(sum(S.generators[i][c] for i in ms) for c in range(S.ambient_dim))
            fibers.setdefault(total, []).append(ms)
        for total in sorted(fibers):
            nodes = fibers[total]
            if len(nodes) < 2:
                continue
            parent = list(range(len(nodes)))

            def find(i):
                while parent[i] != i:
                    parent[i] = parent[parent[i]]
                    i = parent[i]
                return i

            by_index: dict[int, int] = {}
            for k, ms in enumerate(nodes):
                for i in set(ms):
                    if i in by_index:
                        parent[find(k)] = find(by_index[i])
                    else:
                        by_index[i] = k
            roots = sorted({find(k) for k in range(len(nodes))})
            base = nodes[roots[0]]
            for r in roots[1:]:
                out.append(BinomialRelation(base, nodes[r]))
    return out


def relation_holds(S: AffineSemigroup, rel: BinomialRelation) -> bool:
    def total(ms):
        return tuple(sum(S.generators[i][c] for i in ms) for c in range(S.ambient_dim))

    return total(rel.left) == total(rel.right)
