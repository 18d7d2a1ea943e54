"""Minimal primes of segmentonomials, binomial-prime quotients, variable splitting."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterator, Sequence

from . import linalg as la
from .geometry import LatticePolytope
from .laurent import ExtensionRequired, LaurentPolynomial, TermClass, classify, rational_roots
from .semigroup import AffineSemigroup, difference_group

Vec = tuple[int, ...]


# monomial maps ----------------------------------------------------------------


@dataclass(frozen=True)
class FaceStep:
    """Kill monomials off the face ``{form = 0}`` of the cone; keep the rest."""

    form: Vec

    def __call__(self, s: Vec) -> tuple[Fraction, Vec] | None:
        return (Fraction(1), s) if la.dot(self.form, s) == 0 else None


@dataclass(frozen=True)
class CharacterStep:
    """``s -> root^z1(s) X^z'(s)`` where ``z`` are coordinates adapted to the segment direction."""

    gp_basis: tuple[Vec, ...]
    coordinate_change: tuple[Vec, ...]  # W^{-1}: gp coordinates -> adapted coordinates
    root: Fraction

    def adapted(self, s: Vec) -> Vec:
        c = la.lattice_coordinates(self.gp_basis, s)
        if c is None or any(Fraction(t).denominator != 1 for t in c):
            raise ValueError(f"{s} is not in the difference group")
        return la.matvec(self.coordinate_change, [int(t) for t in c])

    def __call__(self, s: Vec) -> tuple[Fraction, Vec] | None:
        z = self.adapted(s)
        return self.root ** z[0], tuple(z[1:])


Step = FaceStep | CharacterStep


def apply_steps(steps: Sequence[Step], s: Vec) -> tuple[Fraction, Vec] | None:
    scalar = Fraction(1)
    for st in steps:
        r = st(s)
        if r is None:
            return None
        c, s = r
        scalar *= c
    return scalar, s


def apply_to_polynomial(steps: Sequence[Step], f: LaurentPolynomial, target_dim: int) -> LaurentPolynomial:
    out = LaurentPolynomial.zero(target_dim)
    for e, c in f.items():
        r = apply_steps(steps, e)
        if r is not None:
            out = out + LaurentPolynomial.monomial(r[1], c * r[0])
    return out


# primes -----------------------------------------------------------------------


@dataclass(frozen=True)
class BinomialPrime:
    """Kernel of a monomial map ``k[S] -> k[S']`` (scalar times monomial, or zero).

    ``generators`` span the ideal in every degree up to ``degree_bound``.
    """

    semigroup: AffineSemigroup
    kind: str  # "monomial-face" | "character-kernel" | "composite"
    steps: tuple[Step, ...]
    target_dim: int
    target_grading: Vec | None
    generators: tuple[LaurentPolynomial, ...]
    degree_bound: int
    direction: Vec | None = None
    root: Fraction | None = None

    def image(self, s: Sequence[int]) -> tuple[Fraction, Vec] | None:
        return apply_steps(self.steps, tuple(s))

    def quotient_map(self, f: LaurentPolynomial) -> LaurentPolynomial:
        return apply_to_polynomial(self.steps, f, self.target_dim)

    def projected_map(self) -> dict[Vec, tuple[Fraction, Vec] | None]:
        return {g: self.image(g) for g in self.semigroup.generators}

    def contains(self, f: LaurentPolynomial) -> bool:
        return self.quotient_map(f).is_zero()


@dataclass
class MinimalPrimes:
    primes: list[BinomialPrime]
    skipped_factors: list[list[Fraction]] = field(default_factory=list)
    degree_bound: int = 3

    def __iter__(self) -> Iterator[BinomialPrime]:
        return iter(self.primes)

    def __len__(self):
        return len(self.primes)

    def __getitem__(self, i):
        return self.primes[i]


def cone_facet_forms(S: AffineSemigroup) -> list[Vec]:
    """Integer forms nonnegative on ``S`` cutting out the facets of its cone."""
    if S.grading is None:
        raise ValueError("cone facets need a grading")
    degs = [S.degree(g) for g in S.generators]
    L = lcm(*degs)
    section = LatticePolytope(la.vscale(L // dg, g) for g, dg in zip(S.generators, degs))
    out = []
    for a, b in section.facet_forms():
        form = tuple(L * x - b * gr for x, gr in zip(a, S.grading))
        g = la.vgcd(form)
        out.append(tuple(x // g for x in form))
    return sorted(set(out))


def _multisets(S: AffineSemigroup, d: int):
    if S.is_standard_graded:
        return itertools.combinations_with_replacement(range(len(S.generators)), d)
    degs = [S.degree(g) for g in S.generators]
    out = []

    def rec(start, rem, acc):
        if rem == 0:
            out.append(tuple(acc))
            return
        for i in range(start, len(degs)):
            if degs[i] <= rem:
                acc.append(i)
                rec(i, rem - degs[i], acc)
                acc.pop()

    rec(0, d, [])
    return out


def _sum(S: AffineSemigroup, ms: Sequence[int]) -> Vec:
    return tuple(sum(S.generators[i][c] for i in ms) for c in range(S.ambient_dim))


def kernel_generators(S: AffineSemigroup, steps: Sequence[Step], degree_bound: int) -> list[LaurentPolynomial]:
    """Monomials and binomials spanning the kernel of a monomial map up to ``degree_bound``."""
    out: list[LaurentPolynomial] = []
    for g in S.generators:
        if apply_steps(steps, g) is None:
            out.append(LaurentPolynomial.monomial(g))
    for deg in range(1, degree_bound + 1):
        # nodes are monomials of S; multisets with equal sums are the same node
        fibers: dict[Vec, dict[Vec, tuple[Fraction, list[tuple[int, ...]]]]] = {}
        for ms in _multisets(S, deg):
            s = _sum(S, ms)
            r = apply_steps(steps, s)
            if r is None:
                continue
            node = fibers.setdefault(r[1], {}).setdefault(s, (r[0], []))
            node[1].append(ms)
        for key in sorted(fibers):
            nodes = sorted(fibers[key].items())
            if len(nodes) < 2:
                continue
            parent = list(range(len(nodes)))

            def find(i):
                while parent[i] != i:
                    parent[i] = parent[parent[i]]
                    i = parent[i]
                return i

            seen: dict[int, int] = {}
            for k, (_, (_, reps)) in enumerate(nodes):
                for ms in reps:
                    for i in set(ms):
                        if i in seen:
                            parent[find(k)] = find(seen[i])
                        else:
                            seen[i] = k
            roots = sorted({find(k) for k in range(len(nodes))})
            base_s, (base_c, _) = nodes[roots[0]]
            base = LaurentPolynomial.monomial(base_s)
            for r in roots[1:]:
                s, (c, _) = nodes[r]
                out.append(LaurentPolynomial.monomial(s) - base * (c / base_c))
    return out


def _grading_after(S: AffineSemigroup, step: CharacterStep, direction: Vec) -> Vec | None:
    if S.grading is None or la.dot(S.grading, direction) != 0:
        return None
    # grading in gp coordinates, then in adapted coordinates
    gp_grading = [la.dot(S.grading, b) for b in step.gp_basis]
    winv = step.coordinate_change
    w = la.integer_inverse([list(r) for r in winv])
    adapted = [sum(gp_grading[i] * w[i][j] for i in range(len(w))) for j in range(len(w))]
    return tuple(adapted[1:])


def _check_support(S: AffineSemigroup, f: LaurentPolynomial):
    if f.ambient_dim != S.ambient_dim:
        raise ValueError("polynomial and semigroup live in different lattices")
    for e in f.support:
        if not S.contains(e):
            raise ValueError(f"exponent {e} is not in the semigroup")


def segment_direction(f: LaurentPolynomial) -> Vec:
    """Primitive direction of the Newton segment, first nonzero entry positive."""
    sup = f.support
    base = sup[0]
    diffs = [la.vsub(e, base) for e in sup[1:]]
    u = la.primitive(diffs[0])
    for dv in diffs:
        if la.rank([u, dv]) > 1:
            raise ValueError("polynomial is not a segmentonomial")
    if next(a for a in u if a) < 0:
        u = tuple(-a for a in u)
    return u


def segmentonomial_minimal_primes(
    S: AffineSemigroup,
    f: LaurentPolynomial,
    degree_bound: int = 3,
    strict: bool = False,
) -> MinimalPrimes:
    """Height-one primes of ``k[S]`` containing ``f``.

    Monomial-face primes come from cone facets avoiding the support;
    character primes come from rational roots of the univariate part.
    Irrational factors are reported in ``skipped_factors`` (or raised when
    ``strict``).
    """
    if f.is_zero():
        raise ValueError("f must be nonzero")
    cls = classify(f)
    if cls == TermClass.GENERAL:
        raise ValueError("f is not a segmentonomial")
    _check_support(S, f)
    primes: list[BinomialPrime] = []
    for form in cone_facet_forms(S):
        if all(la.dot(form, e) > 0 for e in f.support):
            steps = (FaceStep(form),)
            primes.append(
                BinomialPrime(S, "monomial-face", steps, S.ambient_dim, S.grading, tuple(kernel_generators(S, steps, degree_bound)), degree_bound)
            )
    skipped: list[list[Fraction]] = []
    if len(f) >= 2:
        u_amb = segment_direction(f)
        gp = difference_group(S)
        basis = gp.basis
        uc = la.primitive(gp.coordinates(u_amb))
        if next(a for a in uc if a) < 0:
            uc = tuple(-a for a in uc)
        w = la.complete_to_basis(uc)
        winv = tuple(tuple(r) for r in la.integer_inverse(w))
        probe = CharacterStep(basis, winv, Fraction(1))
        zs = {e: probe.adapted(e) for e in f.support}
        t0 = min(z[0] for z in zs.values())
        coeffs = [Fraction(0)] * (max(z[0] for z in zs.values()) - t0 + 1)
        for e, z in zs.items():
            coeffs[z[0] - t0] += f.coefficient(e)
        roots, rest = rational_roots(coeffs)
        if len(rest) > 1:
            skipped.extend(_irreducible_factors(rest))
            if strict:
                raise ExtensionRequired("univariate part has irrational roots", skipped)
        direction = tuple(la.dot(uc, col) for col in la.transpose(basis))
        for a, _mult in roots:
            if a == 0:
                continue
            step = CharacterStep(basis, winv, a)
            grading = _grading_after(S, step, direction)
            primes.append(
                BinomialPrime(
                    S,
                    "character-kernel",
                    (step,),
                    gp.rank - 1,
                    grading,
                    tuple(kernel_generators(S, (step,), degree_bound)),
                    degree_bound,
                    direction=direction,
                    root=a,
                )
            )
    return MinimalPrimes(primes, skipped, degree_bound)


def _irreducible_factors(coeffs: Sequence[Fraction]) -> list[list[Fraction]]:
    """Irreducible factors over Q (ascending coefficients), for reporting only."""
    import sympy

    T = sympy.Symbol("T")
    poly = sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in coeffs])), T, domain="QQ")
    out = []
    for fac, mult in poly.factor_list()[1]:
        cs = [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in reversed(fac.all_coeffs())]
        out.extend([cs] * mult)
    return out


def quotient_as_semigroup(S: AffineSemigroup, p: BinomialPrime) -> tuple[AffineSemigroup | None, dict[Vec, tuple[Fraction, Vec] | None]]:
    """Image semigroup and the scalar-decorated generator map.

    Checks that proportional images correspond to degree-1 binomials of
    the prime.
    """
    if p.semigroup != S:
        raise ValueError("prime belongs to a different semigroup")
    table = p.projected_map()
    images = [r[1] for r in table.values() if r is not None]
    target = AffineSemigroup(images, p.target_grading, p.target_dim) if images else None
    gens = S.generators
    deg1 = {frozenset(b.support) for b in p.generators if len(b) == 2 and all(e in gens for e in b.support)}
    # connectivity of generators with equal image via degree-1 binomials
    groups: dict[Vec, list[Vec]] = {}
    for g, r in table.items():
        if r is not None:
            groups.setdefault(r[1], []).append(g)
    for members in groups.values():
        if len(members) > 1:
            linked = {members[0]}
            changed = True
            while changed:
                changed = False
                for pair in deg1:
                    a, b = tuple(pair)
                    if (a in linked) != (b in linked) and a in members and b in members:
                        linked |= {a, b}
                        changed = True
            if linked != set(members):
                raise ValueError("inconsistent prime data: proportional generators not related")
    for pair in deg1:
        a, b = tuple(pair)
        if a in gens and b in gens and table[a] is not None and table[b] is not None and table[a][1] != table[b][1]:
            raise ValueError("inconsistent prime data: related generators with different images")
    return target, table


def independence_test(S: AffineSemigroup, f: LaurentPolynomial, points: Sequence[Sequence[int]]) -> bool:
    """No two points differ by a multiple of the Newton segment direction."""
    if newton_dim(f) != 1:
        raise ValueError("f must have a one-dimensional Newton polytope")
    u = segment_direction(f)
    pts = [tuple(p) for p in points]
    for a, b in itertools.combinations(pts, 2):
        if la.rank([u, la.vsub(a, b)]) <= 1:
            return False
    return True


def newton_dim(f: LaurentPolynomial) -> int:
    if len(f) <= 1:
        return 0
    base = f.support[0]
    return la.rank([la.vsub(e, base) for e in f.support[1:]])


def segmentonomial_ideal_primes(
    S: AffineSemigroup,
    fs: Sequence[LaurentPolynomial],
    degree_bound: int = 3,
    depth: int | None = None,
) -> MinimalPrimes:
    """Minimal primes of an ideal generated by several segmentonomials.

    Handles the first generator, pushes the rest into each quotient and
    recurses. Needs the grading to descend to every intermediate quotient.
    """
    fs = [f for f in fs if not f.is_zero()]
    if depth is None:
        depth = len(fs)
    if not fs:
        raise ValueError("need at least one nonzero generator")
    first = segmentonomial_minimal_primes(S, fs[0], degree_bound)
    results: list[BinomialPrime] = []
    skipped = list(first.skipped_factors)
    for p in first:
        rest = [p.quotient_map(g) for g in fs[1:]]
        rest = [g for g in rest if not g.is_zero()]
        if not rest:
            results.append(p)
            continue
        if depth <= 1:
            raise RecursionError("recursion depth exhausted")
        target, _ = quotient_as_semigroup(S, p)
        if target is None or p.target_grading is None:
            raise ValueError("grading does not descend to the quotient")
        sub = segmentonomial_ideal_primes(target, rest, degree_bound, depth - 1)
        skipped.extend(sub.skipped_factors)
        for q in sub:
            steps = p.steps + q.steps
            results.append(
                BinomialPrime(S, "composite", steps, q.target_dim, q.target_grading, tuple(kernel_generators(S, steps, degree_bound)), degree_bound)
            )
    minimal = []
    for p in results:
        if not any(q is not p and all(p.contains(g) for g in q.generators) and not all(q.contains(g) for g in p.generators) for q in results):
            if not any(all(p.contains(g) for g in q.generators) and all(q.contains(g) for g in p.generators) for q in minimal):
                minimal.append(p)
    return MinimalPrimes(minimal, skipped, degree_bound)


# variable splitting -------------------------------------------------------------


@dataclass(frozen=True)
class SplitTransform:
    matrix_T: tuple[tuple[Fraction, ...], ...]
    chosen_j: int
    epsilon_matrix: tuple[tuple[Fraction, ...], ...]  # row i: coefficients of epsilon_j(X_i)
    nu_matrix: tuple[tuple[Fraction, ...], ...]  # row i: coefficients of nu(X_i), i in [1, n+1]

    def check_square(self) -> bool:
        """``pi_j ∘ Psi = epsilon_j ∘ nu`` on the variables."""
        lhs = la.matmul(self.matrix_T, _relabel(len(self.epsilon_matrix), self.chosen_j))
        rhs = la.matmul(self.nu_matrix, self.epsilon_matrix)
        return [list(map(Fraction, r)) for r in lhs] == [list(map(Fraction, r)) for r in rhs]


def _relabel(n: int, j: int) -> list[list[int]]:
    """``X_i -> X_i`` for ``i <= n`` and ``X_{n+1} -> X_j`` (or 0 when ``j = 0``)."""
    rows = [[int(i == k) for k in range(n)] for i in range(n)]
    rows.append([int(j >= 1 and k == j - 1) for k in range(n)])
    return rows


def split_variable(T: Sequence[Sequence]) -> SplitTransform:
    """Choose ``j`` so that the truncated linear map ``epsilon_j`` is invertible."""
    t = [[Fraction(x) for x in row] for row in T]
    m = len(t)
    if m < 2 or any(len(r) != m for r in t):
        raise ValueError("T must be square of size at least 2")
    if la.det(t) == 0:
        raise ValueError("T is singular")
    n = m - 1
    tp = [row[:n] for row in t[:n]]
    last = [row[n] for row in t[:n]]
    if la.det(tp) != 0:
        j = 0
    else:
        j = None
        for c in range(n):
            others = [[tp[r][k] for r in range(n)] for k in range(n) if k != c]
            col = [tp[r][c] for r in range(n)]
            rk = la.rank(others) if others else 0
            in_u = (la.rank(others + [col]) if others else int(any(col))) == rk
            last_in_u = (la.rank(others + [last]) if others else int(any(last))) == rk
            if in_u and not last_in_u:
                j = c + 1
                break
        if j is None:
            raise AssertionError("no admissible column; T would be singular")
    eps = [[tp[i][k] + (last[i] if k == j - 1 else 0) for k in range(n)] for i in range(n)]
    if la.det(eps) == 0:
        raise AssertionError("chosen epsilon is not invertible")
    nu = la.matmul(la.matmul(t, _relabel(n, j)), la.inverse(eps))
    res = SplitTransform(
        tuple(tuple(r) for r in t),
        j,
        tuple(tuple(r) for r in eps),
        tuple(tuple(Fraction(x) for x in r) for r in nu),
    )
    if [list(r) for r in nu[:n]] != la.identity(n) or not res.check_square():
        raise AssertionError("split transform does not commute with the relabeling")
    return res
