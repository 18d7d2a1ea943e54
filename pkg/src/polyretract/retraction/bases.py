"""Bases of retractions and the two normal-form corrections built on them.

``correct_interior_base`` turns a retraction with a base through the
interior into a toric conjugate of a fibration retraction;
``correct_facet_base`` turns a codimension-1 retraction based on a facet
into an elementary conjugate of the facet projection.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .. import linalg as la
from ..geometry import LatticePolytope, segment_embeddings
from ..groups import AutomorphismWord, ColumnVector, Elementary, Toric, _is_column, toric_from_character
from ..laurent import LaurentPolynomial, gcd_many
from ..semigroup import AffineSemigroup, difference_group, polytopal_semigroup
from .certificates import FaceRetraction, FibrationRetraction, TamenessCertificate, emit
from .maps import (
    FibrationError,
    GradedAlgebraMap,
    LatticeFibration,
    facet_valuation,
    generator,
    image_dimension,
    jacobian_rank,
    kernel_monomials,
    lift,
)

Point = tuple[int, ...]


class CorrectionError(ValueError):
    """The map does not have the structure the correction needs at the configured bounds."""


@dataclass(frozen=True)
class BaseWitness:
    points: tuple[Point, ...]
    cross_section: LatticePolytope | None
    meets_interior: bool

    @property
    def polytope(self) -> LatticePolytope:
        return self.cross_section if self.cross_section is not None else LatticePolytope(self.points)


@dataclass(frozen=True)
class BaseSearch:
    witness: BaseWitness | None
    image_span: int
    image_dimension: int
    candidates_tried: int
    degree_bound: int
    rejected: tuple[tuple[tuple[Point, ...], str], ...] = field(default=(), repr=False)

    def __bool__(self):
        return self.witness is not None


def image_span(h: GradedAlgebraMap) -> int:
    """Dimension of the degree-1 part of ``Im(h)``."""
    return h.degree_one_rank()


def _coefficient_rank(polys: Sequence[LaurentPolynomial]) -> int:
    support = sorted({e for f in polys for e in f.support})
    if not support:
        return 0
    return la.rank([[f.coefficient(e) for e in support] for f in polys])


def restriction_injective(h: GradedAlgebraMap, points: Sequence[Point], degree_bound: int) -> tuple[bool, int | None]:
    """Whether ``h`` is injective on ``k[S_X]`` in each degree up to the bound.

    Returns ``(ok, first failing degree)``.
    """
    pts = [tuple(p) for p in points]
    imgs = [h.images[p] for p in pts]
    for d in range(1, degree_bound + 1):
        seen: dict[Point, tuple[int, ...]] = {}
        for ms in itertools.combinations_with_replacement(range(len(pts)), d):
            total = tuple(sum(pts[i][c] for i in ms) for c in range(len(pts[0])))
            seen.setdefault(total, ms)
        products = []
        for ms in seen.values():
            f = imgs[ms[0]]
            for i in ms[1:]:
                f = f * imgs[i]
            products.append(f)
        if any(not f for f in products) or _coefficient_rank(products) < len(products):
            return False, d
    return True, None


def _cross_section(P: LatticePolytope, X: Sequence[Point]) -> LatticePolytope | None:
    """``conv(X)`` when it equals ``P`` intersected with the affine hull of ``X``."""
    Q = LatticePolytope(X)
    k = Q.dim
    if k == 0:
        return Q
    basis = Q.intrinsic_basis
    rows, rhs = [], []
    for a, b in P.facet_forms():
        rows.append([la.dot(a, v) for v in basis])
        rhs.append(b - la.dot(a, Q.origin))
    for combo in itertools.combinations(range(len(rows)), k):
        sub = [rows[i] for i in combo]
        if la.rank(sub) < k:
            continue
        y = la.solve(sub, [rhs[i] for i in combo])
        if y is None or any(la.dot(r, y) < c for r, c in zip(rows, rhs)):
            continue
        if not Q.contains(Q.from_intrinsic(y)):
            return None
    return Q


def meets_interior(P: LatticePolytope, X: Sequence[Point]) -> bool:
    """Whether ``conv(X)`` meets the relative interior of ``P`` (tested at the barycenter)."""
    n = len(X)
    bary = tuple(Fraction(sum(x[i] for x in X), n) for i in range(P.ambient_dim))
    return all(la.dot(a, bary) > b for a, b in P.facet_forms())


def base_candidates(P: LatticePolytope, span: int, dim: int) -> list[tuple[Point, ...]]:
    """Cross-section point sets of size ``span`` spanned by ``dim`` affinely independent lattice points,
    followed by segment embeddings when ``dim == 2``."""
    pts = P.lattice_points
    out: list[tuple[Point, ...]] = []
    seen = set()
    k = dim - 1
    for sub in itertools.combinations(pts, k + 1):
        diffs = [la.vsub(s, sub[0]) for s in sub[1:]]
        if diffs and la.rank(diffs) < k:
            continue
        X = tuple(x for x in pts if la.rank(diffs + [la.vsub(x, sub[0])]) == k) if diffs else (sub[0],)
        if len(X) == span and X not in seen:
            seen.add(X)
            out.append(X)
    if dim == 2 and span >= 2:
        for start, step in segment_embeddings(P, span - 1):
            X = tuple(sorted(la.vadd(start, la.vscale(i, step)) for i in range(span)))
            if X not in seen:
                seen.add(X)
                out.append(X)
    return out


def _ranked(h: GradedAlgebraMap, cands: list[tuple[Point, ...]]) -> list[tuple[Point, ...]]:
    """Sets fixed pointwise by ``h`` first, then those meeting the interior."""
    P = h.polytope

    def key(X):
        fixed = all(h.images[x] == generator(x) for x in X)
        return (not fixed, not meets_interior(P, X))

    return sorted(cands, key=key)


def check_base(h: GradedAlgebraMap, X: Sequence[Point], span: int, dim: int, degree_bound: int, trials: int = 5, seed: int = 0) -> str | None:
    """``None`` if ``X`` is a base of ``h``, else the reason it is not."""
    imgs = [h.images[x] for x in X]
    if _coefficient_rank(imgs) != span:
        return "images do not span the degree-1 part of the image"
    ok, d = restriction_injective(h, X, degree_bound)
    if not ok:
        return f"not injective in degree {d}"
    if jacobian_rank(imgs, trials, seed) != dim:
        return "Jacobian dimension differs from the image dimension"
    return None


def iter_bases(h: GradedAlgebraMap, degree_bound: int | None = None, trials: int = 5, seed: int = 0) -> Iterator[BaseWitness]:
    P = h.polytope
    D = degree_bound if degree_bound is not None else h.degree_bound
    span = image_span(h)
    dim = image_dimension(h, trials, seed).dimension
    if dim == 0:
        return
    for X in _ranked(h, base_candidates(P, span, dim)):
        if check_base(h, X, span, dim, D, trials, seed) is None:
            yield BaseWitness(X, _cross_section(P, X), meets_interior(P, X))


def find_base(h: GradedAlgebraMap, degree_bound: int | None = None, trials: int = 5, seed: int = 0) -> BaseSearch:
    """First base among cross-sections and segment embeddings.

    Candidates fixed pointwise by ``h`` are tried first, then those meeting
    the interior; ties keep the canonical order.
    """
    P = h.polytope
    D = degree_bound if degree_bound is not None else h.degree_bound
    span = image_span(h)
    dim = image_dimension(h, trials, seed).dimension
    rejected = []
    if dim == 0:
        return BaseSearch(None, span, dim, 0, D)
    cands = _ranked(h, base_candidates(P, span, dim))
    for i, X in enumerate(cands):
        why = check_base(h, X, span, dim, D, trials, seed)
        if why is None:
            w = BaseWitness(X, _cross_section(P, X), meets_interior(P, X))
            return BaseSearch(w, span, dim, i + 1, D, tuple(rejected))
        rejected.append((X, why))
    return BaseSearch(None, span, dim, len(cands), D, tuple(rejected))


def normalize_to_base(h: GradedAlgebraMap, X: Sequence[Point]) -> GradedAlgebraMap:
    """``psi ∘ h`` where ``psi`` inverts ``h`` on ``k[S_X]``; a retraction onto ``k[S_X]``."""
    P = h.polytope
    X = [tuple(x) for x in X]
    support = sorted({e for x in X for e in h.images[x].support} | {e for f in h.images.values() for e in f.support})
    cols = [[h.images[x].coefficient(e) for e in support] for x in X]
    mat = la.transpose(cols)
    imgs = {}
    for p in P.lattice_points:
        target = [h.images[p].coefficient(e) for e in support]
        sol = la.solve(mat, target)
        if sol is None:
            raise CorrectionError(f"h({p}) is not in the span of the base images")
        f = LaurentPolynomial.zero(P.ambient_dim + 1)
        for x, c in zip(X, sol):
            if c:
                f = f + generator(x, c)
        imgs[p] = f
    return GradedAlgebraMap(P, imgs, h.degree_bound, check=False)


def _embedding(h: GradedAlgebraMap, alpha: AutomorphismWord, base: Sequence[Point]) -> dict[Point, LaurentPolynomial]:
    """``h^alpha`` on the base generators."""
    inv = alpha.inverse()
    return {b: inv(h(alpha(generator(b)))) for b in base}


def _in_semigroup(P: LatticePolytope, S: AffineSemigroup, x: Point) -> bool:
    if x[-1] <= 0:
        return x[-1] == 0 and not any(x)
    if P.dim <= 2:
        # polygons and segments are normal
        return x in difference_group(S) and P.contains(tuple(Fraction(a, x[-1]) for a in x[:-1]))
    return S.contains(x)


def _size_reduce(v: Point, basis: Sequence[Point]) -> Point:
    for u in basis:
        uu = la.dot(u, u)
        if uu:
            q = round(Fraction(la.dot(v, u), uu))
            v = la.vsub(v, la.vscale(q, u))
    return v


@dataclass
class InteriorCorrection:
    toric: Toric
    fibration: LatticeFibration
    embedding_images: dict[Point, LaurentPolynomial]
    certificate: TamenessCertificate
    anchor: Point  # the element x of S_Q used in the construction
    complement: tuple[Point, ...]
    scalars: tuple[Fraction, ...]


def correct_interior_base(h: GradedAlgebraMap, witness: BaseWitness, degree_bound: int | None = None, search_degree: int | None = None, seed: int = 0) -> InteriorCorrection:
    """Toric ``tau`` and fibration with ``h^tau = iota ∘ rho``."""
    if not witness.meets_interior:
        raise CorrectionError("base does not meet the interior")
    if kernel_monomials(h) is not None:
        raise CorrectionError("h kills monomials; it factors through a face projection")
    P = h.polytope
    D = degree_bound if degree_bound is not None else h.degree_bound
    X = list(witness.points)
    hn = normalize_to_base(h, X)
    S = polytopal_semigroup(P)
    gp = difference_group(S)
    r = gp.rank
    lifted = [lift(q) for q in X]
    coords = [gp.coordinates(q) for q in lifted]
    umat, k = la.saturation_completion(coords, r)

    def ambient(col):
        return tuple(sum(c * b[i] for c, b in zip(col, gp.basis)) for i in range(P.ambient_dim + 1))

    u_basis = [ambient([umat[i][j] for i in range(r)]) for j in range(k)]
    u_flat = [la.vsub(q, lifted[0]) for q in lifted[1:]]
    u_flat = [v for v in la.hnf(u_flat)] if any(any(v) for v in u_flat) else []
    vs = []
    for j in range(k, r):
        v = ambient([umat[i][j] for i in range(r)])
        v = la.vsub(v, la.vscale(v[-1], lifted[0]))
        vs.append(_size_reduce(v, u_flat))
    if not vs:
        raise CorrectionError("base spans the whole lattice; h is an isomorphism")
    bound = search_degree if search_degree is not None else max(3 * r, 12)
    Sq = AffineSemigroup(lifted, (0,) * P.ambient_dim + (1,))
    anchor = None
    for d in range(1, bound + 1):
        for x in sorted({tuple(sum(lifted[i][c] for i in ms) for c in range(P.ambient_dim + 1)) for ms in itertools.combinations_with_replacement(range(len(X)), d)}):
            if all(_in_semigroup(P, S, la.vadd(x, v)) and _in_semigroup(P, S, la.vsub(x, v)) for v in vs):
                anchor = x
                break
        if anchor is not None:
            break
    if anchor is None:
        raise CorrectionError(f"no anchor element found up to degree {bound}")
    scalars, targets = [], []
    for v in vs:
        img = hn.image_of_monomial(la.vadd(anchor, v))
        if not img.is_monomial():
            raise CorrectionError("image of a shifted anchor is not a monomial; not based-interior at this bound")
        e, a = img.single_term()
        if not Sq.contains(e):
            raise CorrectionError("image of a shifted anchor leaves the base semigroup")
        scalars.append(a)
        targets.append(e)
    values: dict[Point, Fraction] = {u: Fraction(1) for u in u_basis}
    for v, a in zip(vs, scalars):
        values[v] = 1 / a
    tor = toric_from_character(P, values)
    w_vectors = [la.vsub(la.vadd(v, anchor), t)[:-1] for v, t in zip(vs, targets)]
    directions = [la.vsub(q, X[0]) for q in X[1:]] or [tuple(0 for _ in X[0])]
    try:
        fib = LatticeFibration(P, X[0], directions, w_vectors)
    except FibrationError as exc:
        raise CorrectionError(f"recovered data is not a lattice fibration: {exc}") from exc
    alpha = AutomorphismWord(P, [tor])
    base = fib.base_points
    iota = _embedding(h, alpha, base)
    cert = TamenessCertificate(h, alpha, FibrationRetraction(fib), iota, D, seed, "interior")
    emit(cert)
    return InteriorCorrection(tor, fib, iota, cert, anchor, tuple(vs), tuple(scalars))


@dataclass
class FacetCorrection:
    word: AutomorphismWord
    facet: int
    divisor: LaurentPolynomial  # the kernel generator, shifted into P
    apex: Point
    certificate: TamenessCertificate


def _shifted_divisors(P: LatticePolytope, phi: LaurentPolynomial, valuation: Sequence[int]) -> list[tuple[LaurentPolynomial, Point]]:
    """Shifts of ``phi`` supported on degree-1 lattice points of ``P``, touching the facet,
    with exactly one support point at valuation 1 and none higher."""
    lifted = {lift(p) for p in P.lattice_points}
    s0 = phi.support[0]
    out = []
    for p in P.lattice_points:
        y = la.vsub(lift(p), s0)
        shifted = phi.shift(y)
        sup = shifted.support
        if not all(e in lifted for e in sup):
            continue
        vals = [la.dot(valuation, e) for e in sup]
        if min(vals) != 0 or sorted(vals)[-1] != 1 or vals.count(1) != 1:
            continue
        apex = sup[vals.index(1)]
        out.append((shifted, apex))
    return out


def correct_facet_base(h: GradedAlgebraMap, witness: BaseWitness, degree_bound: int | None = None, seed: int = 0) -> FacetCorrection:
    """Elementary ``epsilon`` over a facet with ``h^epsilon = iota ∘ pi_F``."""
    P = h.polytope
    D = degree_bound if degree_bound is not None else h.degree_bound
    X = tuple(sorted(witness.points))
    facet = next((i for i in range(len(P.facets)) if P.facet_points(i) == X), None)
    if facet is None:
        raise CorrectionError("base is not the lattice point set of a facet")
    if kernel_monomials(h) is not None:
        raise CorrectionError("h kills monomials; it factors through a face projection")
    F = P.facet_polytope(facet)
    hn = normalize_to_base(h, X)
    diffs = [generator(x) - hn.images[x] for x in P.lattice_points if x not in set(X)]
    diffs = [f for f in diffs if f]
    if not diffs:
        raise CorrectionError("h is the identity off the facet")
    phi = gcd_many(diffs)
    if phi.is_monomial():
        raise CorrectionError("gcd is trivial; not a facet-based codimension-1 retraction")
    vF = facet_valuation(P, F)
    shifts = _shifted_divisors(P, phi, vF)
    if not shifts:
        raise CorrectionError("no shift of the kernel generator is a height-1 pyramid over the facet")
    last = None
    for shifted, apex in shifts:
        cz = shifted.coefficient(apex)
        factors = []
        for e, c in shifted.sorted_terms():
            if e == apex:
                continue
            v = la.vsub(e, apex)[:-1]
            if not _is_column(P, v, facet):
                factors = None
                break
            factors.append(Elementary(ColumnVector(v, facet), c / cz))
        if factors is None:
            last = "b - z is not a column vector"
            continue
        alpha = AutomorphismWord(P, factors)
        iota = _embedding(h, alpha, X)
        cert = TamenessCertificate(h, alpha, FaceRetraction(F), iota, D, seed, "facet")
        try:
            emit(cert)
        except RuntimeError as exc:
            last = str(exc)
            continue
        return FacetCorrection(alpha, facet, shifted, apex[:-1], cert)
    raise CorrectionError(f"no shift produced a valid correction ({last})")
