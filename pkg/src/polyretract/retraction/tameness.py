"""Tameness of codimension-1 retractions of polygonal algebras.

The pipeline looks for a base among the embedded segments ``c*Delta_1``
and dispatches to the interior or facet correction.  Segments on which
``h`` is not injective are kept as diagnostics together with the data the
case analysis of the existence argument refers to.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .. import linalg as la
from ..binomial import independence_test
from ..geometry import LatticePolytope, lattice_length, lattice_width, minimal_lattice_width, segment_embeddings
from ..groups import AutomorphismWord
from ..laurent import LaurentPolynomial
from ..semigroup import polytopal_semigroup
from .bases import (
    BaseWitness,
    CorrectionError,
    _cross_section,
    _ranked,
    check_base,
    correct_facet_base,
    correct_interior_base,
    image_span,
    meets_interior,
)
from .certificates import FaceRetraction, TamenessCertificate, emit
from .maps import GradedAlgebraMap, KernelMismatch, check_idempotent, codimension, kernel_monomials

Point = tuple[int, ...]


class PreconditionError(ValueError):
    pass


@dataclass
class SegmentDiagnostic:
    points: tuple[Point, ...]
    outcome: str
    kernel_element: LaurentPolynomial | None = None
    width: int | None = None  # width of P along the segment's line
    width_equals_c: bool | None = None
    independent_of_base: bool | None = None


@dataclass
class TamenessReport:
    certificate: TamenessCertificate | None
    path: str
    c: int
    degree_bound: int
    seed: int
    segments: list[SegmentDiagnostic] = field(default_factory=list)
    subcase: str | None = None
    segment_obstructed: bool | None = None
    reason: str | None = None

    def __bool__(self):
        return self.certificate is not None


def kernel_element(h: GradedAlgebraMap, points: Sequence[Point], degree_bound: int) -> LaurentPolynomial | None:
    """A nonzero element of ``Ker(h) ∩ k[S_X]`` of least degree up to the bound."""
    pts = [tuple(p) for p in points]
    dim = len(pts[0]) + 1
    for d in range(1, degree_bound + 1):
        seen: dict[Point, tuple[int, ...]] = {}
        for ms in itertools.combinations_with_replacement(range(len(pts)), d):
            total = tuple(sum(pts[i][c] for i in ms) for c in range(len(pts[0]))) + (d,)
            seen.setdefault(total, ms)
        exps = list(seen)
        products = []
        for ms in seen.values():
            f = h.images[pts[ms[0]]]
            for i in ms[1:]:
                f = f * h.images[pts[i]]
            products.append(f)
        support = sorted({e for f in products for e in f.support})
        if not support:
            return LaurentPolynomial.monomial(exps[0])
        mat = [[f.coefficient(e) for f in products] for e in support]
        null = la.nullspace(mat)
        if null:
            vec = null[0]
            return LaurentPolynomial({e: c for e, c in zip(exps, vec) if c}, dim)
    return None


def _outer_normals(Q: LatticePolytope) -> list[tuple[int, int]]:
    if Q.dim == 0:
        return []
    if Q.dim == 1:
        d = la.vsub(Q.vertices[1], Q.vertices[0])
        return [(-d[1], d[0]), (d[1], -d[0])]
    return [tuple(-x for x in a) for a, _ in Q.facet_forms()]


def _angle(v) -> tuple:
    x, y = v
    half = 0 if (y > 0 or (y == 0 and x > 0)) else 1
    # exact comparison key within each half plane
    return (half, Fraction(-x, abs(x) + abs(y)) if half == 0 else Fraction(x, abs(x) + abs(y)))


def _fan_directions(polys: Sequence[LatticePolytope]) -> list[tuple]:
    """One direction in the interior of every maximal cone of the common normal fan."""
    normals = sorted({tuple(la.primitive(n)) for Q in polys for n in _outer_normals(Q)}, key=_angle)
    if len(normals) < 2:
        return [(1, 0), (0, 1), (-1, 0), (0, -1)] if not normals else [(-normals[0][1], normals[0][0]), (normals[0][1], -normals[0][0])]
    out = []
    for a, b in zip(normals, normals[1:] + normals[:1]):
        if a[0] * b[1] - a[1] * b[0] > 0:
            out.append((a[0] + b[0], a[1] + b[1]))
        else:
            # gap of at least a half turn: a quarter turn from a lies inside it
            out.append((-a[1], a[0]))
    return out


def _unique_max(Q: LatticePolytope, lam) -> Point | None:
    vals = [(la.dot(lam, v), v) for v in Q.vertices]
    top = max(v for v, _ in vals)
    hits = [p for v, p in vals if v == top]
    return hits[0] if len(hits) == 1 else None


def profile_subcase(profiles: Sequence[LatticePolytope], direction: Sequence[int]) -> str:
    """Case label for Newton polytopes ``P_0, P_1`` of an embedded segment against a line direction.

    ``b`` when ``P_0 = P_1``; ``a1`` when some linear form has unique maxima
    ``v_0, v_1`` with ``v_1 - v_0`` not parallel to the direction; ``a2`` otherwise.
    """
    P0, P1 = profiles[0], profiles[1]
    if P0 == P1:
        return "b"
    for lam in _fan_directions([P0, P1]):
        v0, v1 = _unique_max(P0, lam), _unique_max(P1, lam)
        if v0 is None or v1 is None or v0 == v1:
            continue
        if la.rank([la.vsub(v1, v0), tuple(direction)]) == 2:
            return "a1"
    return "a2"


def segment_obstruction(P: LatticePolytope, c: int) -> bool:
    """Every edge shorter than ``c`` and some lattice width at most ``c``."""
    if P.dim != 2:
        raise PreconditionError("the obstruction is stated for polygons")
    if c < 1:
        raise ValueError("c must be positive")
    if any(lattice_length(a, b) >= c for a, b in P.edges):
        return False
    return minimal_lattice_width(P)[0] <= c


def _segment_points(start: Point, step: Point, c: int) -> tuple[Point, ...]:
    return tuple(sorted(la.vadd(start, la.vscale(i, step)) for i in range(c + 1)))


def _profiles(h: GradedAlgebraMap, base: Sequence[Point]) -> list[LatticePolytope]:
    out = []
    for b in base:
        f = h.images[b]
        out.append(LatticePolytope([e[:-1] for e in f.support]))
    return out


def polygon_tameness(
    h: GradedAlgebraMap,
    degree_bound: int = 4,
    seed: int = 0,
    trials: int = 5,
    search_degree: int | None = None,
) -> TamenessReport:
    """Certificate ``h = alpha ∘ iota ∘ g ∘ alpha^-1`` for a codimension-1 retraction of a polygon,
    or a report naming where the search stopped."""
    P = h.polytope
    if P.dim != 2:
        raise PreconditionError("polygon_tameness needs a two-dimensional polytope")
    if not h.is_endomorphism or not check_idempotent(h):
        raise PreconditionError("map is not an idempotent endomorphism")
    if codimension(h, trials, seed) != 1:
        raise PreconditionError("retraction does not have codimension 1")
    D = degree_bound
    c = image_span(h) - 1
    report = TamenessReport(None, "none", c, D, seed)
    try:
        face = kernel_monomials(h)
    except KernelMismatch as exc:
        report.reason = str(exc)
        return report
    if face is not None:
        alpha = AutomorphismWord(P, [])
        iota = {b: h.images[b] for b in face.lattice_points}
        report.certificate = emit(TamenessCertificate(h, alpha, FaceRetraction(face), iota, D, seed, "kernel-monomials"))
        report.path = "kernel-monomials"
        return report
    candidates = [_segment_points(s, st, c) for s, st in segment_embeddings(P, c)]
    failing: list[SegmentDiagnostic] = []
    for X in _ranked(h, candidates):
        direction = la.primitive(la.vsub(X[-1], X[0]))
        why = check_base(h, X, c + 1, 2, D, trials, seed)
        if why is not None:
            width = lattice_width(P, direction) if P.ambient_dim == 2 else None
            diag = SegmentDiagnostic(X, why, kernel_element(h, X, D), width, width == c if width is not None else None)
            report.segments.append(diag)
            if diag.kernel_element is not None:
                failing.append(diag)
            continue
        witness = BaseWitness(X, _cross_section(P, X), meets_interior(P, X))
        try:
            if witness.meets_interior:
                cert = correct_interior_base(h, witness, D, search_degree, seed).certificate
            else:
                cert = correct_facet_base(h, witness, D, seed).certificate
        except CorrectionError as exc:
            report.segments.append(SegmentDiagnostic(X, f"base, correction failed: {exc}"))
            continue
        report.segments.append(SegmentDiagnostic(X, "base"))
        report.certificate = cert
        report.path = cert.path
        if failing:
            first = failing[0]
            report.subcase = profile_subcase(_profiles(h, X), la.primitive(la.vsub(first.points[-1], first.points[0])))
            S = polytopal_semigroup(P)
            for diag in failing:
                f = diag.kernel_element
                try:
                    diag.independent_of_base = independence_test(S, f, [x + (1,) for x in X])
                except ValueError:
                    diag.independent_of_base = None
        return report
    report.segment_obstructed = segment_obstruction(P, c)
    report.reason = f"no embedded segment of length {c} is a base up to degree {D}"
    return report
