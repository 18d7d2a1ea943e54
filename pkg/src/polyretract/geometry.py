"""Lattice polytopes with exact facet descriptions and lattice points.

A polytope is stored together with an intrinsic coordinate system for
its affine hull: ``x = origin + basis @ y`` with ``y`` ranging over
``Z^dim``.  All combinatorics (facets, faces, widths) happen in these
coordinates so that lower-dimensional polytopes behave like full ones.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from . import linalg as la

Point = tuple[int, ...]


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class AffineLatticeMap:
    """``x -> matrix @ x + translation`` with integer data."""

    matrix: tuple[tuple[int, ...], ...]
    translation: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(int(a) for a in r) for r in self.matrix))
        object.__setattr__(self, "translation", tuple(int(a) for a in self.translation))

    @classmethod
    def identity(cls, n: int) -> AffineLatticeMap:
        return cls(la.identity(n), (0,) * n)

    @property
    def source_dim(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    @property
    def target_dim(self) -> int:
        return len(self.matrix)

    def __call__(self, x: Sequence) -> tuple:
        return la.vadd(la.matvec(self.matrix, x), self.translation)

    apply = __call__

    def linear(self, v: Sequence) -> tuple:
        return la.matvec(self.matrix, v)

    def compose(self, inner: AffineLatticeMap) -> AffineLatticeMap:
        """``self ∘ inner``."""
        m = la.matmul(self.matrix, inner.matrix)
        return AffineLatticeMap(m, self(inner.translation))

    def is_unimodular(self) -> bool:
        return self.source_dim == self.target_dim and abs(la.det(self.matrix)) == 1

    def inverse(self) -> AffineLatticeMap:
        if not self.is_unimodular():
            raise ValueError("only unimodular maps are invertible over Z")
        inv = la.integer_inverse(self.matrix)
        return AffineLatticeMap(inv, tuple(-a for a in la.matvec(inv, self.translation)))


@dataclass(frozen=True)
class Facet:
    """Intrinsic inequality ``normal . y >= offset`` plus incidence data."""

    normal: tuple[int, ...]
    offset: int
    vertex_ids: frozenset[int]


class LatticePolytope:
    """Convex hull of finitely many integer points.

    Construction computes everything (vertices, facets, lattice points);
    instances are immutable afterwards.
    """

    __slots__ = ("ambient_dim", "vertices", "dim", "origin", "_u", "_uinv", "facets", "lattice_points", "__dict__")

    def __init__(self, points: Iterable[Sequence[int]]):
        pts = sorted({tuple(int(a) for a in p) for p in points})
        if not pts:
            raise ValueError("empty point set")
        n = len(pts[0])
        if any(len(p) != n for p in pts):
            raise DimensionMismatch("points of different dimensions")
        self.ambient_dim = n
        self.origin = pts[0]
        diffs = [la.vsub(p, self.origin) for p in pts[1:]]
        u, k = la.saturation_completion(diffs, n) if n else ([], 0)
        self.dim = k
        self._u = u
        self._uinv = la.integer_inverse(u) if n else []
        local = [self.to_intrinsic(p) for p in pts]
        vert_ids, facets = _hull(local, k)
        self.vertices = tuple(pts[i] for i in vert_ids)
        remap = {old: new for new, old in enumerate(vert_ids)}
        self.facets = tuple(
            sorted(
                (Facet(a, b, frozenset(remap[i] for i in ids if i in remap)) for a, b, ids in facets),
                key=lambda f: (f.normal, f.offset),
            )
        )
        self.lattice_points = self._enumerate_points()

    # coordinates -----------------------------------------------------

    def to_intrinsic(self, x: Sequence) -> tuple:
        """Intrinsic coordinates; only meaningful for points of the affine hull."""
        rel = la.vsub(x, self.origin)
        return tuple(la.dot(self._uinv[i], rel) for i in range(self.dim))

    def from_intrinsic(self, y: Sequence) -> tuple:
        n = self.ambient_dim
        return tuple(self.origin[r] + sum(self._u[r][j] * y[j] for j in range(self.dim)) for r in range(n))

    def direction_to_intrinsic(self, v: Sequence) -> tuple | None:
        """Intrinsic coordinates of a vector parallel to the affine hull."""
        full = [la.dot(row, v) for row in self._uinv]
        if any(full[self.dim:]):
            return None
        return tuple(full[: self.dim])

    def direction_from_intrinsic(self, w: Sequence) -> tuple:
        return tuple(sum(self._u[r][j] * w[j] for j in range(self.dim)) for r in range(self.ambient_dim))

    @property
    def intrinsic_basis(self) -> list[Point]:
        """Lattice basis of the direction space of the affine hull."""
        return [tuple(self._u[r][j] for r in range(self.ambient_dim)) for j in range(self.dim)]

    def in_affine_hull(self, x: Sequence) -> bool:
        rel = la.vsub(x, self.origin)
        return all(la.dot(self._uinv[i], rel) == 0 for i in range(self.dim, self.ambient_dim))

    def contains(self, x: Sequence) -> bool:
        """Membership for integer or rational points."""
        if not self.in_affine_hull(x):
            return False
        y = self.to_intrinsic(x)
        return all(la.dot(f.normal, y) >= f.offset for f in self.facets)

    def facet_forms(self) -> list[tuple[tuple[int, ...], int]]:
        """Ambient affine forms ``(a, b)`` with ``a . x >= b`` for each facet."""
        out = []
        k = self.dim
        for f in self.facets:
            a = tuple(sum(f.normal[j] * self._uinv[j][c] for j in range(k)) for c in range(self.ambient_dim))
            out.append((a, f.offset + la.dot(a, self.origin)))
        return out

    def equations(self) -> list[tuple[int, ...]]:
        """Integer forms vanishing on ``aff(P) - origin``."""
        return [tuple(self._uinv[i]) for i in range(self.dim, self.ambient_dim)]

    def _enumerate_points(self) -> tuple[Point, ...]:
        k = self.dim
        if k == 0:
            return (self.origin,)
        local = [self.to_intrinsic(v) for v in self.vertices]
        lo = [min(p[i] for p in local) for i in range(k)]
        hi = [max(p[i] for p in local) for i in range(k)]
        found = []
        for y in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
            if all(la.dot(f.normal, y) >= f.offset for f in self.facets):
                found.append(self.from_intrinsic(y))
        return tuple(sorted(found))

    # identity --------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, LatticePolytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return f"LatticePolytope({list(self.vertices)})"

    # derived data ----------------------------------------------------

    def facet_points(self, index: int) -> tuple[Point, ...]:
        f = self.facets[index]
        return tuple(p for p in self.lattice_points if la.dot(f.normal, self.to_intrinsic(p)) == f.offset)

    def facet_polytope(self, index: int) -> LatticePolytope:
        return LatticePolytope(self.vertices[i] for i in self.facets[index].vertex_ids)

    def facet_index(self, face: LatticePolytope) -> int:
        """Index of the facet whose vertex set equals that of ``face``."""
        target = set(face.vertices)
        for i, f in enumerate(self.facets):
            if {self.vertices[j] for j in f.vertex_ids} == target:
                return i
        raise ValueError("not a facet of the polytope")

    def interior_points(self) -> tuple[Point, ...]:
        out = []
        for p in self.lattice_points:
            y = self.to_intrinsic(p)
            if all(la.dot(f.normal, y) > f.offset for f in self.facets):
                out.append(p)
        return tuple(out)

    @cached_property
    def edges(self) -> tuple[tuple[Point, Point], ...]:
        """Vertex pairs spanning one-dimensional faces."""
        return tuple(
            tuple(face.polytope.vertices)  # type: ignore[misc]
            for face in faces(self)
            if face.polytope.dim == 1
        )


@dataclass(frozen=True)
class Face:
    polytope: LatticePolytope
    facet_ids: frozenset[int] = field(default_factory=frozenset)


def _affine_rank(points: Sequence[Sequence]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    return la.rank([la.vsub(p, base) for p in points[1:]])


def _hyperplane(points: Sequence[Sequence[int]], interior: Sequence) -> tuple[tuple[int, ...], int]:
    """Primitive inward form through ``points`` (affine rank d-1)."""
    base = points[0]
    rows = [la.vsub(p, base) for p in points[1:]]
    ns = la.nullspace(rows)
    if len(ns) != 1:
        raise ValueError("points do not span a hyperplane")
    a = la.clear_denominators(ns[0])
    b = la.dot(a, base)
    if la.dot(a, interior) < b:
        a = tuple(-x for x in a)
        b = -b
    return a, b


def _hull(local: list[tuple[int, ...]], d: int) -> tuple[list[int], list[tuple[tuple[int, ...], int, set[int]]]]:
    """Beneath-beyond hull of full-dimensional points in ``Z^d``.

    Returns vertex indices (sorted) and facets ``(normal, offset, point ids)``.
    """
    if d == 0:
        return [0], []
    if d == 1:
        vals = [p[0] for p in local]
        lo = vals.index(min(vals))
        hi = vals.index(max(vals))
        facets = [((1,), vals[lo], {lo}), ((-1,), -vals[hi], {hi})]
        return sorted({lo, hi}), facets

    # initial simplex
    simplex = [0]
    for i in range(1, len(local)):
        if _affine_rank([local[j] for j in simplex] + [local[i]]) == len(simplex):
            simplex.append(i)
            if len(simplex) == d + 1:
                break
    interior = tuple(Fraction(sum(local[i][c] for i in simplex), d + 1) for c in range(d))

    processed: list[int] = list(simplex)
    facets: dict[tuple[tuple[int, ...], int], set[int]] = {}
    for omit in simplex:
        ids = [i for i in simplex if i != omit]
        a, b = _hyperplane([local[i] for i in ids], interior)
        facets[(a, b)] = set(ids)

    for p in range(len(local)):
        if p in simplex:
            continue
        x = local[p]
        visible = [key for key in facets if la.dot(key[0], x) < key[1]]
        processed.append(p)
        if not visible:
            for key, ids in facets.items():
                if la.dot(key[0], x) == key[1]:
                    ids.add(p)
            continue
        hidden = [key for key in facets if la.dot(key[0], x) >= key[1]]
        new: dict[tuple[tuple[int, ...], int], set[int]] = {}
        for vk in visible:
            for hk in hidden:
                ridge = facets[vk] & facets[hk]
                if len(ridge) < d - 1:
                    continue
                rpts = [local[i] for i in sorted(ridge)]
                if _affine_rank(rpts) != d - 2:
                    continue
                a, b = _hyperplane(rpts + [x], interior)
                if (a, b) in facets or (a, b) in new:
                    continue
                new[(a, b)] = set()
        for key in visible:
            del facets[key]
        for key, ids in facets.items():
            if la.dot(key[0], x) == key[1]:
                ids.add(p)
        for key in new:
            new[key] = {i for i in processed if la.dot(key[0], local[i]) == key[1]}
        facets.update(new)

    point_ids = set()
    for ids in facets.values():
        point_ids |= ids
    vertices = []
    for i in sorted(point_ids):
        normals = [key[0] for key, ids in facets.items() if i in ids]
        if la.rank(normals) == d:
            vertices.append(i)
    vset = set(vertices)
    return vertices, [(a, b, ids & vset) for (a, b), ids in facets.items()]


def hull(points: Iterable[Sequence[int]]) -> LatticePolytope:
    return LatticePolytope(points)


def lattice_points(P: LatticePolytope) -> tuple[Point, ...]:
    return P.lattice_points


def faces(P: LatticePolytope) -> list[Face]:
    """All nonempty faces, largest first, each tagged with its facet ids."""
    nf = len(P.facets)
    sets: dict[frozenset[int], frozenset[int]] = {frozenset(range(len(P.vertices))): frozenset()}
    frontier = [frozenset(f.vertex_ids) for f in P.facets]
    while frontier:
        nxt = []
        for s in frontier:
            if not s or s in sets:
                continue
            sets[s] = frozenset(i for i in range(nf) if s <= P.facets[i].vertex_ids)
            for f in P.facets:
                t = s & f.vertex_ids
                if t and t not in sets:
                    nxt.append(t)
        frontier = nxt
    out = [Face(LatticePolytope(P.vertices[i] for i in s), tags) for s, tags in sets.items()]
    out.sort(key=lambda f: (-f.polytope.dim, f.polytope.vertices))
    return out


def minkowski_sum(P: LatticePolytope, Q: LatticePolytope) -> LatticePolytope:
    if P.ambient_dim != Q.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    return LatticePolytope(la.vadd(p, q) for p in P.vertices for q in Q.vertices)


def dilate(P: LatticePolytope, c: int) -> LatticePolytope:
    if c < 1:
        raise ValueError("dilation factor must be positive")
    return LatticePolytope(la.vscale(c, v) for v in P.vertices)


def translate(P: LatticePolytope, t: Sequence[int]) -> LatticePolytope:
    return LatticePolytope(la.vadd(v, t) for v in P.vertices)


def image(P: LatticePolytope, f: AffineLatticeMap) -> LatticePolytope:
    return LatticePolytope(f(v) for v in P.vertices)


def join_embeddings(n: int, m: int) -> tuple[AffineLatticeMap, AffineLatticeMap]:
    """Face embeddings ``p -> (p, 0, 0)`` and ``q -> (0, q, 1)``."""
    total = n + m + 1
    left = [[int(r == c) for c in range(n)] for r in range(total)]
    right = [[int(r == n + c) for c in range(m)] for r in range(total)]
    return (
        AffineLatticeMap(left, (0,) * total) if n else AffineLatticeMap([[]] * total, (0,) * total),
        AffineLatticeMap(right, (0,) * (total - 1) + (1,)) if m else AffineLatticeMap([[]] * total, (0,) * (total - 1) + (1,)),
    )


def join(P: LatticePolytope, Q: LatticePolytope) -> LatticePolytope:
    n, m = P.ambient_dim, Q.ambient_dim
    pts = [tuple(p) + (0,) * m + (0,) for p in P.vertices]
    pts += [(0,) * n + tuple(q) + (1,) for q in Q.vertices]
    return LatticePolytope(pts)


def simplex_segment(c: int) -> LatticePolytope:
    """``c * Δ_1`` as the interval ``[0, c]`` in ``Z``."""
    return LatticePolytope([(0,), (c,)])


def _width_on(values: Iterable[int]) -> int:
    vals = list(values)
    return max(vals) - min(vals)


def lattice_width(P: LatticePolytope, direction: Sequence[int]) -> int:
    """Width of ``P`` measured by the primitive form vanishing on ``direction``.

    In the plane the form is unique up to sign.  In higher ambient
    dimension the polytope must have dimension at most two and contain the
    direction in its affine hull, so the measurement is intrinsic.
    """
    direction = tuple(direction)
    if not any(direction):
        raise ValueError("direction must be nonzero")
    if not la.is_primitive(direction):
        raise ValueError("direction must be primitive")
    if P.ambient_dim == 2:
        form = (-direction[1], direction[0])
        return _width_on(la.dot(form, x) for x in P.lattice_points)
    if P.ambient_dim == 1:
        return 0
    w = P.direction_to_intrinsic(direction)
    if w is None or P.dim > 2:
        raise ValueError("width along a line needs a planar polytope containing the direction")
    if P.dim == 1:
        return 0
    form = (-w[1], w[0])
    return _width_on(la.dot(form, P.to_intrinsic(x)) for x in P.lattice_points)


def form_width(P: LatticePolytope, form: Sequence[int]) -> int:
    """Width of ``L_P`` under an integer linear form."""
    return _width_on(la.dot(form, x) for x in P.lattice_points)


def minimal_lattice_width(P: LatticePolytope) -> tuple[int, tuple[int, ...]]:
    """Minimal width over all primitive forms of a full-dimensional polygon.

    Returns ``(width, form)``.  Search is exact: any form achieving width at
    most ``w0`` is bounded by two independent edge vectors.
    """
    if P.ambient_dim != 2 or P.dim != 2:
        raise ValueError("minimal width is implemented for full-dimensional polygons")
    best = min(((form_width(P, f), f) for f in ((1, 0), (0, 1))), key=lambda t: t[0])
    w0 = best[0]
    e1 = la.vsub(P.vertices[1], P.vertices[0])
    e2 = next(la.vsub(v, P.vertices[0]) for v in P.vertices[2:] if la.det([e1, la.vsub(v, P.vertices[0])]) != 0)
    inv = la.inverse([e1, e2])
    corners = [la.matvec(inv, (s, t)) for s in (-w0, w0) for t in (-w0, w0)]
    lo = [min(c[i] for c in corners) for i in range(2)]
    hi = [max(c[i] for c in corners) for i in range(2)]
    for a in range(math.floor(lo[0]), math.ceil(hi[0]) + 1):
        for b in range(math.floor(lo[1]), math.ceil(hi[1]) + 1):
            if (a, b) == (0, 0) or la.vgcd((a, b)) != 1:
                continue
            if (a, b) < (0, 0) and (-a, -b) != (a, b):
                continue
            w = form_width(P, (a, b))
            if (w, (a, b)) < best:
                best = (w, (a, b))
    return best


def lattice_length(a: Sequence[int], b: Sequence[int]) -> int:
    return la.vgcd(la.vsub(b, a))


def segment_embeddings(P: LatticePolytope, c: int) -> list[tuple[Point, Point]]:
    """All ``(start, step)`` with ``start + i*step`` in ``L_P`` for ``i <= c``."""
    if c < 1:
        raise ValueError("c must be positive")
    out = []
    pts = P.lattice_points
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            d = la.vsub(b, a)
            if any(x % c for x in d):
                continue
            step = tuple(x // c for x in d)
            if la.is_primitive(step):
                out.append((a, step))
    return out


def pyramid_apex(P: LatticePolytope) -> list[tuple[Point, Face]]:
    """All ``(apex, base)`` pairs exhibiting ``P`` as a pyramid."""
    out = []
    for fi, f in enumerate(P.facets):
        off = [i for i in range(len(P.vertices)) if i not in f.vertex_ids]
        if len(off) != 1:
            continue
        base = Face(P.facet_polytope(fi), frozenset({fi}))
        out.append((P.vertices[off[0]], base))
    out.sort(key=lambda t: t[0])
    return out


@dataclass(frozen=True)
class Homothety:
    """``Q = factor * P + translation``; ``center`` is the fixed point when unique."""

    factor: Fraction
    translation: tuple[Fraction, ...]
    center: tuple[Fraction, ...] | None


def homothety_check(P: LatticePolytope, Q: LatticePolytope) -> Homothety | None:
    if P.ambient_dim != Q.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    n = P.ambient_dim
    if len(Q.vertices) == 1:
        q = tuple(Fraction(a) for a in Q.vertices[0])
        return Homothety(Fraction(0), q, q)
    if len(P.vertices) != len(Q.vertices):
        return None
    p0, p1 = P.vertices[0], P.vertices[1]
    q0, q1 = Q.vertices[0], Q.vertices[1]
    dp, dq = la.vsub(p1, p0), la.vsub(q1, q0)
    k = next(i for i in range(n) if dp[i] != 0)
    lam = Fraction(dq[k], dp[k])
    if lam <= 0:
        return None
    t = tuple(Fraction(b) - lam * a for a, b in zip(p0, q0))
    for p, q in zip(P.vertices, Q.vertices):
        if any(lam * a + s != b for a, s, b in zip(p, t, q)):
            return None
    if lam == 1:
        center = tuple(Fraction(0) for _ in t) if not any(t) else None
    else:
        center = tuple(s / (1 - lam) for s in t)
    return Homothety(lam, t, center)


def _polygon_edges(P: LatticePolytope) -> list[tuple[tuple[int, int], int]]:
    """Edge directions (primitive) and lattice lengths of a planar polytope, as a multiset."""
    vs = P.vertices
    if len(vs) == 1:
        return []
    if len(vs) == 2:
        d = la.vsub(vs[1], vs[0])
        g = la.vgcd(d)
        u = tuple(x // g for x in d)
        return [(u, g), (tuple(-x for x in u), g)]
    ordered = _ccw(vs)
    out = []
    for a, b in zip(ordered, ordered[1:] + ordered[:1]):
        d = la.vsub(b, a)
        g = la.vgcd(d)
        out.append((tuple(x // g for x in d), g))
    return out


def _ccw(vs: Sequence[Point]) -> list[Point]:
    cx = Fraction(sum(v[0] for v in vs), len(vs))
    cy = Fraction(sum(v[1] for v in vs), len(vs))
    return sorted(vs, key=lambda v: _angle_key((v[0] - cx, v[1] - cy)))


def _angle_key(d: Sequence) -> tuple:
    """Exact sort key for the polar angle of a nonzero planar vector."""
    x, y = d
    half = 0 if (y > 0 or (y == 0 and x > 0)) else 1
    return (half, _Slope(x, y))


class _Slope:
    __slots__ = ("x", "y")

    def __init__(self, x, y):
        self.x, self.y = x, y

    def __lt__(self, other):
        return self.x * other.y - self.y * other.x > 0

    def __eq__(self, other):
        return self.x * other.y - self.y * other.x == 0


def minkowski_summand_check(Q: LatticePolytope, P: LatticePolytope, candidate: LatticePolytope | None = None) -> LatticePolytope | None:
    """Return ``R`` with ``Q + R = P`` or ``None``.

    With ``candidate`` given, only that ``R`` is verified (any dimension).
    Otherwise the search works with edge vectors and needs ambient dimension
    at most two.
    """
    if candidate is not None:
        return candidate if minkowski_sum(Q, candidate) == P else None
    if P.ambient_dim != Q.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    if P.ambient_dim > 2:
        raise ValueError("summand search needs ambient dimension at most two")
    if P.ambient_dim == 1:
        lenp = P.vertices[-1][0] - P.vertices[0][0]
        lenq = Q.vertices[-1][0] - Q.vertices[0][0]
        if lenq > lenp:
            return None
        lo = P.vertices[0][0] - Q.vertices[0][0]
        return LatticePolytope([(lo,), (lo + lenp - lenq,)])
    need: dict[tuple[int, int], int] = {}
    for u, g in _polygon_edges(P):
        need[u] = need.get(u, 0) + g
    for u, g in _polygon_edges(Q):
        if need.get(u, 0) < g:
            return None
        need[u] -= g
    steps = sorted(((u, g) for u, g in need.items() if g), key=lambda t: _angle_key(t[0]))
    path = [(0, 0)]
    for u, g in steps:
        path.append(la.vadd(path[-1], la.vscale(g, u)))
    R0 = LatticePolytope(path)
    shift = la.vsub(la.vsub(P.vertices[0], Q.vertices[0]), R0.vertices[0])
    R = translate(R0, shift)
    return R if minkowski_sum(Q, R) == P else None


def _affine_basis(P: LatticePolytope) -> list[int]:
    """Indices of ``dim + 1`` affinely independent vertices."""
    local = [P.to_intrinsic(v) for v in P.vertices]
    chosen = [0]
    for i in range(1, len(local)):
        if _affine_rank([local[j] for j in chosen] + [local[i]]) == len(chosen):
            chosen.append(i)
            if len(chosen) == P.dim + 1:
                break
    return chosen


def _intrinsic_isos(P: LatticePolytope, Q: LatticePolytope) -> Iterator[list[list[int]]]:
    """Yield intrinsic affine maps ``y -> A y + t`` (as ``[A | t]``) with ``A`` unimodular
    carrying the vertices of ``P`` onto those of ``Q``."""
    if P.dim != Q.dim or len(P.vertices) != len(Q.vertices) or len(P.lattice_points) != len(Q.lattice_points):
        return
    k = P.dim
    lp = [P.to_intrinsic(v) for v in P.vertices]
    lq = [Q.to_intrinsic(v) for v in Q.vertices]
    qset = set(lq)
    basis = _affine_basis(P)
    if k == 0:
        yield []
        return
    src = [la.vsub(lp[i], lp[basis[0]]) for i in basis[1:]]
    src_inv = la.inverse(la.transpose(src))
    for images in itertools.permutations(range(len(lq)), k + 1):
        tgt = [la.vsub(lq[j], lq[images[0]]) for j in images[1:]]
        a = la.matmul(la.transpose(tgt), src_inv)
        if any(Fraction(x).denominator != 1 for row in a for x in row):
            continue
        a = [[int(x) for x in row] for row in a]
        if abs(la.det(a)) != 1:
            continue
        t = la.vsub(lq[images[0]], la.matvec(a, lp[basis[0]]))
        if {la.vadd(la.matvec(a, y), t) for y in lp} == qset:
            yield [row + [ti] for row, ti in zip(a, t)]


def _ambient_map(P: LatticePolytope, Q: LatticePolytope, at: list[list[int]]) -> AffineLatticeMap:
    k = P.dim
    n, m = P.ambient_dim, Q.ambient_dim
    a = [row[:k] for row in at]
    t = [row[k] for row in at]
    if n == m:
        # Q.U diag(A, I) P.U^{-1}, translation fixing origins
        block = [[(a[i][j] if i < k and j < k else int(i == j)) for j in range(n)] for i in range(n)]
        mat = la.matmul(la.matmul(Q._u, block), P._uinv)
    else:
        uq = [row[:k] for row in Q._u]
        mat = la.matmul(la.matmul(uq, a), P._uinv[:k]) if k else [[0] * n for _ in range(m)]
    img0 = Q.from_intrinsic(la.vadd(la.matvec(a, (0,) * k), t)) if k else Q.origin
    trans = la.vsub(img0, la.matvec(mat, P.origin))
    return AffineLatticeMap(mat, trans)


def affine_lattice_iso(P: LatticePolytope, Q: LatticePolytope) -> AffineLatticeMap | None:
    """A lattice-affine map carrying ``L_P`` onto ``L_Q``, if one exists."""
    for at in _intrinsic_isos(P, Q):
        return _ambient_map(P, Q, at)
    return None


def symmetries(P: LatticePolytope) -> list[AffineLatticeMap]:
    """Unimodular affine self-maps of the ambient lattice preserving ``L_P``.

    Off the affine hull the maps act as the identity in the complementary
    lattice directions, so each symmetry of ``P`` is listed once.
    """
    maps = [_ambient_map(P, P, at) for at in _intrinsic_isos(P, P)]
    maps.sort(key=lambda f: (f.matrix, f.translation))
    return maps
