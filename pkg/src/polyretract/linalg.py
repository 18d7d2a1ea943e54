"""Exact integer and rational linear algebra.

Everything here works on plain Python lists/tuples of ``int`` or
``fractions.Fraction``; no floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Vector = tuple[int, ...]
Matrix = list[list]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def vgcd(v: Sequence[int]) -> int:
    g = 0
    for a in v:
        g = gcd(g, a)
    return g


def primitive(v: Sequence[int]) -> Vector:
    """Divide an integer vector by the gcd of its entries."""
    g = vgcd(v)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(a // g for a in v)


def is_primitive(v: Sequence[int]) -> bool:
    return vgcd(v) == 1


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def vadd(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v: Sequence) -> tuple:
    return tuple(c * a for a in v)


def transpose(m: Sequence[Sequence]) -> Matrix:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in a)


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _to_fractions(m: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in m]


def row_reduce(m: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns ``(rref, pivot_columns)``."""
    a = _to_fractions(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m or not m[0]:
        return 0
    return len(row_reduce(m)[1])


def det(m: Sequence[Sequence]):
    n = len(m)
    if n == 0:
        return 1
    a = _to_fractions(m)
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            result = -result
        result *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return result


def inverse(m: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(m)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(m)]
    red, piv = row_reduce(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red[:n]]


def integer_inverse(m: Sequence[Sequence[int]]) -> Matrix:
    """Inverse of a unimodular integer matrix, as integers."""
    inv = inverse(m)
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def nullspace(m: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """Basis of the right kernel ``{x : m x = 0}`` over Q."""
    if not m:
        raise ValueError("nullspace of an empty matrix needs a column count")
    cols = len(m[0])
    red, piv = row_reduce(m)
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for r, p in enumerate(piv):
            v[p] = -red[r][f]
        basis.append(tuple(v))
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """One rational solution of ``a x = b`` or ``None`` if inconsistent."""
    if not a:
        return None if any(b) else ()
    cols = len(a[0])
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    red, piv = row_reduce(aug)
    if cols in piv:
        return None
    x = [Fraction(0)] * cols
    for r, p in enumerate(piv):
        x[p] = red[r][cols]
    return tuple(x)


def clear_denominators(v: Sequence[Fraction]) -> Vector:
    """Smallest integer multiple of a rational vector, made primitive."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    return primitive([int(Fraction(x) * den) for x in v])


def hnf(rows: Sequence[Sequence[int]]) -> list[Vector]:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Pivots are positive, entries above each pivot are reduced into
    ``[0, pivot)``, zero rows are dropped.
    """
    a = [list(r) for r in rows if any(r)]
    if not a:
        return []
    ncols = len(a[0])
    m = len(a)
    r = 0
    for c in range(ncols):
        if r == m:
            break
        for i in range(r + 1, m):
            if a[i][c] != 0:
                x0, y0 = a[r][c], a[i][c]
                g, s, t = xgcd(x0, y0)
                new_r = [s * p + t * q for p, q in zip(a[r], a[i])]
                new_i = [(x0 // g) * q - (y0 // g) * p for p, q in zip(a[r], a[i])]
                a[r], a[i] = new_r, new_i
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        piv = a[r][c]
        for i in range(r):
            q = a[i][c] // piv
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
    return [tuple(row) for row in a[:r] if any(row)]


def column_echelon(m: Sequence[Sequence[int]], ncols: int) -> tuple[Matrix, Matrix, int]:
    """Unimodular column reduction.

    Returns ``(A, V, k)`` where ``A = m V`` has nonzero columns only among
    the first ``k`` and ``V`` is unimodular.  The last ``ncols - k`` columns
    of ``V`` form a basis of the integer kernel of ``m``.
    """
    a = [list(r) for r in m]
    v = identity(ncols)
    piv = 0
    for row in range(len(a)):
        if piv == ncols:
            break
        for j in range(piv + 1, ncols):
            y0 = a[row][j]
            if y0 == 0:
                continue
            x0 = a[row][piv]
            g, s, t = xgcd(x0, y0)
            p, q = x0 // g, y0 // g
            for mat in (a, v):
                for r in mat:
                    cp, cj = r[piv], r[j]
                    r[piv] = s * cp + t * cj
                    r[j] = -q * cp + p * cj
        if a[row][piv] != 0:
            piv += 1
    return a, v, piv


def integer_kernel(m: Sequence[Sequence[int]], ncols: int) -> list[Vector]:
    """Lattice basis of ``{x in Z^ncols : m x = 0}``."""
    if not m:
        return [tuple(r) for r in identity(ncols)]
    _, v, k = column_echelon(m, ncols)
    return [tuple(v[i][j] for i in range(ncols)) for j in range(k, ncols)]


def saturation_completion(vectors: Sequence[Sequence[int]], n: int) -> tuple[Matrix, int]:
    """Unimodular ``U`` whose first ``k`` columns span ``span_Q(vectors) ∩ Z^n``.

    Returns ``(U, k)``.
    """
    vecs = [list(x) for x in vectors if any(x)]
    if not vecs:
        return identity(n), 0
    orth = integer_kernel(vecs, n)
    if not orth:
        return identity(n), n
    _, v, k = column_echelon([list(r) for r in orth], n)
    order = list(range(k, n)) + list(range(k))
    u = [[v[i][j] for j in order] for i in range(n)]
    return u, n - k


def saturation_basis(vectors: Sequence[Sequence[int]], n: int) -> list[Vector]:
    u, k = saturation_completion(vectors, n)
    return [tuple(u[i][j] for i in range(n)) for j in range(k)]


def complete_to_basis(v: Sequence[int]) -> Matrix:
    """Unimodular integer matrix whose first column is the primitive ``v``."""
    n = len(v)
    if not is_primitive(v):
        raise ValueError("vector must be primitive")
    _, w, _ = column_echelon([list(v)], n)
    # v^T W = (1, 0, ..., 0) up to sign, so v is the first row of W^{-1}
    winv = integer_inverse(w)
    if winv[0] != list(v):
        winv[0] = [-x for x in winv[0]]
    return transpose(winv)


def lattice_coordinates(basis: Sequence[Sequence[int]], x: Sequence) -> tuple | None:
    """Coordinates of ``x`` in a lattice basis (rows), or ``None`` if outside
    the rational span.  Coordinates may be non-integral."""
    if not basis:
        return () if not any(x) else None
    return solve(transpose(basis), x)


def in_lattice(basis: Sequence[Sequence[int]], x: Sequence[int]) -> bool:
    c = lattice_coordinates(basis, x)
    return c is not None and all(Fraction(t).denominator == 1 for t in c)


def intersect_with_subspace(basis: Sequence[Sequence[int]], subspace: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Lattice basis of ``lattice(basis) ∩ span_Q(subspace)``."""
    sub = [list(s) for s in subspace if any(s)]
    if not sub:
        return []
    forms = integer_kernel(sub, n)
    if not forms:
        return hnf(basis)
    # c B K^T = 0  <=>  (B K^T)^T c^T = 0
    bk = matmul(basis, transpose(forms))
    coeffs = integer_kernel(transpose(bk), len(basis))
    return hnf([tuple(dot(c, col) for col in transpose(basis)) for c in coeffs])
