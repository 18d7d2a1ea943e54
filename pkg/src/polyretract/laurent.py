"""Laurent polynomials over Q with Newton polytopes and exact GCD."""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from math import comb
from math import gcd as gcd_int
from typing import Iterable, Mapping, Sequence

from . import linalg as la
from .geometry import LatticePolytope

Exp = tuple[int, ...]


class ExtensionRequired(ArithmeticError):
    """Raised when an exact answer needs algebraic numbers outside Q."""

    def __init__(self, message: str, factors: Sequence = ()):
        super().__init__(message)
        self.factors = list(factors)


class TermClass(str, Enum):
    ZERO = "zero"
    MONOMIAL = "monomial"
    BINOMIAL = "binomial"
    SEGMENTONOMIAL = "segmentonomial"
    GENERAL = "general"


def _grlex(e: Exp) -> tuple:
    return (sum(e), e)


class LaurentPolynomial:
    """Finite sum of rational multiples of monomials ``x^e`` with ``e`` in ``Z^d``."""

    __slots__ = ("ambient_dim", "_terms", "_hash")

    def __init__(self, terms: Mapping[Sequence[int], object] | Iterable[tuple[Sequence[int], object]] = (), ambient_dim: int | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exp, Fraction] = {}
        for e, c in items:
            e = tuple(int(a) for a in e)
            acc[e] = acc.get(e, Fraction(0)) + Fraction(c)
        acc = {e: c for e, c in acc.items() if c != 0}
        dims = {len(e) for e in acc}
        if ambient_dim is None:
            if not dims:
                raise ValueError("ambient_dim is required for the zero polynomial")
            ambient_dim = dims.pop()
        if dims - {ambient_dim}:
            raise ValueError("exponent vectors of the wrong length")
        self.ambient_dim = ambient_dim
        self._terms = acc
        self._hash = None

    # constructors ----------------------------------------------------

    @classmethod
    def zero(cls, d: int) -> LaurentPolynomial:
        return cls({}, d)

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff=1) -> LaurentPolynomial:
        return cls({tuple(exp): coeff}, len(exp))

    @classmethod
    def constant(cls, d: int, c=1) -> LaurentPolynomial:
        return cls({(0,) * d: c}, d)

    @classmethod
    def variable(cls, d: int, i: int) -> LaurentPolynomial:
        return cls.monomial(tuple(int(j == i) for j in range(d)))

    # access ----------------------------------------------------------

    @property
    def terms(self) -> dict[Exp, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def sorted_terms(self) -> list[tuple[Exp, Fraction]]:
        """Terms in graded lexicographic order."""
        return sorted(self._terms.items(), key=lambda t: _grlex(t[0]))

    @property
    def support(self) -> list[Exp]:
        return sorted(self._terms, key=_grlex)

    def coefficient(self, e: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(e), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def single_term(self) -> tuple[Exp, Fraction]:
        if len(self._terms) != 1:
            raise ValueError("not a single term")
        return next(iter(self._terms.items()))

    # arithmetic ------------------------------------------------------

    def _check(self, other: LaurentPolynomial):
        if self.ambient_dim != other.ambient_dim:
            raise la_dim_error()

    def _coerce(self, other) -> LaurentPolynomial:
        if isinstance(other, LaurentPolynomial):
            self._check(other)
            return other
        return LaurentPolynomial.constant(self.ambient_dim, other)

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self._terms)
        for e, c in other._terms.items():
            acc[e] = acc.get(e, 0) + c
        return LaurentPolynomial(acc, self.ambient_dim)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial({e: -c for e, c in self._terms.items()}, self.ambient_dim)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, LaurentPolynomial):
            c = Fraction(other)
            return LaurentPolynomial({e: c * v for e, v in self._terms.items()}, self.ambient_dim)
        self._check(other)
        acc: dict[Exp, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return LaurentPolynomial(acc, self.ambient_dim)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative powers exist only for monomials")
            e, c = self.single_term()
            return LaurentPolynomial.monomial(tuple(a * k for a in e), c**k)
        result = LaurentPolynomial.constant(self.ambient_dim)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, exp: Sequence[int]) -> LaurentPolynomial:
        """Multiply by the monomial ``x^exp``."""
        return LaurentPolynomial({la.vadd(e, exp): c for e, c in self._terms.items()}, self.ambient_dim)

    def map_exponents(self, f) -> LaurentPolynomial:
        """Apply a map to every exponent; coefficients of colliding terms add."""
        items = [(tuple(f(e)), c) for e, c in self._terms.items()]
        dim = len(items[0][0]) if items else self.ambient_dim
        return LaurentPolynomial(items, dim)

    def __eq__(self, other):
        if isinstance(other, LaurentPolynomial):
            return self.ambient_dim == other.ambient_dim and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == LaurentPolynomial.constant(self.ambient_dim, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ambient_dim, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"x{i}^{a}" if a != 1 else f"x{i}" for i, a in enumerate(e) if a)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)

    # calculus --------------------------------------------------------

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for x, a in zip(point, e):
                term *= Fraction(x) ** a
            total += term
        return total

    def derivative(self, i: int) -> LaurentPolynomial:
        acc = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                acc[tuple(ne)] = c * e[i]
        return LaurentPolynomial(acc, self.ambient_dim)

    # structure -------------------------------------------------------

    def min_exponent(self) -> Exp:
        return tuple(min(e[i] for e in self._terms) for i in range(self.ambient_dim))

    def polynomial_part(self) -> tuple[LaurentPolynomial, Exp]:
        """``(g, m)`` with ``self = x^m * g`` and ``g`` free of monomial factors."""
        m = self.min_exponent()
        return self.shift(tuple(-a for a in m)), m

    def leading_term(self) -> tuple[Exp, Fraction]:
        """Lexicographically largest term."""
        e = max(self._terms)
        return e, self._terms[e]

    def normalized(self) -> LaurentPolynomial:
        """Representative of the associate class: shifted support, lex-leading coefficient 1."""
        if not self._terms:
            return self
        g, _ = self.polynomial_part()
        return g * (1 / g.leading_term()[1])

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "terms": [{"exp": list(e), "num": c.numerator, "den": c.denominator} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> LaurentPolynomial:
        d = int(data["ambient_dim"])
        terms = []
        for t in data["terms"]:
            terms.append((tuple(t["exp"]), Fraction(int(t["num"]), int(t.get("den", 1)))))
        return cls(terms, d)


def la_dim_error():
    from .geometry import DimensionMismatch

    return DimensionMismatch("polynomials live in different ambient dimensions")


def multiply(f: LaurentPolynomial, g: LaurentPolynomial) -> LaurentPolynomial:
    return f * g


def newton_polytope(f: LaurentPolynomial) -> LatticePolytope:
    if f.is_zero():
        raise ValueError("the zero polynomial has no Newton polytope")
    return LatticePolytope(f.support)


def classify(f: LaurentPolynomial) -> TermClass:
    n = len(f)
    if n == 0:
        return TermClass.ZERO
    if n == 1:
        return TermClass.MONOMIAL
    if n == 2:
        return TermClass.BINOMIAL
    return TermClass.SEGMENTONOMIAL if newton_polytope(f).dim <= 1 else TermClass.GENERAL


# polynomial division and gcd ------------------------------------------------

Poly = dict  # exponent tuple -> Fraction, nonnegative exponents


def _mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def _sub(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) - c
    return {e: c for e, c in out.items() if c != 0}


def _scale(a: Poly, c) -> Poly:
    return {e: v * c for e, v in a.items()} if c else {}


def _divide(a: Poly, b: Poly) -> Poly | None:
    """Exact quotient ``a / b`` of polynomials, or ``None``."""
    q: Poly = {}
    r = dict(a)
    lb = max(b)
    cb = b[lb]
    while r:
        lr = max(r)
        diff = tuple(x - y for x, y in zip(lr, lb))
        if any(x < 0 for x in diff):
            return None
        c = r[lr] / cb
        q[diff] = q.get(diff, 0) + c
        r = _sub(r, {tuple(x + y for x, y in zip(e, diff)): c * v for e, v in b.items()})
    return q


def _deg(a: Poly, v: int) -> int:
    return max(e[v] for e in a)


def _coeff_in(a: Poly, v: int, k: int) -> Poly:
    out = {}
    for e, c in a.items():
        if e[v] == k:
            ne = list(e)
            ne[v] = 0
            out[tuple(ne)] = c
    return out


def _monic_lex(a: Poly) -> Poly:
    return _scale(a, 1 / a[max(a)])


def _content(a: Poly, v: int) -> Poly:
    c: Poly | None = None
    for k in sorted({e[v] for e in a}):
        ck = _coeff_in(a, v, k)
        c = ck if c is None else _gcd_rec(c, ck, v - 1)
        if len(c) == 1 and all(x == 0 for x in next(iter(c))):
            break
    return _monic_lex(c)


def _prem(a: Poly, b: Poly, v: int) -> Poly:
    """Pseudo-remainder of ``a`` by ``b`` as polynomials in ``x_v``."""
    db = _deg(b, v)
    lc = _coeff_in(b, v, db)
    r = dict(a)
    while r and _deg(r, v) >= db:
        dr = _deg(r, v)
        lr = _coeff_in(r, v, dr)
        shift = tuple(dr - db if i == v else 0 for i in range(len(next(iter(b)))))
        term = _mul(lr, {shift: Fraction(1)})
        r = _sub(_mul(r, lc), _mul(term, b))
    return r


def _gcd_rec(a: Poly, b: Poly, v: int) -> Poly:
    """Monic-lex gcd of nonzero polynomials in variables ``x_0..x_v``."""
    n = len(next(iter(a)))
    one = {(0,) * n: Fraction(1)}
    if v < 0:
        return one
    if all(e[v] == 0 for e in a) and all(e[v] == 0 for e in b):
        return _gcd_rec(a, b, v - 1)
    ca, cb = _content(a, v), _content(b, v)
    c = _gcd_rec(ca, cb, v - 1)
    p, q = _divide(a, ca), _divide(b, cb)
    if _deg(p, v) < _deg(q, v):
        p, q = q, p
    while q and _deg(q, v) > 0:
        r = _prem(p, q, v)
        if not r:
            p, q = q, {}
            break
        p, q = q, _divide(r, _content(r, v))
    g = p if not q else one
    if _deg(g, v) > 0:
        g = _divide(g, _content(g, v))
    else:
        g = one
    return _monic_lex(_mul(c, g))


def divide(f: LaurentPolynomial, g: LaurentPolynomial) -> LaurentPolynomial | None:
    """Exact quotient in the Laurent ring, or ``None`` when ``g`` does not divide ``f``."""
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if f.is_zero():
        return f
    fp, fm = f.polynomial_part()
    gp, gm = g.polynomial_part()
    q = _divide(fp._terms, gp._terms)
    if q is None:
        return None
    return LaurentPolynomial(q, f.ambient_dim).shift(la.vsub(fm, gm))


def gcd(f: LaurentPolynomial, g: LaurentPolynomial) -> LaurentPolynomial:
    """Greatest common divisor, normalized up to Laurent units."""
    if f.is_zero() or g.is_zero():
        raise ValueError("gcd needs nonzero inputs")
    if f.ambient_dim != g.ambient_dim:
        raise la_dim_error()
    d = f.ambient_dim
    fp, _ = f.polynomial_part()
    gp, _ = g.polynomial_part()
    res = _gcd_rec(fp._terms, gp._terms, d - 1)
    return LaurentPolynomial(res, d).normalized()


def gcd_many(polys: Iterable[LaurentPolynomial]) -> LaurentPolynomial:
    it = iter(polys)
    acc = next(it)
    for p in it:
        acc = gcd(acc, p)
        if len(acc) == 1:
            break
    return acc.normalized()


# univariate helpers -----------------------------------------------------------


def _int_coeffs(coeffs: Sequence[Fraction]) -> list[int]:
    den = 1
    for c in coeffs:
        den = den * Fraction(c).denominator // gcd_int(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in coeffs]
    g = la.vgcd(ints)
    return [x // g for x in ints]


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _horner(coeffs: Sequence, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _synthetic_div(coeffs: list[Fraction], a: Fraction) -> list[Fraction]:
    """Divide ``sum coeffs[i] T^i`` by ``T - a`` (exact root assumed)."""
    out = []
    carry = Fraction(0)
    for c in reversed(coeffs[1:]):
        carry = carry * a + c
        out.append(carry)
    return out[::-1]


def rational_roots(coeffs: Sequence) -> tuple[list[tuple[Fraction, int]], list[Fraction]]:
    """Rational roots with multiplicity of ``sum coeffs[i] T^i`` and the leftover cofactor.

    ``T = 0`` is reported like any other root.
    """
    cs = [Fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        raise ValueError("zero polynomial")
    roots: dict[Fraction, int] = {}
    while len(cs) > 1 and cs[0] == 0:
        cs = cs[1:]
        roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
    if len(cs) > 1:
        ints = _int_coeffs(cs)
        cands = set()
        for p in _divisors(ints[0]):
            for q in _divisors(ints[-1]):
                cands.add(Fraction(p, q))
                cands.add(Fraction(-p, q))
        for a in sorted(cands):
            while len(cs) > 1 and _horner(cs, a) == 0:
                cs = _synthetic_div(cs, a)
                roots[a] = roots.get(a, 0) + 1
    return sorted(roots.items()), cs


def binomial_expand(base: LaurentPolynomial, step: LaurentPolynomial, lam, h: int) -> LaurentPolynomial:
    """``sum_j C(h, j) lam^j base * step^j``."""
    lam = Fraction(lam)
    out = LaurentPolynomial.zero(base.ambient_dim)
    cur = base
    for j in range(h + 1):
        out = out + cur * (comb(h, j) * lam**j)
        cur = cur * step
    return out
