"""Exact arithmetic over Q and quadratic fields, integer kernels, rational recognition.

Rationals are plain :class:`fractions.Fraction` values.  Quadratic elements
``a + b*sqrt(d)`` live in :class:`QuadElem`; the field is fixed by the
squarefree integer ``d`` and mixing two different fields is an error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import mpmath

Rat = Fraction


class FieldMismatchError(ValueError):
    """Raised when two quadratic elements live in different fields."""


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    f = 2
    while f * f <= n:
        if n % (f * f) == 0:
            return False
        f += 1
    return True


def squarefree_decomposition(n: int) -> tuple[int, int]:
    """Return ``(f, m)`` with ``n == f*f*m`` and ``m`` squarefree (sign kept in ``m``)."""
    if n == 0:
        raise ValueError("zero has no squarefree part")
    sign = -1 if n < 0 else 1
    n = abs(n)
    f, m = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        f *= p ** (e // 2)
        m *= p ** (e % 2)
        p += 1
    m *= n
    return f, sign * m


def as_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot read {x!r} as an exact rational")


@dataclass(frozen=True)
class QuadElem:
    """The number ``a + b*sqrt(d)`` with rational ``a, b`` and squarefree ``d != 0, 1``.

    For ``d < 0`` the square root is ``i*sqrt(|d|)``.
    """

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", as_rat(self.a))
        object.__setattr__(self, "b", as_rat(self.b))
        if self.d == 1 or not is_squarefree(self.d):
            raise ValueError(f"d={self.d} is not a squarefree integer other than 0, 1")

    # coercion -----------------------------------------------------------
    def _lift(self, other) -> "QuadElem":
        if isinstance(other, QuadElem):
            if other.d == self.d:
                return other
            if other.b == 0:
                return QuadElem(other.a, 0, self.d)
            if self.b == 0:
                # self is rational; caller re-dispatches through other's field
                return other
            raise FieldMismatchError(f"sqrt({self.d}) and sqrt({other.d}) do not mix")
        return QuadElem(as_rat(other), 0, self.d)

    def _pair(self, other) -> tuple["QuadElem", "QuadElem"]:
        o = self._lift(other)
        if o.d != self.d:
            return QuadElem(self.a, 0, o.d), o
        return self, o

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        u, v = self._pair(other)
        return QuadElem(u.a + v.a, u.b + v.b, u.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.a, -self.b, self.d)

    def __sub__(self, other):
        u, v = self._pair(other)
        return QuadElem(u.a - v.a, u.b - v.b, u.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        u, v = self._pair(other)
        return QuadElem(u.a * v.a + u.b * v.b * u.d, u.a * v.b + u.b * v.a, u.d)

    __rmul__ = __mul__

    def conj(self) -> "QuadElem":
        return QuadElem(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def inv(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadElem(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        u, v = self._pair(other)
        return u * v.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __eq__(self, other):
        if isinstance(other, QuadElem):
            if self.d != other.d:
                return self.b == 0 and other.b == 0 and self.a == other.a
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def rational_parts(self) -> tuple[Fraction, Fraction]:
        return self.a, self.b

    def to_mp(self):
        """Numeric value as an mpmath number at the current working precision."""
        a = mpmath.mpf(self.a.numerator) / self.a.denominator
        b = mpmath.mpf(self.b.numerator) / self.b.denominator
        if self.d < 0:
            return mpmath.mpc(a, b * mpmath.sqrt(-self.d))
        return a + b * mpmath.sqrt(self.d)

    def __complex__(self):
        return complex(self.to_mp())

    def __repr__(self):
        return f"QuadElem({self.a} + {self.b}*sqrt({self.d}))"


def quad_sqrt(n) -> QuadElem | Fraction:
    """Exact square root of a rational as a rational or a quadratic element."""
    n = as_rat(n)
    if n == 0:
        return Fraction(0)
    num = n.numerator * n.denominator
    f, m = squarefree_decomposition(num)
    coeff = Fraction(f, n.denominator)
    if m == 1:
        return coeff
    return QuadElem(0, coeff, m)


# ---------------------------------------------------------------------------
# integer lattices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntKernelBasis:
    rank: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rank != len(self.rows):
            raise ValueError("rank must equal the number of rows")

    def contains(self, vec: Sequence[int]) -> bool:
        """Whether an integer vector lies in the Z-span of the rows."""
        return in_integer_span(self.rows, vec)


def _canonical_sign(row: Sequence[int]) -> tuple[int, ...]:
    for v in row:
        if v != 0:
            return tuple(row) if v > 0 else tuple(-x for x in row)
    return tuple(row)


def primitive(row: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for v in row:
        g = math.gcd(g, v)
    if g == 0:
        return tuple(row)
    return _canonical_sign([v // g for v in row])


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def lll_reduce(rows: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """LLL-reduce linearly independent integer row vectors (exact rational Gram-Schmidt)."""
    b = [list(map(int, r)) for r in rows]
    n = len(b)
    if n <= 1:
        return b

    def gram_schmidt():
        bstar: list[list[Fraction]] = []
        mu = [[Fraction(0)] * n for _ in range(n)]
        bn: list[Fraction] = []
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = _dot(b[i], bstar[j]) / bn[j] if bn[j] else Fraction(0)
                v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
            bstar.append(v)
            bn.append(_dot(v, v))
        return mu, bn

    mu, bn = gram_schmidt()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                mu, bn = gram_schmidt()
        if bn[k] >= (delta - mu[k][k - 1] ** 2) * bn[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            mu, bn = gram_schmidt()
            k = max(k - 1, 1)
    return b


def integer_matrix_kernel(matrix: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Z-basis of ``{v in Z^ncols : matrix @ v == 0}`` by unimodular column reduction."""
    cols = [[row[j] for row in matrix] for j in range(ncols)]
    unimod = [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    piv = 0
    for i in range(len(matrix)):
        for j in range(piv + 1, ncols):
            while cols[j][i] != 0:
                q = cols[piv][i] // cols[j][i]
                cols[piv] = [x - q * y for x, y in zip(cols[piv], cols[j])]
                unimod[piv] = [x - q * y for x, y in zip(unimod[piv], unimod[j])]
                cols[piv], cols[j] = cols[j], cols[piv]
                unimod[piv], unimod[j] = unimod[j], unimod[piv]
        if piv < ncols and cols[piv][i] != 0:
            piv += 1
    return [unimod[j] for j in range(piv, ncols)]


def canonical_basis(rows: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    reduced = lll_reduce([list(r) for r in rows])
    return tuple(sorted(_canonical_sign(r) for r in reduced))


def in_integer_span(rows: Sequence[Sequence[int]], vec: Sequence[int]) -> bool:
    vec = list(vec)
    if not rows:
        return all(v == 0 for v in vec)
    # solve rows^T x = vec over Z: kernel of [rows^T | -vec] with last coordinate 1
    n = len(rows)
    mat = [[rows[j][i] for j in range(n)] + [-vec[i]] for i in range(len(vec))]
    ker = integer_matrix_kernel(mat, n + 1)
    g = 0
    for k in ker:
        g = math.gcd(g, k[-1])
    return g == 1


def _field_of(values) -> int | None:
    d = None
    for v in values:
        if isinstance(v, QuadElem) and v.b != 0:
            if d is None:
                d = v.d
            elif d != v.d:
                raise FieldMismatchError(f"coefficients mix sqrt({d}) and sqrt({v.d})")
    return d


def integer_kernel(coeffs: Sequence) -> IntKernelBasis:
    """Integer solutions ``v`` of ``sum(v[i] * coeffs[i]) == 0``.

    ``coeffs`` are rationals or quadratic elements of a single field.  For the
    isogeny relation the caller passes ``(-1, s, 2x)`` so that the solutions are
    the triples ``(b, c, d)`` with ``c*s + 2*d*x - b == 0``.
    """
    _field_of(coeffs)
    parts = []
    for c in coeffs:
        if isinstance(c, QuadElem):
            parts.append((c.a, c.b))
        else:
            parts.append((as_rat(c), Fraction(0)))
    n = len(parts)
    rows = []
    for k in range(2):
        row = [p[k] for p in parts]
        if all(x == 0 for x in row):
            continue
        den = math.lcm(*(x.denominator for x in row))
        rows.append([int(x * den) for x in row])
    if not rows:
        basis = [[int(i == j) for i in range(n)] for j in range(n)]
    else:
        basis = integer_matrix_kernel(rows, n)
    canon = canonical_basis(basis) if basis else ()
    return IntKernelBasis(len(canon), canon)


# ---------------------------------------------------------------------------
# rational recognition
# ---------------------------------------------------------------------------

def _exact_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, mpmath.mpf):
        if not mpmath.isfinite(x):
            raise ValueError("non-finite input")
        sign, man, exp, _ = x._mpf_
        man = -int(man) if sign else int(man)
        return Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** (-exp))
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite input")
    return Fraction(*x.as_integer_ratio())


def convergents(x: Fraction, max_terms: int = 200):
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    for _ in range(max_terms):
        a = math.floor(x)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield Fraction(h1, k1)
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def recognize_rational(x, max_height: int, scale: float = 1e-8) -> Fraction | None:
    """Smallest-denominator convergent ``p/q`` of ``x`` with ``q <= max_height``
    and ``|x - p/q| < 10*scale/q**2``; ``None`` when nothing qualifies.

    A ``None`` result means "not recognized at this height", nothing more.
    """
    if max_height < 1:
        raise ValueError("max_height must be >= 1")
    fx = _exact_fraction(x)
    for c in convergents(fx):
        q = c.denominator
        if q > max_height:
            return None
        if abs(fx - c) < Fraction(10) * Fraction(scale) / (q * q):
            return c
    return None
