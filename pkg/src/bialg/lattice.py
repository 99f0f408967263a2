"""Lattices <1, tau>, their conjugates, Isog(L, conj L), CM detection and special geodesics.

Everything that decides a branch works from exact data: an exact imaginary
quadratic tau, a declared geodesic with a genericity assertion, or an explicit
certificate of the integer relations among ``1, 2x, s`` (``tau = x + iy``,
``s = x**2 + y**2``).  Floating point tau alone is refused.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mp
from mpmath.libmp import fzero, mpf_neg

from .exactnum import (
    IntKernelBasis,
    QuadElem,
    as_rat,
    canonical_basis,
    integer_kernel,
    primitive,
    quad_sqrt,
    recognize_rational,
)

GUARD_DIGITS = 15
INFINITY = "oo"


def as_mpc(v):
    """``v`` as an mpc without rounding mp numbers to the ambient precision."""
    if isinstance(v, mpmath.mpc):
        return v
    if isinstance(v, mpmath.mpf):
        return mp.make_mpc((v._mpf_, fzero))
    return mpmath.mpc(v)


class UndecidableFromFloats(ValueError):
    """The relation structure of tau is not known exactly; no branch is chosen."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class TauMode(str, enum.Enum):
    EXACT_QUADRATIC = "exact_quadratic"
    GEODESIC = "geodesic"
    NUMERIC = "numeric"


def _num_str(v) -> str:
    if isinstance(v, str):
        mpmath.mpf(v)  # validates
        return v
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (int, Fraction)):
        return str(v) if isinstance(v, int) else f"{v.numerator}/{v.denominator}"
    return mpmath.nstr(mpmath.mpf(v), 60)


def _to_mpf(v: str):
    if "/" in v:
        q = Fraction(v)
        return mpmath.mpf(q.numerator) / q.denominator
    return mpmath.mpf(v)


def _gamma_sign(row: Sequence[int]) -> tuple[int, int, int]:
    b, c, d = row
    if c < 0 or (c == 0 and d < 0):
        return (-b, -c, -d)
    return (b, c, d)


@dataclass(frozen=True)
class TauSpec:
    """Lattice parameter tau together with how much of its arithmetic is known.

    Build with :meth:`exact_quadratic`, :meth:`geodesic` or :meth:`numeric`.
    Numeric fields are kept as decimal strings so the value can be re-read at
    any working precision.
    """

    mode: TauMode
    tau_exact: QuadElem | None = None
    triple: tuple[int, int, int] | None = None
    position: str | None = None
    generic: bool = True
    x_num: str | None = None
    y_num: str | None = None
    certificate: IntKernelBasis | None = None

    # constructors --------------------------------------------------------
    @classmethod
    def exact_quadratic(cls, p, q, d: int) -> "TauSpec":
        """tau = p + q*sqrt(d) with d < 0 squarefree and q > 0."""
        tau = QuadElem(as_rat(p), as_rat(q), int(d))
        if tau.d >= 0 or tau.b <= 0:
            raise ValueError("exact tau must be p + q*sqrt(d) with d < 0 and q > 0")
        return cls(TauMode.EXACT_QUADRATIC, tau_exact=tau)

    @classmethod
    def geodesic(cls, b: int, c: int, d: int, position, generic: bool = True) -> "TauSpec":
        """tau on the geodesic ``c*(x^2+y^2) + 2*d*x - b = 0``.

        ``position`` is ``y`` for a vertical geodesic (``c == 0``) and the
        angle in (0, pi) measured from the circle centre otherwise.
        """
        b, c, d = int(b), int(c), int(d)
        if c == 0 and d == 0:
            raise ValueError("degenerate geodesic triple")
        if c != 0 and d * d + b * c <= 0:
            raise ValueError("triple does not describe a real circle")
        triple = _gamma_sign(primitive((b, c, d)))
        spec = cls(TauMode.GEODESIC, triple=triple, position=_num_str(position), generic=bool(generic))
        with mp.workdps(30):
            pos = _to_mpf(spec.position)
            if c == 0 and pos <= 0:
                raise ValueError("vertical geodesic position (y) must be positive")
            if c != 0 and not (0 < pos < mp.pi):
                raise ValueError("circle position (angle) must lie in (0, pi)")
        if spec.generic:
            spec._warn_if_special()
        return spec

    @classmethod
    def numeric(cls, x, y, certificate: Sequence[Sequence[int]] | IntKernelBasis | None = None) -> "TauSpec":
        if certificate is not None and not isinstance(certificate, IntKernelBasis):
            rows = [tuple(int(v) for v in r) for r in certificate]
            canon = canonical_basis(rows) if rows else ()
            certificate = IntKernelBasis(len(canon), canon)
        spec = cls(TauMode.NUMERIC, x_num=_num_str(x), y_num=_num_str(y), certificate=certificate)
        with mp.workdps(30):
            if _to_mpf(spec.y_num) <= 0:
                raise ValueError("tau must lie in the upper half-plane")
        if certificate is not None:
            with mp.workdps(30):
                x_, s_ = spec.x(30), spec.s(30)
                for b, c, d in certificate.rows:
                    res = abs(c * s_ + 2 * d * x_ - b)
                    if res > mpmath.mpf(10) ** -8 * (1 + abs(b) + abs(c) + abs(d)):
                        raise ValueError(f"certificate row {(b, c, d)} does not hold for tau")
        return spec

    # numeric values ------------------------------------------------------
    def tau(self, digits: int = 40):
        with mp.workdps(digits + GUARD_DIGITS):
            if self.mode is TauMode.EXACT_QUADRATIC:
                return self.tau_exact.to_mp()
            if self.mode is TauMode.NUMERIC:
                return mpmath.mpc(_to_mpf(self.x_num), _to_mpf(self.y_num))
            b, c, d = self.triple
            pos = _to_mpf(self.position)
            if c == 0:
                return mpmath.mpc(mpmath.mpf(b) / (2 * d), pos)
            center = -mpmath.mpf(d) / c
            radius = mpmath.sqrt(mpmath.mpf(d * d + b * c)) / abs(c)
            return center + radius * mpmath.expj(pos)

    def x(self, digits: int = 40):
        return self.tau(digits).real

    def y(self, digits: int = 40):
        return self.tau(digits).imag

    def s(self, digits: int = 40):
        t = self.tau(digits)
        with mp.workdps(digits + GUARD_DIGITS):
            return t.real ** 2 + t.imag ** 2

    def _warn_if_special(self):
        with mp.workdps(40):
            x_, s_ = self.x(40), self.s(40)
            if recognize_rational(x_, 10 ** 6) is not None and recognize_rational(s_, 10 ** 6) is not None:
                warnings.warn(
                    "geodesic position looks like a CM point (x and x^2+y^2 rational at height <= 1e6); "
                    "treating it as generic as declared",
                    stacklevel=3,
                )

    # serialization -------------------------------------------------------
    def to_json(self) -> dict:
        if self.mode is TauMode.EXACT_QUADRATIC:
            t = self.tau_exact
            return {"mode": self.mode.value, "p": _frac_json(t.a), "q": _frac_json(t.b), "d": t.d}
        if self.mode is TauMode.GEODESIC:
            b, c, d = self.triple
            return {"mode": self.mode.value, "b": b, "c": c, "d": d,
                    "position": _pos_json(self.position), "generic": self.generic}
        out = {"mode": self.mode.value, "x": _pos_json(self.x_num), "y": _pos_json(self.y_num)}
        if self.certificate is not None:
            out["certificate"] = [list(r) for r in self.certificate.rows]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TauSpec":
        mode = data.get("mode")
        if mode == TauMode.EXACT_QUADRATIC.value:
            return cls.exact_quadratic(as_rat(data["p"]), as_rat(data["q"]), int(data["d"]))
        if mode == TauMode.GEODESIC.value:
            return cls.geodesic(data["b"], data["c"], data["d"], data["position"], data.get("generic", True))
        if mode == TauMode.NUMERIC.value:
            return cls.numeric(data["x"], data["y"], data.get("certificate"))
        raise ValueError(f"unknown TauSpec mode {mode!r}")


def _frac_json(q: Fraction):
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _pos_json(v: str):
    try:
        f = float(v)
    except ValueError:
        return v
    return f if repr(f) == v else v


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    """The lattice Z*omega1 + Z*omega2 with Im(omega2/omega1) > 0."""

    omega1: mpmath.mpc
    omega2: mpmath.mpc
    tau_spec: TauSpec | None = field(default=None, compare=False)

    def __post_init__(self):
        o1, o2 = as_mpc(self.omega1), as_mpc(self.omega2)
        object.__setattr__(self, "omega1", o1)
        object.__setattr__(self, "omega2", o2)
        if o1 == 0 or (o2 / o1).imag <= 0:
            raise ValueError("lattice basis must satisfy Im(omega2/omega1) > 0")

    @classmethod
    def from_tau(cls, tau, spec: TauSpec | None = None) -> "Lattice":
        return cls(mpmath.mpc(1), as_mpc(tau), spec)

    @classmethod
    def from_spec(cls, spec: TauSpec, digits: int = 40) -> "Lattice":
        return cls.from_tau(spec.tau(digits), spec)

    @property
    def tau(self):
        return self.omega2 / self.omega1

    def conj(self) -> "Lattice":
        """The lattice conj(L) on the basis (conj omega1, -conj omega2); exact at any precision."""
        (a, b), (c, d) = self.omega1._mpc_, self.omega2._mpc_
        return Lattice(mp.make_mpc((a, mpf_neg(b))), mp.make_mpc((mpf_neg(c), d)))

    def scaled(self, rho) -> "Lattice":
        rho = as_mpc(rho)
        return Lattice(rho * self.omega1, rho * self.omega2)

    def coords(self, z):
        """Real coordinates ``(a, b)`` with ``z = a*omega1 + b*omega2``."""
        z = as_mpc(z)
        o1, o2 = self.omega1, self.omega2
        det = o1.real * o2.imag - o1.imag * o2.real
        a = (z.real * o2.imag - z.imag * o2.real) / det
        b = (o1.real * z.imag - o1.imag * z.real) / det
        return a, b

    def point(self, m, n):
        return m * self.omega1 + n * self.omega2

    def reduced(self) -> tuple["Lattice", tuple[tuple[int, int], tuple[int, int]]]:
        """Same lattice on a basis whose ratio lies in the standard fundamental domain."""
        tau_r, ((a, b), (c, d)) = normalize_tau(self.tau)
        w1 = c * self.omega2 + d * self.omega1
        w2 = a * self.omega2 + b * self.omega1
        return Lattice(w1, w2), ((a, b), (c, d))

    def shortest_length(self):
        red, _ = self.reduced()
        return abs(red.omega1)

    def nearest_point(self, z):
        red, _ = self.reduced()
        a, b = red.coords(z)
        m0, n0 = int(mpmath.nint(a)), int(mpmath.nint(b))
        best = None
        for m in (m0 - 1, m0, m0 + 1):
            for n in (n0 - 1, n0, n0 + 1):
                w = red.point(m, n)
                dist = abs(z - w)
                if best is None or dist < best[0]:
                    best = (dist, w)
        return best[1]

    def distance(self, z):
        z = as_mpc(z)
        return abs(z - self.nearest_point(z))

    def contains(self, z, tol=None) -> bool:
        if tol is None:
            tol = mpmath.mpf(10) ** (-(mp.dps // 2)) * (1 + abs(self.omega1))
        return lattice_membership(z, self, tol)

    def index_in(self, other: "Lattice", tol=1e-20) -> int | None:
        """[other : self] when self is a sublattice of other, else None."""
        coords = []
        for w in (self.omega1, self.omega2):
            a, b = other.coords(w)
            ia, ib = int(mpmath.nint(a)), int(mpmath.nint(b))
            if abs(a - ia) > tol or abs(b - ib) > tol:
                return None
            coords.append((ia, ib))
        det = coords[0][0] * coords[1][1] - coords[0][1] * coords[1][0]
        return abs(det) if det else None


def normalize_tau(tau, max_steps: int = 10_000):
    """Move tau into the fundamental domain.

    Returns ``(tau_reduced, M)`` with ``M = ((a, b), (c, d))`` in SL2(Z) and
    ``tau_reduced = (a*tau + b) / (c*tau + d)``.
    """
    tau = as_mpc(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    a, b, c, d = 1, 0, 0, 1
    t = tau
    for _ in range(max_steps):
        n = int(mpmath.floor(t.real + mpmath.mpf(1) / 2))
        if n:
            t -= n
            a, b = a - n * c, b - n * d
        if abs(t) < 1:
            t = -1 / t
            a, b, c, d = -c, -d, a, b
            continue
        break
    else:  # pragma: no cover - only for absurd inputs
        raise RuntimeError("tau reduction did not terminate")
    return t, ((a, b), (c, d))


def mobius(m, tau):
    (a, b), (c, d) = m
    return (a * tau + b) / (c * tau + d)


def lattice_membership(z, lat: Lattice, tol) -> bool:
    """True iff the distance from z to the lattice is below ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return lat.distance(z) < tol


# ---------------------------------------------------------------------------
# Isog(L, conj L)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsogenySet:
    """Generators of Isog(L, conj L) for L = <1, tau>.

    Each basis triple ``(b, c, d)`` gives ``gamma = c*conj(tau) + d`` with
    ``gamma*tau = -d*conj(tau) + b`` and the trace-zero matrix ``((-d, b), (c, d))``.
    """

    rank: int
    basis: IntKernelBasis
    gammas: tuple
    matrices: tuple
    abs_sq: tuple[int, ...]
    exact_x: Fraction | None = None
    exact_s: Fraction | None = None
    tau: mpmath.mpc | None = None

    def residuals(self):
        """max distance of gamma*1 and gamma*tau from conj(L), per generator."""
        lat_bar = Lattice.from_tau(self.tau).conj()
        return [max(lat_bar.distance(g), lat_bar.distance(g * self.tau)) for g in self.gammas]


def _exact_xs(spec: TauSpec, basis: IntKernelBasis) -> tuple[Fraction, Fraction]:
    if spec.mode is TauMode.EXACT_QUADRATIC:
        t = spec.tau_exact
        return t.a, t.norm()
    (b1, c1, d1), (b2, c2, d2) = basis.rows
    # c_i*s + d_i*(2x) = b_i
    det = c1 * d2 - c2 * d1
    s = Fraction(b1 * d2 - b2 * d1, det)
    two_x = Fraction(c1 * b2 - c2 * b1, det)
    return two_x / 2, s


def isog_conj_set(spec: TauSpec, digits: int = 40) -> IsogenySet:
    if spec.mode is TauMode.EXACT_QUADRATIC:
        t = spec.tau_exact
        basis = integer_kernel([Fraction(-1), t.norm(), t.trace()])
    elif spec.mode is TauMode.GEODESIC:
        if not spec.generic:
            raise UndecidableFromFloats("geodesic position not declared generic")
        basis = IntKernelBasis(1, (spec.triple,))
    else:
        if spec.certificate is None:
            raise UndecidableFromFloats("numeric tau without a relation certificate")
        basis = spec.certificate
    rows = tuple(sorted(_gamma_sign(r) for r in basis.rows))
    basis = IntKernelBasis(len(rows), rows)
    tau = spec.tau(digits)
    with mp.workdps(digits + GUARD_DIGITS):
        gammas = tuple(c * mpmath.conj(tau) + d for b, c, d in rows)
    matrices = tuple(((-d, b), (c, d)) for b, c, d in rows)
    abs_sq = tuple(d * d + b * c for b, c, d in rows)
    ex = es = None
    if basis.rank == 2:
        ex, es = _exact_xs(spec, basis)
    return IsogenySet(basis.rank, basis, gammas, matrices, abs_sq, ex, es, tau)


@dataclass(frozen=True)
class CMInfo:
    cm: bool
    minpoly: tuple[int, int, int] | None = None
    disc: int | None = None


NOT_CM = CMInfo(False)


def is_cm(spec: TauSpec, digits: int = 40) -> CMInfo:
    iso = isog_conj_set(spec, digits)
    if iso.rank < 2:
        return NOT_CM
    x, s = iso.exact_x, iso.exact_s
    # tau^2 - 2x tau + s
    den = math.lcm((2 * x).denominator, s.denominator)
    A, B, C = den, int(-2 * x * den), int(s * den)
    g = math.gcd(math.gcd(A, B), C)
    A, B, C = A // g, B // g, C // g
    return CMInfo(True, (A, B, C), B * B - 4 * A * C)


class GeodesicKind(str, enum.Enum):
    VERTICAL = "vertical"
    CIRCLE = "circle"


class EndpointClass(str, enum.Enum):
    RATIONAL = "rational"
    CONJ_REAL_QUADRATIC = "conj_real_quadratic"


@dataclass(frozen=True)
class GeodesicData:
    """Geodesic ``c*(x^2+y^2) + 2*d*x - b = 0``; endpoints are exact (``INFINITY`` for the cusp)."""

    kind: GeodesicKind
    triple: tuple[int, int, int]
    endpoints: tuple
    endpoint_class: EndpointClass

    @classmethod
    def from_triple(cls, triple) -> "GeodesicData":
        b, c, d = _gamma_sign(primitive(triple))
        if c == 0:
            return cls(GeodesicKind.VERTICAL, (b, c, d), (Fraction(b, 2 * d), INFINITY), EndpointClass.RATIONAL)
        disc = d * d + b * c
        if disc <= 0:
            raise ValueError("triple does not describe a real geodesic")
        center = Fraction(-d, c)
        r = quad_sqrt(Fraction(disc, c * c))
        ends = (center - r, center + r)
        root = math.isqrt(disc)
        klass = EndpointClass.RATIONAL if root * root == disc else EndpointClass.CONJ_REAL_QUADRATIC
        return cls(GeodesicKind.CIRCLE, (b, c, d), ends, klass)

    @property
    def center(self) -> Fraction | None:
        b, c, d = self.triple
        return None if c == 0 else Fraction(-d, c)

    @property
    def radius_sq(self) -> Fraction | None:
        b, c, d = self.triple
        return None if c == 0 else Fraction(d * d + b * c, c * c)


def _vertical_triple(x: Fraction) -> tuple[int, int, int]:
    return _gamma_sign(primitive((2 * x.numerator, 0, x.denominator)))


def geodesic_through(spec: TauSpec, digits: int = 40) -> GeodesicData | None:
    iso = isog_conj_set(spec, digits)
    if iso.rank == 0:
        return None
    if iso.rank == 2:
        return GeodesicData.from_triple(_vertical_triple(iso.exact_x))
    return GeodesicData.from_triple(iso.basis.rows[0])


@dataclass(frozen=True)
class AbsWitness:
    gamma: mpmath.mpc
    abs: Fraction
    triple: tuple[int, int, int]


def rational_abs_witness(iso: IsogenySet) -> AbsWitness | None:
    """A nonzero element of Isog(L, conj L) with rational absolute value, if one exists."""
    if iso.rank == 0:
        return None
    if iso.rank == 2:
        b, c, d = _vertical_triple(iso.exact_x)
        return AbsWitness(as_mpc(d), Fraction(d), (b, c, d))
    (b, c, d), = iso.basis.rows
    n = d * d + b * c
    root = math.isqrt(n)
    if root * root != n:
        return None
    return AbsWitness(iso.gammas[0], Fraction(root), (b, c, d))
