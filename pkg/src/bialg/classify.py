"""Weakly bialgebraic curves of the real Weierstrass map, and complex bialgebraic lines.

Depending on Isog(L, conj L) the non-singleton bialgebraic sets are

* nothing (rank 0, or rank 1 with an irrational ``|gamma|``),
* translates of the two lines ``sqrt(gamma)*z in R`` and ``sqrt(gamma)*z in iR``
  (rank 1, ``|gamma|`` rational),
* translates of every line through the origin meeting the lattice again (CM).
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction

import mpmath
from mpmath import mp

from .exactnum import convergents, _exact_fraction
from .lattice import (
    GUARD_DIGITS,
    AbsWitness,
    GeodesicData,
    IsogenySet,
    Lattice,
    TauSpec,
    as_mpc,
    geodesic_through,
    is_cm,
    isog_conj_set,
    rational_abs_witness,
)


class NotLatticePoint(ValueError):
    pass


class NotComplexLine(ValueError):
    pass


class NotSublattice(ValueError):
    pass


@dataclass(frozen=True)
class RealLine:
    """The line ``offset + rho^-1 * R`` in R^2 = C.

    ``lattice_direction`` records an exact direction ``m + n*tau`` when known.
    """

    rho: mpmath.mpc
    offset: tuple = (0, 0)
    lattice_direction: tuple[int, int] | None = None

    def __post_init__(self):
        rho = as_mpc(self.rho)
        if rho == 0:
            raise ValueError("rho must be nonzero")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "offset", (mpmath.mpf(self.offset[0]), mpmath.mpf(self.offset[1])))

    @property
    def r(self):
        return self.rho / mpmath.conj(self.rho)

    @property
    def direction(self):
        d = 1 / self.rho
        return d / abs(d)

    @property
    def angle(self):
        """Direction angle in [0, pi)."""
        a = mpmath.arg(self.direction)
        return a % mp.pi

    @property
    def offset_complex(self):
        return mpmath.mpc(*self.offset)

    def point(self, t):
        return self.offset_complex + t * self.direction

    def translate(self, c1, c2) -> "RealLine":
        return replace(self, offset=(self.offset[0] + c1, self.offset[1] + c2))

    def through_origin(self) -> "RealLine":
        return replace(self, offset=(0, 0))

    def satisfies_slope_relation(self, tol=None) -> bool:
        """Every (x, y) on the line through the origin has x - iy = r(x + iy)."""
        tol = tol if tol is not None else mpmath.mpf(10) ** (-mp.dps // 2)
        z = self.direction
        return abs(mpmath.conj(z) - self.r * z) < tol

    def to_json(self, digits: int = 20) -> dict:
        d = self.direction
        out = {
            "direction": [mpmath.nstr(d.real, digits), mpmath.nstr(d.imag, digits)],
            "offset": [mpmath.nstr(self.offset[0], digits), mpmath.nstr(self.offset[1], digits)],
        }
        if self.lattice_direction is not None:
            out["lattice_direction"] = list(self.lattice_direction)
        return out


def line_from_rho(rho, offset=(0, 0)) -> RealLine:
    return RealLine(as_mpc(rho), offset)


def line_with_direction(direction, offset=(0, 0)) -> RealLine:
    with mp.workdps(max(mp.dps, 40 + GUARD_DIGITS)):
        return RealLine(1 / as_mpc(direction), offset)


def rho_from_lattice_direction(m: int, n: int, spec, digits: int = 40) -> RealLine:
    """The line R*(m + n*tau)."""
    if m == 0 and n == 0:
        raise ValueError("zero direction")
    tau = spec.tau(digits) if isinstance(spec, TauSpec) else (spec.tau if isinstance(spec, Lattice) else as_mpc(spec))
    with mp.workdps(digits + GUARD_DIGITS):
        return RealLine(1 / (m + n * tau), (0, 0), (int(m), int(n)))


# ---------------------------------------------------------------------------
# complex side
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexLine:
    """``W + sigma`` with ``W = <w1, w2>_R`` a complex line in C^2, ``w_i`` in L x conj(L)."""

    w1: tuple
    w2: tuple
    sigma: tuple
    r: mpmath.mpc | None
    t: mpmath.mpc
    lattice: Lattice

    def point(self, zeta):
        """sigma + zeta * w1 for complex zeta (W is C*w1)."""
        return (self.sigma[0] + zeta * self.w1[0], self.sigma[1] + zeta * self.w1[1])


def complex_bialgebraic_line(w1, w2, sigma, lattice: Lattice, tol=None) -> ComplexLine:
    w1 = tuple(as_mpc(v) for v in w1)
    w2 = tuple(as_mpc(v) for v in w2)
    sigma = tuple(as_mpc(v) for v in sigma)
    if tol is None:
        tol = mpmath.mpf(10) ** (-(mp.dps // 2))
    bar = lattice.conj()
    for w, lat, name in ((w1[0], lattice, "w11"), (w2[0], lattice, "w21"), (w1[1], bar, "w12"), (w2[1], bar, "w22")):
        if lat.distance(w) >= tol:
            raise NotLatticePoint(f"{name} = {mpmath.nstr(w, 10)} is not a lattice point")
    if abs(w2[0]) > tol:
        t = w1[0] / w2[0]
    elif abs(w2[1]) > tol:
        t = w1[1] / w2[1]
    else:
        raise NotComplexLine("w2 is zero")
    if abs(w1[0] - t * w2[0]) > tol or abs(w1[1] - t * w2[1]) > tol:
        raise NotComplexLine("w1 is not a complex multiple of w2")
    if abs(t.imag) <= tol:
        raise NotComplexLine("w1, w2 are R-linearly dependent (t is real)")
    r = w1[1] / w1[0] if abs(w1[0]) > tol else None
    return ComplexLine(w1, w2, sigma, r, t, lattice)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

class Branch(str, enum.Enum):
    ONLY_SINGLETONS = "ONLY_SINGLETONS"
    TWO_LINE_FAMILY = "TWO_LINE_FAMILY"
    CM_FAMILY = "CM_FAMILY"


class SingletonReason(str, enum.Enum):
    NOT_ISOGENOUS = "NOT_ISOGENOUS"
    ABS_GAMMA_IRRATIONAL = "ABS_GAMMA_IRRATIONAL"


CM_DIRECTION_RULE = "m + n*tau, (m, n) in Z^2 primitive"


@dataclass(frozen=True)
class Classification:
    branch: Branch
    spec: TauSpec
    isogeny: IsogenySet
    geodesic: GeodesicData | None
    witness: AbsWitness | None
    reason: SingletonReason | None = None
    gamma: mpmath.mpc | None = None
    sqrt_gamma: mpmath.mpc | None = None
    L1: RealLine | None = None
    L2: RealLine | None = None
    minpoly: tuple[int, int, int] | None = None
    direction_rule: str | None = None
    translate_closure: bool = True
    digits: int = 40

    @property
    def isogenous_to_self_conjugate(self) -> bool:
        """Non-singleton bialgebraic sets exist iff L is isogenous to a self-conjugate lattice."""
        return self.branch is not Branch.ONLY_SINGLETONS

    @property
    def tau(self):
        return self.isogeny.tau

    def contains_line(self, line: RealLine, tol: float = 1e-10, height: int = 1000) -> bool:
        """Whether a translate of ``line`` is one of the bialgebraic lines (offset is ignored)."""
        if self.branch is Branch.ONLY_SINGLETONS:
            return False
        if self.branch is Branch.TWO_LINE_FAMILY:
            ang = line.angle
            for ref in (self.L1.angle, self.L2.angle):
                diff = abs(ang - ref)
                if min(diff, mp.pi - diff) < tol:
                    return True
            return False
        if line.lattice_direction is not None:
            return True
        return _meets_lattice(line.direction, self.tau, tol, height)

    def to_json(self, digits: int = 20) -> dict:
        out = {
            "branch": self.branch.value,
            "tau_spec": self.spec.to_json(),
            "isog_rank": self.isogeny.rank,
            "isog_basis": [list(r) for r in self.isogeny.basis.rows],
            "isogenous_to_self_conjugate": self.isogenous_to_self_conjugate,
            "translate_closure": self.translate_closure,
        }
        if self.reason is not None:
            out["reason"] = self.reason.value
        if self.gamma is not None:
            out["gamma"] = _cjson(self.gamma, digits)
            out["sqrt_gamma"] = _cjson(self.sqrt_gamma, digits)
            out["lines"] = [self.L1.to_json(digits), self.L2.to_json(digits)]
        if self.witness is not None:
            out["rational_abs_witness"] = {"gamma": _cjson(self.witness.gamma, digits), "abs": str(self.witness.abs)}
        if self.minpoly is not None:
            out["minpoly"] = list(self.minpoly)
            out["direction_rule"] = self.direction_rule
        out["geodesic"] = geodesic_json(self.geodesic)
        return out


def _cjson(z, digits):
    z = as_mpc(z)
    return [mpmath.nstr(z.real, digits, min_fixed=-3, max_fixed=3), mpmath.nstr(z.imag, digits, min_fixed=-3, max_fixed=3)]


def _exact_json(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, str):
        return v
    return {"a": str(v.a), "b": str(v.b), "sqrt": v.d}


def geodesic_json(g: GeodesicData | None):
    if g is None:
        return None
    return {
        "kind": g.kind.value,
        "triple": list(g.triple),
        "endpoints": [_exact_json(e) for e in g.endpoints],
        "endpoint_class": g.endpoint_class.value,
    }


def _meets_lattice(direction, tau, tol, height) -> bool:
    """Whether R*direction contains a nonzero point m + n*tau (numerically, ratio tolerance ``tol``)."""
    lat = Lattice.from_tau(tau)
    a, b = lat.coords(direction)
    if abs(b) < tol * abs(a):
        return True
    ratio = a / b
    fx = _exact_fraction(ratio)
    for c in convergents(fx):
        if c.denominator > height:
            return False
        if abs(ratio - mpmath.mpf(c.numerator) / c.denominator) < tol:
            return True
    return False


def classify(spec: TauSpec, digits: int = 40) -> Classification:
    iso = isog_conj_set(spec, digits)
    geo = geodesic_through(spec, digits)
    if iso.rank == 0:
        return Classification(Branch.ONLY_SINGLETONS, spec, iso, geo, None, SingletonReason.NOT_ISOGENOUS, digits=digits)
    wit = rational_abs_witness(iso)
    if iso.rank == 2:
        info = is_cm(spec, digits)
        return Classification(Branch.CM_FAMILY, spec, iso, geo, wit, minpoly=info.minpoly,
                              direction_rule=CM_DIRECTION_RULE, digits=digits)
    if wit is None:
        return Classification(Branch.ONLY_SINGLETONS, spec, iso, geo, None, SingletonReason.ABS_GAMMA_IRRATIONAL,
                              gamma=None, digits=digits)
    with mp.workdps(digits + GUARD_DIGITS):
        gamma = iso.gammas[0]
        root = mpmath.sqrt(gamma)
        L1 = line_from_rho(root)
        L2 = line_from_rho(-1j * root)
    return Classification(Branch.TWO_LINE_FAMILY, spec, iso, geo, wit, gamma=gamma, sqrt_gamma=root,
                          L1=L1, L2=L2, digits=digits)


def primitive_directions(height_bound: int) -> list[tuple[int, int]]:
    """Primitive (m, n), one per sign class, max(|m|, |n|) <= height_bound, ordered by height."""
    out = []
    for m in range(0, height_bound + 1):
        for n in range(-height_bound, height_bound + 1):
            if m == 0 and n <= 0:
                continue
            if math.gcd(m, n) != 1:
                continue
            out.append((m, n))
    out.sort(key=lambda mn: (max(abs(mn[0]), abs(mn[1])), -mn[0], -mn[1]))
    return out


def bialgebraic_lines(spec: TauSpec, height_bound: int = 5, digits: int = 40,
                      classification: Classification | None = None) -> list[RealLine]:
    cls = classification or classify(spec, digits)
    if cls.branch is Branch.ONLY_SINGLETONS:
        warnings.warn("only singletons are bialgebraic for this lattice", stacklevel=2)
        return []
    if cls.branch is Branch.TWO_LINE_FAMILY:
        return [cls.L1, cls.L2]
    return [rho_from_lattice_direction(m, n, spec, digits) for m, n in primitive_directions(height_bound)]


def rescaled_lattice(cls: Classification) -> Lattice:
    """sqrt(gamma) * L, which carries L1, L2 onto the coordinate axes."""
    if cls.branch is not Branch.TWO_LINE_FAMILY:
        raise ValueError("only defined for the two-line family")
    with mp.workdps(cls.digits + GUARD_DIGITS):
        return Lattice.from_tau(cls.tau).scaled(cls.sqrt_gamma)


def pushforward_line(line: RealLine, sub: Lattice, sup: Lattice) -> tuple[RealLine, int]:
    """A bialgebraic line for a sublattice is bialgebraic for the superlattice; returns (line, index)."""
    idx = sub.index_in(sup)
    if idx is None:
        raise NotSublattice("first lattice is not a finite-index sublattice of the second")
    return line, idx
