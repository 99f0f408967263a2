"""Weierstrass invariants and the functions wp, wp' at arbitrary precision.

g2 and g3 come from the q-expansions of E4 and E6 after reducing the period
ratio into the fundamental domain.  wp is evaluated from its Laurent series on
a small disc around the origin and carried out to the rest of the period cell
with the duplication law of the curve ``Y^2 = X^3 - g2/4 X - g3/4``
(``X = wp``, ``Y = wp'/2``).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from mpmath import mp
from mpmath.libmp import from_man_exp, to_fixed

from .lattice import GUARD_DIGITS, Lattice, TauSpec, as_mpc

SERIES_RADIUS = 0.25  # Laurent disc radius, in units of the shortest period


class PrecisionCapExceeded(RuntimeError):
    pass


class _Pole:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "POLE"

    def __bool__(self):
        return False


POLE = _Pole()


@dataclass(frozen=True)
class PrecisionCfg:
    """Working precision and evaluation limits.

    ``pole_radius`` is absolute; ``None`` means 0.05 times the shortest period.
    """

    digits: int = 40
    series_terms_cap: int = 400
    pole_radius: float | None = None

    def __post_init__(self):
        if self.digits < 15:
            raise ValueError("digits must be >= 15")
        if self.series_terms_cap < 8:
            raise ValueError("series_terms_cap too small")
        if self.pole_radius is not None and self.pole_radius <= 0:
            raise ValueError("pole_radius must be positive")


DEFAULT_CFG = PrecisionCfg()


@dataclass(frozen=True)
class LatticeInvariants:
    g2: mpmath.mpc
    g3: mpmath.mpc
    disc: mpmath.mpc
    j: mpmath.mpc
    roots: tuple


def eisenstein_g2_g3(tau, tol):
    """g2, g3 of the lattice <1, tau> from the Eisenstein q-series."""
    q = mpmath.exp(2j * mp.pi * tau)
    s4 = s6 = mpmath.mpc(0)
    qn = q
    n = 1
    while True:
        lam = qn / (1 - qn)
        t4 = n ** 3 * lam
        t6 = n ** 5 * lam
        s4 += t4
        s6 += t6
        if abs(t6) < tol:
            break
        n += 1
        qn *= q
    e4 = 1 + 240 * s4
    e6 = 1 - 504 * s6
    return 4 * mp.pi ** 4 / 3 * e4, 8 * mp.pi ** 6 / 27 * e6


def laurent_coefficients(g2, g3, radius, tol, cap):
    """Coefficients c[n] of wp(z) = z^-2 + sum_{n>=2} c[n] z^(2n-2), truncated at ``tol`` on |z| <= radius."""
    c = [mpmath.mpc(0), mpmath.mpc(0), g2 / 20, g3 / 28]
    r2 = radius * radius
    n = 3
    quiet = 0
    while True:
        n += 1
        if n > cap:
            raise PrecisionCapExceeded(f"Laurent series needs more than {cap} terms")
        acc = mpmath.mpc(0)
        for m in range(2, n - 1):
            acc += c[m] * c[n - m]
        c.append(3 * acc / ((2 * n + 1) * (n - 3)))
        bound = abs(c[n]) * r2 ** (n - 1) * (2 * n)
        quiet = quiet + 1 if bound < tol else 0
        # g2 = 0 or g3 = 0 zeroes whole residue classes of n, so one or two
        # vanishing terms say nothing; ask for a longer quiet run
        if quiet >= 4:
            return c


class WeierstrassP:
    """wp and wp' for one lattice at one precision; build through :func:`weierstrass_for`."""

    def __init__(self, lattice: Lattice, cfg: PrecisionCfg = DEFAULT_CFG):
        self.lattice = lattice
        self.cfg = cfg
        self.dps = cfg.digits + GUARD_DIGITS
        with mp.workdps(self.dps):
            tol = mpmath.mpf(10) ** (-self.dps)
            red, _ = lattice.reduced()
            self.reduced = red
            w1 = red.omega1
            g2n, g3n = eisenstein_g2_g3(red.omega2 / w1, tol)
            self.g2 = g2n / w1 ** 4
            self.g3 = g3n / w1 ** 6
            self.shortest = abs(w1)
            self.radius = SERIES_RADIUS * self.shortest
            self.coeffs = laurent_coefficients(self.g2, self.g3, self.radius, tol, cfg.series_terms_cap)
            pr = cfg.pole_radius if cfg.pole_radius is not None else 0.05 * self.shortest
            self.pole_radius = mpmath.mpf(pr)
            if self.pole_radius >= self.shortest / 2:
                raise ValueError("pole_radius must be below half the shortest period")
        self._coeffs_c128 = None
        self._fixed = None

    # reduction -----------------------------------------------------------
    def reduce(self, z):
        """Representative of z mod the lattice closest to the origin (ties toward the origin)."""
        red = self.reduced
        a, b = red.coords(z)
        m0, n0 = _round_to_zero(a), _round_to_zero(b)
        best = None
        for m in (m0, m0 - 1, m0 + 1):
            for n in (n0, n0 - 1, n0 + 1):
                w = z - red.point(m, n)
                if best is None or abs(w) < abs(best):
                    best = w
        return best

    def _fixed_tables(self):
        """Scaled coefficients B[n] = c[n] r^(2n) as fixed-point integer pairs, and (2n-2) B[n]."""
        bits = mp.prec + 24
        r2 = self.radius ** 2
        vals, ders = [], []
        scale = r2
        for n in range(2, len(self.coeffs)):
            scale *= r2
            b = self.coeffs[n] * scale
            vals.append((to_fixed(b.real._mpf_, bits), to_fixed(b.imag._mpf_, bits)))
            ders.append(((2 * n - 2) * vals[-1][0], (2 * n - 2) * vals[-1][1]))
        vals.reverse()
        ders.reverse()
        return bits, vals, ders

    def _series(self, z):
        """Laurent sums at |z| <= radius in fixed-point integer arithmetic."""
        if self._fixed is None:
            self._fixed = self._fixed_tables()
        bits, vals, ders = self._fixed
        u = z / self.radius
        ur, ui = to_fixed(u.real._mpf_, bits), to_fixed(u.imag._mpf_, bits)
        sr, si = (ur * ur - ui * ui) >> bits, (2 * ur * ui) >> bits
        vr = vi = dr = di = 0
        for (ar, ai), (br, bi) in zip(vals, ders):
            vr, vi = ((vr * sr - vi * si) >> bits) + ar, ((vr * si + vi * sr) >> bits) + ai
            dr, di = ((dr * sr - di * si) >> bits) + br, ((dr * si + di * sr) >> bits) + bi
        # wp = r^-2 (u^-2 + u^2 V), wp' = r^-3 (-2 u^-3 + u D)
        vr, vi = (vr * sr - vi * si) >> bits, (vr * si + vi * sr) >> bits
        dr, di = (dr * ur - di * ui) >> bits, (dr * ui + di * ur) >> bits
        V = mpmath.mpc(mpmath.mpf(from_man_exp(vr, -bits)), mpmath.mpf(from_man_exp(vi, -bits)))
        D = mpmath.mpc(mpmath.mpf(from_man_exp(dr, -bits)), mpmath.mpf(from_man_exp(di, -bits)))
        r = self.radius
        wp = (1 / (u * u) + V) / (r * r)
        wpp = (D - 2 / (u * u * u)) / (r * r * r)
        return wp, wpp

    def _series_mp(self, z):
        """Reference evaluation of the Laurent sums in mpmath arithmetic."""
        z2 = z * z
        c = self.coeffs
        # Horner in z^2 for sum_{n>=2} c[n] (z^2)^(n-2) and its derivative
        val = mpmath.mpc(0)
        der = mpmath.mpc(0)
        for n in range(len(c) - 1, 1, -1):
            der = der * z2 + (2 * n - 2) * c[n]
            val = val * z2 + c[n]
        wp = 1 / z2 + val * z2
        wpp = -2 / (z2 * z) + der * z
        return wp, wpp

    def pair(self, z):
        """(wp(z), wp'(z)), or POLE within the pole radius of the lattice."""
        with mp.workdps(self.dps):
            w = self.reduce(as_mpc(z))
            if abs(w) < self.pole_radius:
                return POLE
            k = 0
            while abs(w) > self.radius:
                w /= 2
                k += 1
            x, d = self._series(w)
            y = d / 2
            q = self.g2 / 4
            for _ in range(k):
                m = (3 * x * x - q) / (2 * y)
                x3 = m * m - 2 * x
                y = m * (x - x3) - y
                x = x3
            return +x, 2 * y

    def value(self, z):
        p = self.pair(z)
        return p if p is POLE else p[0]

    def derivative(self, z):
        p = self.pair(z)
        return p if p is POLE else p[1]

    def invariants(self) -> LatticeInvariants:
        with mp.workdps(self.dps):
            g2, g3 = self.g2, self.g3
            disc = g2 ** 3 - 27 * g3 ** 2
            if disc == 0:
                raise ZeroDivisionError("singular cubic")
            j = 1728 * g2 ** 3 / disc
            roots = mpmath.polyroots([4, 0, -g2, -g3], maxsteps=200, extraprec=2 * self.dps)
            roots = tuple(sorted((as_mpc(r) for r in roots), key=lambda r: (-r.real, -r.imag)))
            return LatticeInvariants(g2, g3, disc, j, roots)

    # double precision batch path --------------------------------------
    def batch(self, zs: np.ndarray):
        """Vectorised double precision (wp, wp', pole mask) through the compiled kernel."""
        from . import kernels

        if self._coeffs_c128 is None:
            # terms below double precision on the series disc only cost time
            r2 = float(self.radius) ** 2
            keep = len(self.coeffs)
            while keep > 4 and abs(complex(self.coeffs[keep - 1])) * r2 ** (keep - 2) < 1e-20:
                keep -= 1
            self._coeffs_c128 = np.array([complex(c) for c in self.coeffs[:keep]], dtype=np.complex128)
        red = self.reduced
        return kernels.wp_batch(
            np.ascontiguousarray(zs, dtype=np.complex128),
            complex(red.omega1), complex(red.omega2),
            complex(self.g2), self._coeffs_c128,
            float(self.radius), float(self.pole_radius),
        )


def _round_to_zero(v) -> int:
    """Nearest integer, halves rounded toward zero."""
    r = mpmath.nint(v)
    if abs(v - r) == mpmath.mpf(1) / 2 and abs(r) > abs(v):
        r -= mpmath.sign(r)
    return int(r)


@lru_cache(maxsize=128)
def weierstrass_for(lattice: Lattice, cfg: PrecisionCfg = DEFAULT_CFG) -> WeierstrassP:
    return WeierstrassP(lattice, cfg)


def as_lattice(obj, digits: int = 40) -> Lattice:
    if isinstance(obj, Lattice):
        return obj
    if isinstance(obj, TauSpec):
        return Lattice.from_spec(obj, digits)
    with mp.workdps(digits + GUARD_DIGITS):
        return Lattice.from_tau(as_mpc(obj))


def _engine(lat, cfg) -> WeierstrassP:
    cfg = cfg or DEFAULT_CFG
    return weierstrass_for(as_lattice(lat, cfg.digits), cfg)


def invariants(lat, cfg: PrecisionCfg | None = None) -> LatticeInvariants:
    return _engine(lat, cfg).invariants()


def wp(z, lat, cfg: PrecisionCfg | None = None):
    return _engine(lat, cfg).value(z)


def wp_prime(z, lat, cfg: PrecisionCfg | None = None):
    return _engine(lat, cfg).derivative(z)


def wp_pair(z, lat, cfg: PrecisionCfg | None = None):
    return _engine(lat, cfg).pair(z)


def p_map(x, y, lat, cfg: PrecisionCfg | None = None):
    """The real map (x, y) -> (Re wp(x+iy), Im wp(x+iy)); POLE near lattice points."""
    eng = _engine(lat, cfg)
    with mp.workdps(eng.dps):
        v = eng.value(mpmath.mpc(x, y))
    if v is POLE:
        return POLE
    return v.real, v.imag


def homogeneity_check(z, rho, lat, cfg: PrecisionCfg | None = None):
    """Relative residual of wp_L(z/rho) = rho^2 wp_{rho L}(z)."""
    cfg = cfg or DEFAULT_CFG
    lat = as_lattice(lat, cfg.digits)
    eng = weierstrass_for(lat, cfg)
    with mp.workdps(eng.dps):
        rho = as_mpc(rho)
        z = as_mpc(z)
        left = eng.value(z / rho)
        right = weierstrass_for(lat.scaled(rho), cfg).value(z)
        if left is POLE or right is POLE:
            return POLE
        right = rho ** 2 * right
        return abs(left - right) / (1 + abs(left))
