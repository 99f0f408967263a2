"""Numerical confrontation of the classification with sampled images of lines."""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mp

from . import kernels
from .classify import ComplexLine, RealLine, classify
from .fitting import FitResult, Tolerances, Verdict, fit_vanishing_poly
from .lattice import Lattice, TauSpec, as_mpc
from .weierstrass import POLE, DEFAULT_CFG, PrecisionCfg, as_lattice, weierstrass_for

CLIP = 1e12
FAST_DIGITS = 16


def f_map(v, w):
    return (v + 1j * w, v - 1j * w)


def g_map(a, b):
    return ((a + b) / 2, (a - b) / 2j)


@dataclass
class SampleSet:
    params: np.ndarray
    points: np.ndarray
    images: np.ndarray
    dropped: int

    def to_csv_rows(self):
        yield ("t", "x", "y", "X", "Y")
        for t, p, im in zip(self.params, self.points, self.images):
            yield (repr(float(t)), repr(float(p[0])), repr(float(p[1])), repr(float(im[0])), repr(float(im[1])))


def _span(lat: Lattice) -> float:
    red, _ = lat.reduced()
    return 4.0 * float(abs(red.omega1) + abs(red.omega2))


def _evaluate(eng, zs_mp):
    """wp at mp points; returns complex128 values and a keep-mask."""
    if eng.cfg.digits <= FAST_DIGITS:
        zs = np.array([complex(z) for z in zs_mp], dtype=np.complex128)
        vals, _, pole = eng.batch(zs)
        keep = ~pole & (np.abs(vals) < CLIP)
        return vals, keep
    vals = np.empty(len(zs_mp), dtype=np.complex128)
    keep = np.ones(len(zs_mp), dtype=bool)
    for k, z in enumerate(zs_mp):
        v = eng.value(z)
        if v is POLE:
            keep[k] = False
            vals[k] = np.nan
            continue
        c = complex(v)
        if not abs(c) < CLIP:
            keep[k] = False
        vals[k] = c
    return vals, keep


def sample_line(line: RealLine, n: int, spec, cfg: PrecisionCfg | None = None, seed: int = 0,
                span: float | None = None) -> SampleSet:
    """Images of ``n`` random points of ``line`` under the real map, poles and huge values dropped."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = cfg or DEFAULT_CFG
    lat = as_lattice(spec, cfg.digits)
    eng = weierstrass_for(lat, cfg)
    rng = np.random.default_rng(seed)
    T = span if span is not None else _span(lat)
    dropped = 0
    params, images = [], []
    with mp.workdps(eng.dps):
        off, u = line.offset_complex, line.direction
        for attempt in range(2):
            center = rng.uniform(-T, T)
            t = np.sort(center + rng.uniform(-T / 2, T / 2, n))
            zs = [off + mpmath.mpf(float(ti)) * u for ti in t]
            vals, keep = _evaluate(eng, zs)
            params.append(t[keep])
            images.append(vals[keep])
            lost = int((~keep).sum())
            dropped += lost
            if attempt == 0 and lost <= n // 2:
                break
    t = np.concatenate(params)
    vals = np.concatenate(images)
    if len(t) == 0:
        raise ValueError("every sample fell in a pole neighbourhood")
    if len(params) > 1:  # re-jittered: keep n in total
        t, vals = t[:n], vals[:n]
    dcomplex = complex(line.direction)
    ocomplex = complex(line.offset_complex)
    pts = ocomplex + t * dcomplex
    return SampleSet(t, np.column_stack([pts.real, pts.imag]), np.column_stack([vals.real, vals.imag]), dropped)


@dataclass
class LineReport:
    predicted: bool
    fit: FitResult
    agree: bool | None
    seed: int
    n: int

    def to_json(self) -> dict:
        out = {"predicted": self.predicted, "agree": self.agree, "seed": self.seed, "samples": self.n}
        out.update(self.fit.to_json())
        return out


def verify_line(spec: TauSpec, line: RealLine, cfg: PrecisionCfg | None = None, n: int = 512, max_deg: int = 8,
                tol: Tolerances = Tolerances(), seed: int = 0, classification=None,
                emit_points: list | None = None) -> LineReport:
    cfg = cfg or DEFAULT_CFG
    cls = classification or classify(spec, cfg.digits)
    predicted = bool(cls.contains_line(line))
    samples = sample_line(line, n, spec, cfg, seed)
    if emit_points is not None:
        emit_points.append(samples)
    fit = fit_vanishing_poly(samples.images, max_deg=max_deg, tol=tol, seed=seed)
    agree = None if fit.verdict is Verdict.INCONCLUSIVE else (predicted == (fit.verdict is Verdict.VANISHING))
    return LineReport(predicted, fit, agree, seed, n)


def sample_complex_pairs(direction, sigma, lattice: Lattice, n: int, cfg: PrecisionCfg | None = None,
                         seed: int = 0) -> np.ndarray:
    """Pairs (wp_L(p1), wp_{conj L}(p2)) at points (p1, p2) = sigma + zeta*direction, zeta random complex.

    ``direction`` need not come from lattice points, so negative controls can use arbitrary slopes.
    """
    cfg = cfg or DEFAULT_CFG
    eng1 = weierstrass_for(lattice, cfg)
    eng2 = weierstrass_for(lattice.conj(), cfg)
    rng = np.random.default_rng(seed)
    out = []
    with mp.workdps(eng1.dps):
        v1, v2 = as_mpc(direction[0]), as_mpc(direction[1])
        s1, s2 = as_mpc(sigma[0]), as_mpc(sigma[1])
        scale = _span(lattice) / 4 / float(max(abs(v1), abs(v2)))
        for _ in range(2 * n):
            if len(out) == n:
                break
            a, b = rng.uniform(-scale, scale, 2)
            zeta = mpmath.mpc(float(a), float(b))
            u, v = eng1.value(s1 + zeta * v1), eng2.value(s2 + zeta * v2)
            if u is POLE or v is POLE:
                continue
            u, v = complex(u), complex(v)
            if abs(u) > CLIP or abs(v) > CLIP:
                continue
            out.append((u, v))
    if not out:
        raise ValueError("every sample fell in a pole neighbourhood")
    return np.array(out, dtype=np.complex128)


def sample_complex_line(cl: ComplexLine, n: int, cfg: PrecisionCfg | None = None, seed: int = 0) -> np.ndarray:
    return sample_complex_pairs(cl.w1, cl.sigma, cl.lattice, n, cfg, seed)


def verify_complex_line(cl: ComplexLine, cfg: PrecisionCfg | None = None, n: int = 256, max_deg: int = 4,
                        tol: Tolerances = Tolerances(), seed: int = 0) -> FitResult:
    """Fit P(u, v) = 0 on (u, v) = (wp_L(p1), wp_{conj L}(p2)) along W + sigma."""
    pts = sample_complex_line(cl, n, cfg, seed)
    return fit_vanishing_poly(pts, max_deg=max_deg, tol=tol, seed=seed)


# ---------------------------------------------------------------------------
# torus coverage
# ---------------------------------------------------------------------------

@dataclass
class DensityReport:
    torus_coverage: float
    coverage_doubled: float
    closed_orbit: bool
    fit: FitResult | None

    def to_json(self) -> dict:
        out = {"coverage": round(self.torus_coverage, 6), "coverage_doubled": round(self.coverage_doubled, 6),
               "closed_orbit": self.closed_orbit}
        if self.fit is not None:
            out.update(self.fit.to_json())
        return out


def _coverage(lat: Lattice, line: RealLine, k: int, n: int) -> float:
    if n == 0:
        return 0.0
    a0, b0 = (float(v) for v in lat.coords(line.offset_complex))
    da, db = (float(v) for v in lat.coords(line.direction))
    step = 1.0 / (2 * k * max(abs(da), abs(db)))
    t = np.arange(n, dtype=np.float64) * step
    return kernels.torus_cells(a0 + t * da, b0 + t * db, k) / (k * k)


def density_probe(spec, line: RealLine, k: int = 16, n: int = 8192, cfg: PrecisionCfg | None = None,
                  fit: bool = False, fit_samples: int = 512, max_deg: int = 8, seed: int = 0) -> DensityReport:
    """Fraction of k x k cells of C/L met by the line; a closed orbit stops gaining cells."""
    if k < 8:
        raise ValueError("k must be >= 8")
    cfg = cfg or DEFAULT_CFG
    lat = as_lattice(spec, cfg.digits)
    cov = _coverage(lat, line, k, n)
    cov2 = _coverage(lat, line, k, 2 * n)
    bound = min(12.0 / k, 0.5)
    closed = n > 0 and (cov2 - cov) * k * k <= 2 and cov2 <= bound
    fr = None
    if fit:
        samples = sample_line(line, fit_samples, spec, cfg, seed)
        fr = fit_vanishing_poly(samples.images, max_deg=max_deg, seed=seed)
    return DensityReport(cov, cov2, closed, fr)


# ---------------------------------------------------------------------------
# self-conjugate rectangular lattices
# ---------------------------------------------------------------------------

@dataclass
class HalflineReport:
    min_X: mpmath.mpf
    half_period_value: mpmath.mpf
    root_index: int
    matches_e_root: bool
    all_above: bool
    imag_max: float
    interval: tuple
    interval_roots: tuple
    interval_ok: bool

    def to_json(self) -> dict:
        return {
            "min_X": mpmath.nstr(self.min_X, 20),
            "wp_half_period": mpmath.nstr(self.half_period_value, 20),
            "root_index": self.root_index,
            "matches_e_root": self.matches_e_root,
            "all_above": self.all_above,
            "offset_interval": [mpmath.nstr(v, 20) for v in self.interval],
            "offset_interval_ok": self.interval_ok,
        }


def halfline_check(spec, cfg: PrecisionCfg | None = None, n: int = 512, tol: float = 1e-6) -> HalflineReport:
    """Image of the real axis is the half-line [e, oo) with e = wp(omega1/2); the line R + tau/2 maps into [e3, e2]."""
    cfg = cfg or DEFAULT_CFG
    lat = as_lattice(spec, cfg.digits)
    tau = lat.tau
    if abs(tau.real) > mpmath.mpf(10) ** (-cfg.digits + 5):
        raise ValueError("halfline_check needs a rectangular lattice tau = iy")
    eng = weierstrass_for(lat, cfg)
    inv = eng.invariants()
    with mp.workdps(eng.dps):
        per = n // 3
        per += per % 2  # even grid, so the half period is a node
        xs, ys = [], []
        for j in range(1, 3 * per):
            if j % per == 0:
                continue
            v = eng.value(mpmath.mpf(j) / per)
            if v is POLE:
                continue
            xs.append(v.real)
            ys.append(abs(v.imag))
        half = eng.value(mpmath.mpf(1) / 2)
        dists = [abs(half - r) for r in inv.roots]
        idx = int(np.argmin([float(d) for d in dists]))
        mn = min(xs)
        matches = abs(mn - half.real) < tol and dists[idx] < tol
        above = all(x >= mn - tol for x in xs)
        lo = hi = None
        for j in range(3 * per):
            v = eng.value(mpmath.mpf(j) / per + tau / 2)
            lo = v.real if lo is None else min(lo, v.real)
            hi = v.real if hi is None else max(hi, v.real)
        e2 = eng.value(mpmath.mpf(1) / 2 + tau / 2)
        e3 = eng.value(tau / 2)
        interval_ok = (abs(lo - e3.real) < tol and abs(hi - e2.real) < tol)
    return HalflineReport(mn, half.real, idx, bool(matches), bool(above), float(max(ys)), (lo, hi),
                          (e3.real, e2.real), bool(interval_ok))
