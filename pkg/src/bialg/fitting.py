"""Detect polynomial relations Q(X, Y) = 0 satisfied by a point cloud.

The fit looks for a numerical null vector of the matrix of monomials
``X^i Y^j`` (``i + j <= degree``), smallest degree first.  Points are centred
and scaled with robust statistics and every row is evaluated at the point
``(X, Y, 1) / |(X, Y, 1)|`` in homogeneous coordinates; a positive row scaling
leaves the null space unchanged and keeps heavy-tailed clouds (images near
poles) well conditioned.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels


class Verdict(str, enum.Enum):
    VANISHING = "VANISHING"
    NO_RELATION = "NO_RELATION"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class Tolerances:
    tol_low: float = 1e-10
    tol_high: float = 1e-4
    tol_hold: float = 1e-6

    def __post_init__(self):
        if not (0 < self.tol_low < self.tol_high):
            raise ValueError("need 0 < tol_low < tol_high")
        if self.tol_hold <= 0:
            raise ValueError("tol_hold must be positive")


def monomials(degree: int) -> list[tuple[int, int]]:
    """Exponents (i, j) of X^i Y^j, graded: 1, X, Y, X^2, XY, Y^2, ..."""
    return [(e, t - e) for t in range(degree + 1) for e in range(t, -1, -1)]


def n_monomials(degree: int) -> int:
    return (degree + 1) * (degree + 2) // 2


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial sum(coeffs[k] * X^i Y^j) over ``monomials``."""

    coeffs: tuple[int, ...]
    monomials: tuple[tuple[int, int], ...]

    @property
    def degree(self) -> int:
        return max((i + j for c, (i, j) in zip(self.coeffs, self.monomials) if c), default=0)

    def __call__(self, x, y):
        return sum(c * x ** i * y ** j for c, (i, j) in zip(self.coeffs, self.monomials) if c)

    def __str__(self):
        terms = []
        for c, (i, j) in sorted(zip(self.coeffs, self.monomials), key=lambda t: (-(t[1][0] + t[1][1]), -t[1][0])):
            if c == 0:
                continue
            mono = "*".join(
                ([f"X^{i}" if i > 1 else "X"] if i else []) + ([f"Y^{j}" if j > 1 else "Y"] if j else [])
            )
            mag = abs(c)
            body = mono if (mono and mag == 1) else (f"{mag}*{mono}" if mono else f"{mag}")
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


@dataclass
class FitResult:
    verdict: Verdict
    degree: int | None
    coeffs: np.ndarray | None
    sv_ratio: float
    holdout_residual: float | None
    exact: IntPoly | None = None
    sv_by_degree: dict = field(default_factory=dict)

    @property
    def monomials(self):
        return monomials(self.degree) if self.degree is not None else []

    def line_angle(self) -> float | None:
        """Direction angle (mod pi) of the fitted line when the relation has degree 1."""
        if self.degree != 1 or self.coeffs is None:
            return None
        _, a, b = (complex(c) for c in self.coeffs)
        # a*X + b*Y + const = 0 has direction (b, -a)
        return math.atan2(-a.real, b.real) % math.pi

    def evaluate(self, points) -> np.ndarray:
        """|Q| at points scaled like the fit rows (homogeneous, unit norm)."""
        pts = np.asarray(points)
        vals = sum(c * pts[:, 0] ** i * pts[:, 1] ** j for c, (i, j) in zip(self.coeffs, self.monomials))
        nrm = np.sqrt(np.abs(pts[:, 0]) ** 2 + np.abs(pts[:, 1]) ** 2 + 1.0) ** self.degree
        return np.abs(vals) / nrm

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "degree": self.degree,
            "sv_ratio": _fmt(self.sv_ratio),
            "holdout_residual": None if self.holdout_residual is None else _fmt(self.holdout_residual),
        }
        if self.exact is not None:
            out["exact_poly"] = str(self.exact)
        return out


def _fmt(x: float) -> float:
    return float(f"{x:.6e}")


def _monomial_rows(pts: np.ndarray, degree: int) -> np.ndarray:
    if np.iscomplexobj(pts):
        X, Y = pts[:, 0], pts[:, 1]
        nrm = np.sqrt(np.abs(X) ** 2 + np.abs(Y) ** 2 + 1.0)
        X, Y, W = X / nrm, Y / nrm, 1.0 / nrm
        cols = [X ** i * Y ** j * W ** (degree - i - j) for i, j in monomials(degree)]
        return np.array(cols).T
    return kernels.monomial_matrix(np.ascontiguousarray(pts, dtype=np.float64), degree, True)


def normalize_points(points: np.ndarray):
    """Centre on the coordinate-wise median and divide by the median radius."""
    center = np.median(points.real, axis=0)
    if np.iscomplexobj(points):
        center = center + 1j * np.median(points.imag, axis=0)
    shifted = points - center
    radius = np.sqrt(np.sum(np.abs(shifted) ** 2, axis=1))
    scale = float(np.median(radius))
    if not scale > 0:
        scale = float(radius.max()) or 1.0
    return shifted / scale, center, scale


def _back_substitute(coeffs, degree, center, scale):
    """Coefficients of Q((X-cx)/s, (Y-cy)/s) in the monomials of X, Y."""
    out = {m: 0j for m in monomials(degree)}
    cx, cy = complex(center[0]), complex(center[1])
    for c, (i, j) in zip(coeffs, monomials(degree)):
        if c == 0:
            continue
        base = c / scale ** (i + j)
        for k in range(i + 1):
            for l in range(j + 1):
                out[(k, l)] += base * math.comb(i, k) * (-cx) ** (i - k) * math.comb(j, l) * (-cy) ** (j - l)
    vec = np.array([out[m] for m in monomials(degree)])
    return _unit_canonical(vec)


def _unit_canonical(vec: np.ndarray) -> np.ndarray:
    vec = vec / np.linalg.norm(vec)
    k = int(np.argmax(np.abs(vec)))
    vec = vec * (abs(vec[k]) / vec[k])
    if np.max(np.abs(vec.imag)) < 1e-14:
        vec = vec.real
    return vec


def fit_vanishing_poly(points, max_deg: int = 8, tol: Tolerances = Tolerances(), holdout: float = 0.25,
                       seed: int = 0, snap_height: int = 50) -> FitResult:
    """Minimal-degree search for Q with Q(points) == 0 (real or complex points, shape (n, 2))."""
    pts = np.asarray(points)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must have shape (n, 2)")
    if not np.iscomplexobj(pts):
        pts = pts.astype(np.float64)
    if len(pts) < 4 * n_monomials(max_deg):
        raise ValueError(f"too few points: {len(pts)} < {4 * n_monomials(max_deg)} for degree {max_deg}")
    norm, center, scale = normalize_points(pts)
    order = np.random.default_rng(seed).permutation(len(norm))
    n_hold = int(round(holdout * len(norm)))
    hold, train = norm[order[:n_hold]], norm[order[n_hold:]]

    ratios = {}
    undecided = False
    for deg in range(1, max_deg + 1):
        A = _monomial_rows(train, deg)
        _, s, vh = np.linalg.svd(A, full_matrices=False)
        ratio = float(s[-1] / s[0])
        ratios[deg] = ratio
        if ratio < tol.tol_low:
            if undecided and _explained_by_products(ratios, deg):
                # near-relations Q1, Q2 with residuals e1, e2 make Q1*Q2 look
                # exact (residual e1*e2); that is not evidence of vanishing
                break
            null = vh[-1].conj()
            resid = float(np.max(np.abs(_monomial_rows(hold, deg) @ null))) if n_hold else 0.0
            if resid < tol.tol_hold:
                coeffs = _back_substitute(null, deg, center, scale)
                exact = snap_integer_relation(coeffs, snap_height, degree=deg)
                return FitResult(Verdict.VANISHING, deg, coeffs, ratio, resid, exact, ratios)
            undecided = True
        elif ratio <= tol.tol_high:
            undecided = True
    worst = min(ratios.values())
    verdict = Verdict.INCONCLUSIVE if undecided else Verdict.NO_RELATION
    return FitResult(verdict, None, None, worst, None, None, ratios)


# ---------------------------------------------------------------------------
# integer snapping
# ---------------------------------------------------------------------------

def _explained_by_products(ratios: dict, deg: int, margin: float = 1e3) -> bool:
    best = min((ratios[a] * ratios[deg - a] for a in range(1, deg)), default=math.inf)
    return ratios[deg] * margin >= best


def _lll_float(basis: np.ndarray, delta: float = 0.99) -> np.ndarray:
    """LLL on integer rows with floating point Gram-Schmidt; fine for the small, well-scaled snapping lattices."""
    b = basis.astype(object)
    n = b.shape[0]

    def gso(rows):
        f = np.array(rows, dtype=np.float64)
        q, r = np.linalg.qr(f.T)
        d = np.diag(r)
        mu = (r / d[:, None]).T
        return mu, d * d

    mu, bn = gso(b)
    k = 1
    steps = 0
    while k < n:
        steps += 1
        if steps > 200_000:
            break
        for j in range(k - 1, -1, -1):
            q = int(round(mu[k, j]))
            if q:
                b[k] = b[k] - q * b[j]
                mu[k, : j + 1] -= q * mu[j, : j + 1]
        if bn[k] >= (delta - mu[k, k - 1] ** 2) * bn[k - 1]:
            k += 1
        else:
            b[[k - 1, k]] = b[[k, k - 1]]
            mu, bn = gso(b)
            k = max(k - 1, 1)
    return b


def snap_integer_relation(coeffs, height: int = 50, angle_tol: float = 1e-6, degree: int | None = None,
                          scale: float = 1e8) -> IntPoly | None:
    """Integer vector of height <= ``height`` within ``angle_tol`` (radians) of ``coeffs``.

    The search reduces the lattice spanned by ``(e_i, scale * P(e_i))`` where
    ``P`` projects away from ``coeffs``; a short vector there is an integer
    vector nearly parallel to ``coeffs``.
    """
    v = np.asarray(coeffs)
    if np.iscomplexobj(v):
        v = _unit_canonical(v)
        if np.iscomplexobj(v):
            return None
    v = v.astype(np.float64)
    v = v / np.linalg.norm(v)
    n = len(v)
    if degree is None:
        degree = int(round((math.sqrt(8 * n + 1) - 3) / 2))
    if n_monomials(degree) != n:
        raise ValueError("coefficient count does not match a full monomial basis")
    proj = np.eye(n) - np.outer(v, v)
    basis = np.hstack([np.eye(n, dtype=np.int64), np.rint(scale * proj).astype(np.int64)])
    reduced = _lll_float(basis)
    best = None
    for row in reduced:
        p = np.array([int(x) for x in row[:n]])
        if not p.any():
            continue
        h = int(np.max(np.abs(p)))
        if h > height:
            continue
        pf = p.astype(np.float64)
        cos = abs(pf @ v) / np.linalg.norm(pf)
        angle = math.acos(min(1.0, cos))
        if angle < angle_tol and (best is None or h < best[0]):
            best = (h, p if pf @ v > 0 else -p)
    if best is None:
        return None
    p = best[1]
    g = 0
    for x in p:
        g = math.gcd(g, int(x))
    mons = monomials(degree)
    lead = max((k for k in range(n) if p[k]), key=lambda k: (sum(mons[k]), mons[k][0]))
    if p[lead] < 0:
        g = -g
    return IntPoly(tuple(int(x) // g for x in p), tuple(mons))
