"""NumPy versions of the compiled kernels in ``_ckernels.pyx``."""
from __future__ import annotations

import numpy as np


def _series(z, c):
    z2 = z * z
    val = np.zeros_like(z)
    der = np.zeros_like(z)
    for n in range(len(c) - 1, 1, -1):
        der = der * z2 + (2 * n - 2) * c[n]
        val = val * z2 + c[n]
    return 1.0 / z2 + val * z2, -2.0 / (z2 * z) + der * z


def wp_batch(zs, w1, w2, g2, coeffs, radius, pole_radius):
    zs = np.asarray(zs, dtype=np.complex128)
    det = w1.real * w2.imag - w1.imag * w2.real
    a = (zs.real * w2.imag - zs.imag * w2.real) / det
    b = (w1.real * zs.imag - w1.imag * zs.real) / det
    m0, n0 = np.round(a), np.round(b)
    best = zs - m0 * w1 - n0 * w2
    for dm in (-1, 0, 1):
        for dn in (-1, 0, 1):
            w = zs - (m0 + dm) * w1 - (n0 + dn) * w2
            best = np.where(np.abs(w) < np.abs(best), w, best)
    pole = np.abs(best) < pole_radius
    w = np.where(pole, radius, best)
    k = np.zeros(w.shape, dtype=int)
    big = np.abs(w) > radius
    while big.any():
        w = np.where(big, w / 2.0, w)
        k += big
        big = np.abs(w) > radius
    x, d = _series(w, coeffs)
    y = d / 2.0
    q = g2 / 4.0
    for j in range(int(k.max(initial=0))):
        act = k > j
        m = (3.0 * x * x - q) / (2.0 * y)
        x3 = m * m - 2.0 * x
        y3 = m * (x - x3) - y
        x = np.where(act, x3, x)
        y = np.where(act, y3, y)
    wp = np.where(pole, np.nan, x)
    wpp = np.where(pole, np.nan, 2.0 * y)
    return wp.astype(np.complex128), wpp.astype(np.complex128), pole


def monomial_matrix(pts, degree, homogeneous):
    pts = np.asarray(pts, dtype=np.float64)
    X, Y = pts[:, 0], pts[:, 1]
    W = np.ones_like(X)
    if homogeneous:
        nrm = np.sqrt(X * X + Y * Y + 1.0)
        X, Y, W = X / nrm, Y / nrm, W / nrm
    cols = [X ** e * Y ** (t - e) * W ** (degree - t) for t in range(degree + 1) for e in range(t, -1, -1)]
    return np.ascontiguousarray(np.array(cols).T)


def torus_cells(a, b, k):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ca = np.minimum(np.floor((a - np.floor(a)) * k).astype(int), k - 1)
    cb = np.minimum(np.floor((b - np.floor(b)) * k).astype(int), k - 1)
    hit = np.zeros((k, k), dtype=bool)
    hit[ca, cb] = True
    return int(hit.sum())
