# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: double precision wp batches, monomial matrices, torus binning."""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, sqrt, fabs, round as cround, NAN

cnp.import_array()


cdef inline double complex _series(double complex z, double complex[::1] c, double complex *deriv) nogil:
    cdef double complex z2 = z * z
    cdef double complex val = 0
    cdef double complex der = 0
    cdef Py_ssize_t n
    for n in range(c.shape[0] - 1, 1, -1):
        der = der * z2 + (2 * n - 2) * c[n]
        val = val * z2 + c[n]
    deriv[0] = -2.0 / (z2 * z) + der * z
    return 1.0 / z2 + val * z2


def wp_batch(double complex[::1] zs, double complex w1, double complex w2,
             double complex g2, double complex[::1] coeffs,
             double radius, double pole_radius):
    cdef Py_ssize_t n = zs.shape[0], i
    cdef int dm, dn, k, j
    cdef double det = w1.real * w2.imag - w1.imag * w2.real
    cdef double a, b, m0, n0
    cdef double complex z, w, best, x, y, m, x3, d
    cdef double complex q = g2 / 4.0
    out_wp = np.empty(n, dtype=np.complex128)
    out_wpp = np.empty(n, dtype=np.complex128)
    pole = np.zeros(n, dtype=np.bool_)
    cdef double complex[::1] owp = out_wp
    cdef double complex[::1] owpp = out_wpp
    cdef cnp.npy_bool[::1] opole = pole
    with nogil:
        for i in range(n):
            z = zs[i]
            a = (z.real * w2.imag - z.imag * w2.real) / det
            b = (w1.real * z.imag - w1.imag * z.real) / det
            m0 = cround(a)
            n0 = cround(b)
            best = z - m0 * w1 - n0 * w2
            for dm in range(-1, 2):
                for dn in range(-1, 2):
                    w = z - (m0 + dm) * w1 - (n0 + dn) * w2
                    if w.real * w.real + w.imag * w.imag < best.real * best.real + best.imag * best.imag:
                        best = w
            w = best
            if sqrt(w.real * w.real + w.imag * w.imag) < pole_radius:
                opole[i] = 1
                owp[i] = NAN
                owpp[i] = NAN
                continue
            k = 0
            while sqrt(w.real * w.real + w.imag * w.imag) > radius:
                w = w / 2.0
                k += 1
            x = _series(w, coeffs, &d)
            y = d / 2.0
            for j in range(k):
                m = (3.0 * x * x - q) / (2.0 * y)
                x3 = m * m - 2.0 * x
                y = m * (x - x3) - y
                x = x3
            owp[i] = x
            owpp[i] = 2.0 * y
    return out_wp, out_wpp, pole


def monomial_matrix(double[:, ::1] pts, int degree, bint homogeneous):
    cdef Py_ssize_t n = pts.shape[0], i
    cdef int ncols = (degree + 1) * (degree + 2) // 2
    cdef int t, e, col, p
    cdef double X, Y, W, nrm, v
    out = np.empty((n, ncols), dtype=np.float64)
    cdef double[:, ::1] A = out
    with nogil:
        for i in range(n):
            X = pts[i, 0]
            Y = pts[i, 1]
            W = 1.0
            if homogeneous:
                nrm = sqrt(X * X + Y * Y + 1.0)
                X = X / nrm
                Y = Y / nrm
                W = 1.0 / nrm
            col = 0
            for t in range(degree + 1):
                for e in range(t, -1, -1):
                    v = 1.0
                    for p in range(e):
                        v *= X
                    for p in range(t - e):
                        v *= Y
                    for p in range(degree - t):
                        v *= W
                    A[i, col] = v
                    col += 1
    return out


def torus_cells(double[::1] a, double[::1] b, int k):
    cdef Py_ssize_t n = a.shape[0], i
    cdef int ca, cb
    hit = np.zeros((k, k), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] H = hit
    with nogil:
        for i in range(n):
            ca = <int> floor((a[i] - floor(a[i])) * k)
            cb = <int> floor((b[i] - floor(b[i])) * k)
            if ca >= k:
                ca = k - 1
            if cb >= k:
                cb = k - 1
            H[ca, cb] = 1
    return int(hit.sum())
