# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-edge kernels; see ``_fallback.py`` for the reference versions."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, asinh, sinh, fabs

cnp.import_array()

DEF EUCLID = 0


cdef inline double _mdot(const double[:, ::1] X, Py_ssize_t i,
                         const double[:, ::1] Y, Py_ssize_t j, Py_ssize_t d) nogil:
    cdef double s = -X[i, 0] * Y[j, 0]
    cdef Py_ssize_t k
    for k in range(1, d):
        s += X[i, k] * Y[j, k]
    return s


def edge_lengths(int kind, P, Q):
    cdef const double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], d = p.shape[1], i, k
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double s, t
    with nogil:
        for i in range(n):
            if kind == EUCLID:
                s = 0.0
                for k in range(d):
                    t = q[i, k] - p[i, k]
                    s += t * t
                o[i] = sqrt(s)
            else:
                t = q[i, 0] - p[i, 0]
                s = -t * t
                for k in range(1, d):
                    t = q[i, k] - p[i, k]
                    s += t * t
                if s < 0.0:
                    s = 0.0
                o[i] = 2.0 * asinh(0.5 * sqrt(s))
    return out


def energy_grad(int kind, P, Q, w):
    cdef const double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    cdef const double[::1] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], d = p.shape[1], i, k
    gp_arr = np.empty((n, d), dtype=np.float64)
    gq_arr = np.empty((n, d), dtype=np.float64)
    cdef double[:, ::1] gp = gp_arr
    cdef double[:, ::1] gq = gq_arr
    cdef double energy = 0.0, s, t, L, c, ratio, coef
    with nogil:
        for i in range(n):
            if kind == EUCLID:
                s = 0.0
                for k in range(d):
                    t = p[i, k] - q[i, k]
                    s += t * t
                    gp[i, k] = 2.0 * ww[i] * t
                    gq[i, k] = -2.0 * ww[i] * t
                energy += ww[i] * s
            else:
                t = q[i, 0] - p[i, 0]
                s = -t * t
                for k in range(1, d):
                    t = q[i, k] - p[i, k]
                    s += t * t
                if s < 0.0:
                    s = 0.0
                L = 2.0 * asinh(0.5 * sqrt(s))
                c = -_mdot(p, i, q, i, d)
                if L < 1e-8:
                    ratio = 1.0
                else:
                    ratio = L / sinh(L)
                coef = -2.0 * ww[i] * ratio
                for k in range(d):
                    gp[i, k] = coef * (q[i, k] - c * p[i, k])
                    gq[i, k] = coef * (p[i, k] - c * q[i, k])
                energy += ww[i] * L * L
    return energy, gp_arr, gq_arr


def energy_delta(int kind, P, Q, dP, dQ, w):
    cdef const double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    cdef const double[:, ::1] dp = np.ascontiguousarray(dP, dtype=np.float64)
    cdef const double[:, ::1] dq = np.ascontiguousarray(dQ, dtype=np.float64)
    cdef const double[::1] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], d = p.shape[1], i, k
    cdef double total = 0.0, a, b, s1, s2, s3, x2, x, dc, xn2, xn, den, dL, L
    with nogil:
        for i in range(n):
            if kind == EUCLID:
                s1 = 0.0
                s2 = 0.0
                for k in range(d):
                    a = p[i, k] - q[i, k]
                    b = dp[i, k] - dq[i, k]
                    s1 += a * b
                    s2 += b * b
                total += ww[i] * (2.0 * s1 + s2)
            else:
                # chord D = q - p and its change dD = dq - dp (Minkowski form)
                a = q[i, 0] - p[i, 0]
                b = dq[i, 0] - dp[i, 0]
                s1 = -a * a
                s2 = -a * b
                s3 = -b * b
                for k in range(1, d):
                    a = q[i, k] - p[i, k]
                    b = dq[i, k] - dp[i, k]
                    s1 += a * a
                    s2 += a * b
                    s3 += b * b
                if s1 < 0.0:
                    s1 = 0.0
                x2 = 0.25 * s1
                x = sqrt(x2)
                dc = 0.5 * s2 + 0.25 * s3
                xn2 = x2 + dc
                if xn2 < 0.0:
                    xn2 = 0.0
                    dc = -x2
                xn = sqrt(xn2)
                den = xn * sqrt(1.0 + x2) + x * sqrt(1.0 + xn2)
                if den > 0.0:
                    dL = 2.0 * asinh(dc / den)
                else:
                    dL = 0.0
                L = 2.0 * asinh(x)
                total += ww[i] * dL * (2.0 * L + dL)
    return total


def scatter_add(out, idx, vals):
    cdef double[:, ::1] o = out
    cdef const Py_ssize_t[::1] ix = np.ascontiguousarray(idx, dtype=np.intp)
    cdef const double[:, ::1] v = np.ascontiguousarray(vals, dtype=np.float64)
    cdef Py_ssize_t n = ix.shape[0], d = v.shape[1], i, k
    with nogil:
        for i in range(n):
            for k in range(d):
                o[ix[i], k] += v[i, k]
    return out
