# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; same signatures as :mod:`holobias._kernels_py`.

Loops over independent outputs run under ``prange``; each output is an
ordered sum over terms, so results do not depend on the thread count.
"""

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport cos, floor, M_PI
from libc.stdint cimport int64_t, uint64_t
from scipy.special.cython_special cimport j0

cnp.import_array()

cdef uint64_t MASK53 = (<uint64_t>1 << 53) - 1
cdef double INV_2_53 = 1.0 / 9007199254740992.0


def cos_sum(y, s, a, phi, double center):
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const double[::1] sv = np.ascontiguousarray(s, dtype=np.float64)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] pv = np.ascontiguousarray(phi, dtype=np.float64)
    cdef Py_ssize_t n = yv.shape[0], m = sv.shape[0], k, j
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double acc
    for k in prange(n, nogil=True, schedule="static"):
        acc = 0.0
        for j in range(m):
            acc = acc + av[j] * cos(sv[j] * yv[k] + pv[j])
        ov[k] = acc + center
    return out


def torus_points(u, M):
    cdef const uint64_t[:, ::1] uv = np.ascontiguousarray(u, dtype=np.uint64)
    cdef const int64_t[:, ::1] Mv = np.ascontiguousarray(M, dtype=np.int64)
    cdef Py_ssize_t n = uv.shape[0], r = uv.shape[1], d = Mv.shape[0], i, j, k
    out = np.empty((n, d), dtype=np.uint64)
    cdef uint64_t[:, ::1] ov = out
    cdef uint64_t acc
    for i in prange(n, nogil=True, schedule="static"):
        for j in range(d):
            acc = 0
            for k in range(r):
                acc = acc + <uint64_t>Mv[j, k] * uv[i, k]
            ov[i, j] = acc & MASK53
    return out


def torus_values(u, M, a, phi, double center):
    cdef const uint64_t[:, ::1] uv = np.ascontiguousarray(u, dtype=np.uint64)
    cdef const int64_t[:, ::1] Mv = np.ascontiguousarray(M, dtype=np.int64)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] pv = np.ascontiguousarray(phi, dtype=np.float64)
    cdef Py_ssize_t n = uv.shape[0], r = uv.shape[1], d = Mv.shape[0], i, j, k
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef uint64_t num
    cdef double acc, two_pi = 2.0 * M_PI
    for i in prange(n, nogil=True, schedule="static"):
        acc = 0.0
        for j in range(d):
            num = 0
            for k in range(r):
                num = num + <uint64_t>Mv[j, k] * uv[i, k]
            num = num & MASK53
            acc = acc + av[j] * cos(two_pi * (<double>num * INV_2_53) + pv[j])
        ov[i] = acc + center
    return out


def histogram(values, double lo, double hi, Py_ssize_t nbins):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    counts = np.zeros(nbins, dtype=np.int64)
    cdef int64_t[::1] cv = counts
    cdef Py_ssize_t i, b, n = v.shape[0]
    cdef double scale = nbins / (hi - lo), t
    with nogil:
        for i in range(n):
            t = v[i]
            if t < lo or t > hi:
                continue
            b = <Py_ssize_t>floor((t - lo) * scale)
            if b >= nbins:
                b = nbins - 1
            elif b < 0:
                b = 0
            cv[b] += 1
    return counts


def bessel_cos_integral(xi, w, a, x, double center):
    cdef const double[::1] xv = np.ascontiguousarray(xi, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] gv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t nq = xv.shape[0], m = av.shape[0], ng = gv.shape[0], i, j, k
    prod = np.empty(nq, dtype=np.float64)
    cdef double[::1] pv = prod
    out = np.empty(ng, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double acc, d, t
    for i in prange(nq, nogil=True, schedule="static"):
        t = wv[i]
        for j in range(m):
            t = t * j0(av[j] * xv[i])
        pv[i] = t
    for k in prange(ng, nogil=True, schedule="static"):
        d = gv[k] - center
        acc = 0.0
        for i in range(nq):
            acc = acc + pv[i] * cos(xv[i] * d)
        ov[k] = acc
    return out
