# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled QSP evaluation kernels.

Same contract as ``_kernels_py``; loops run point by point with scalar
complex arithmetic instead of vectorized temporaries.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, cos, sin

cnp.import_array()


def qsp_top_left(phases, xs):
    cdef double[::1] ph = np.ascontiguousarray(phases, dtype=np.float64)
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t m = ph.shape[0]
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double complex[::1] e = np.exp(1j * np.asarray(ph))
    cdef Py_ssize_t i, j
    cdef double x, s
    cdef double complex r0, r1, t0, t1
    for i in range(n):
        x = xv[i]
        s = sqrt(max(0.0, 1.0 - x * x))
        r0 = e[0]
        r1 = 0.0
        for j in range(1, m):
            t0 = r0 * x + 1j * s * r1
            t1 = 1j * s * r0 + r1 * x
            r0 = t0 * e[j]
            r1 = t1 * e[j].conjugate()
        o[i] = r0
    return out


def qsp_top_left_grad(phases, xs):
    cdef double[::1] ph = np.ascontiguousarray(phases, dtype=np.float64)
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t k = ph.shape[0] - 1
    p_out = np.empty(n, dtype=np.complex128)
    dp_out = np.empty((n, k + 1), dtype=np.complex128)
    cdef double complex[::1] po = p_out
    cdef double complex[:, ::1] dpo = dp_out
    cdef double complex[::1] e = np.exp(1j * np.asarray(ph))
    pre = np.empty((k + 1, 2), dtype=np.complex128)
    cdef double complex[:, ::1] pr = pre
    cdef Py_ssize_t i, j
    cdef double x, s
    cdef double complex a0, a1, c0, c1, s0, s1
    for i in range(n):
        x = xv[i]
        s = sqrt(max(0.0, 1.0 - x * x))
        pr[0, 0] = 1.0
        pr[0, 1] = 0.0
        for j in range(k):
            a0 = pr[j, 0] * e[j]
            a1 = pr[j, 1] * e[j].conjugate()
            pr[j + 1, 0] = a0 * x + 1j * s * a1
            pr[j + 1, 1] = 1j * s * a0 + a1 * x
        s0 = e[k]
        s1 = 0.0
        dpo[i, k] = 1j * (pr[k, 0] * s0 - pr[k, 1] * s1)
        for j in range(k - 1, -1, -1):
            c0 = x * s0 + 1j * s * s1
            c1 = 1j * s * s0 + x * s1
            s0 = e[j] * c0
            s1 = e[j].conjugate() * c1
            dpo[i, j] = 1j * (pr[j, 0] * s0 - pr[j, 1] * s1)
        po[i] = s0
    return p_out, dp_out
