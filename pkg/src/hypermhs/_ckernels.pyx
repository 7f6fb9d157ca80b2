# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled quadrature kernels; same contracts as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

NAME = "cython"

cdef double TRACK_COS = 0.7071067811865476


def track_sqrt(s_in, double complex y0):
    cdef double complex[::1] s = np.ascontiguousarray(s_in, dtype=np.complex128)
    cdef Py_ssize_t n = s.shape[0], i
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] y = out
    cdef double complex prev = y0, cur
    cdef double d, sign = 1.0, ap, ac
    cdef bint ok = True
    for i in range(n):
        cur = s[i]
        d = cur.real * prev.real + cur.imag * prev.imag
        ac = sqrt(cur.real * cur.real + cur.imag * cur.imag)
        ap = sqrt(prev.real * prev.real + prev.imag * prev.imag)
        if fabs(d) < TRACK_COS * ac * ap or ac == 0.0:
            ok = False
        if d < 0:
            sign = -sign
        y[i] = sign * cur
        prev = cur
    return out, ok


def segment_signature(vals, double h, Q_in, w_in, int level):
    cdef double complex[:, ::1] f = np.ascontiguousarray(vals, dtype=np.complex128)
    cdef const double[:, ::1] Q = np.ascontiguousarray(Q_in, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(w_in, dtype=np.float64)
    cdef Py_ssize_t n = f.shape[0], m = f.shape[1]
    cdef Py_ssize_t i, j, a, b, c
    cdef double hw
    cdef double complex acc

    S1 = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] s1 = S1
    for i in range(n):
        hw = h * w[i]
        for a in range(m):
            s1[a] += hw * f[i, a]
    if level < 2:
        return [S1]

    F1 = np.zeros((n, m), dtype=np.complex128)
    cdef double complex[:, ::1] f1 = F1
    for i in range(n):
        for a in range(m):
            acc = 0
            for j in range(n):
                acc += Q[i, j] * f[j, a]
            f1[i, a] = h * acc
    S2 = np.zeros((m, m), dtype=np.complex128)
    cdef double complex[:, ::1] s2 = S2
    for i in range(n):
        hw = h * w[i]
        for a in range(m):
            for b in range(m):
                s2[a, b] += hw * f1[i, a] * f[i, b]
    if level < 3:
        return [S1, S2]

    # the third level only needs sum_i hw_i F2[i] f[i]; moving the sum
    # over i inside the integration matrix avoids forming F2
    G = np.zeros((n, m), dtype=np.complex128)
    cdef double complex[:, ::1] gm = G
    for i in range(n):
        hw = h * h * w[i]
        for j in range(n):
            for c in range(m):
                gm[j, c] += hw * Q[i, j] * f[i, c]
    S3 = np.zeros((m, m, m), dtype=np.complex128)
    cdef double complex[:, :, ::1] s3 = S3
    cdef double complex fab
    for j in range(n):
        for a in range(m):
            for b in range(m):
                fab = f1[j, a] * f[j, b]
                for c in range(m):
                    s3[a, b, c] += fab * gm[j, c]
    return [S1, S2, S3]


def chen_product(A, B, int level):
    cdef double complex[::1] a1 = np.ascontiguousarray(A[0], dtype=np.complex128)
    cdef double complex[::1] b1 = np.ascontiguousarray(B[0], dtype=np.complex128)
    cdef Py_ssize_t m = a1.shape[0], i, j, k
    C1 = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] c1 = C1
    for i in range(m):
        c1[i] = a1[i] + b1[i]
    if level < 2:
        return [C1]
    cdef double complex[:, ::1] a2 = np.ascontiguousarray(A[1], dtype=np.complex128)
    cdef double complex[:, ::1] b2 = np.ascontiguousarray(B[1], dtype=np.complex128)
    C2 = np.empty((m, m), dtype=np.complex128)
    cdef double complex[:, ::1] c2 = C2
    for i in range(m):
        for j in range(m):
            c2[i, j] = a2[i, j] + a1[i] * b1[j] + b2[i, j]
    if level < 3:
        return [C1, C2]
    cdef double complex[:, :, ::1] a3 = np.ascontiguousarray(A[2], dtype=np.complex128)
    cdef double complex[:, :, ::1] b3 = np.ascontiguousarray(B[2], dtype=np.complex128)
    C3 = np.empty((m, m, m), dtype=np.complex128)
    cdef double complex[:, :, ::1] c3 = C3
    for i in range(m):
        for j in range(m):
            for k in range(m):
                c3[i, j, k] = a3[i, j, k] + a2[i, j] * b1[k] + a1[i] * b2[j, k] + b3[i, j, k]
    return [C1, C2, C3]
