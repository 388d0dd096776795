# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled message-passing kernels (OpenMP-parallel). Same contract as
insbank._kernels_py; selected at import by insbank.backend."""

import numpy as np

cimport cython
from cython.parallel cimport prange
from libc.math cimport INFINITY

BACKEND = "cython"


def responsibility_step(double[:, ::1] S, double[:, ::1] A):
    cdef Py_ssize_t n = S.shape[0]
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] R = out
    cdef Py_ssize_t i, k
    cdef double v, max1, max2, s_at_max
    cdef Py_ssize_t idx1

    if n == 1:
        R[0, 0] = S[0, 0]
        return out

    for i in prange(n, nogil=True, schedule='static'):
        max1 = -INFINITY
        max2 = -INFINITY
        idx1 = 0
        for k in range(n):
            v = A[i, k] + S[i, k]
            if v > max1:
                max2 = max1
                max1 = v
                idx1 = k
            elif v > max2:
                max2 = v
        for k in range(n):
            R[i, k] = S[i, k] - max1
        R[i, idx1] = S[i, idx1] - max2
    return out


def availability_step(double[:, ::1] R):
    cdef Py_ssize_t n = R.shape[0]
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] A = out
    cdef Py_ssize_t i, k
    cdef double v

    if n == 1:
        A[0, 0] = 0.0
        return out

    # pass 1 (row-major, branchless): colsum[k] = sum over i of max(0, R[i,k]),
    # with the clamped diagonal term swapped for the raw one
    colsum_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] colsum = colsum_arr
    for i in range(n):
        for k in range(n):
            v = R[i, k]
            colsum[k] += v if v > 0.0 else 0.0
    for k in range(n):
        v = R[k, k]
        colsum[k] += v - (v if v > 0.0 else 0.0)

    # pass 2: subtract own contribution, clamp off-diagonal at zero;
    # A[k,k] is colsum - R[k,k], the positive off-diagonal mass
    for i in prange(n, nogil=True, schedule='static'):
        for k in range(n):
            v = R[i, k]
            v = colsum[k] - (v if v > 0.0 else 0.0)
            A[i, k] = v if v < 0.0 else 0.0
        A[i, i] = colsum[i] - R[i, i]
    return out


def blend(double coef_a, double[:, ::1] Ma, double coef_b, double[:, ::1] Mb,
          double coef_c, double[:, ::1] Mc):
    cdef Py_ssize_t n = Ma.shape[0], m = Ma.shape[1]
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] O = out
    cdef Py_ssize_t i, k
    for i in prange(n, nogil=True, schedule='static'):
        for k in range(m):
            O[i, k] = coef_a * Ma[i, k] + coef_b * Mb[i, k] + coef_c * Mc[i, k]
    return out
