# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: max-plus convolution and pairwise kernel sums.

Inner sums use Kahan accumulation so results stay within a few ulp of the
numpy fallback on large grids.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow

BACKEND = "compiled"


def maxplus_merge(const double[::1] a, const double[::1] b):
    """Max-plus convolution: out[k] = max_{i+j=k} a[i] + b[j]."""
    cdef Py_ssize_t la = a.shape[0], lb = b.shape[0]
    cdef Py_ssize_t i, j
    cdef double v
    out_arr = np.full(la + lb - 1, -np.inf)
    cdef double[::1] out = out_arr
    for i in range(la):
        for j in range(lb):
            v = a[i] + b[j]
            if v > out[i + j]:
                out[i + j] = v
    return out_arr


cdef inline double _pair_pow(double d, double p) noexcept nogil:
    if p == 1.0:
        return d
    if p == 2.0:
        return d * d
    return pow(d, p)


def diffpow_weighted_sums_1d(const double[::1] values, double p, const double[::1] table):
    """out[y] = sum_x |f[x]-f[y]|**p * table[x - y + n - 1] for a 1-D grid."""
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t x, y
    cdef double acc, comp, term, t, fy
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for y in range(n):
            fy = values[y]
            acc = 0.0
            comp = 0.0
            for x in range(n):
                term = _pair_pow(fabs(values[x] - fy), p) * table[x - y + n - 1]
                t = acc + term
                if fabs(acc) >= fabs(term):
                    comp += (acc - t) + term
                else:
                    comp += (term - t) + acc
                acc = t
            out[y] = acc + comp
    return out_arr


def diffpow_weighted_sums_2d(const double[:, ::1] values, double p, const double[:, ::1] table):
    """2-D variant; table is (2*side-1, 2*side-1) offset-indexed."""
    cdef Py_ssize_t side = values.shape[0]
    cdef Py_ssize_t yi, yj, xi, xj
    cdef double acc, comp, term, t, fy
    out_arr = np.empty((side, side))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for yi in range(side):
            for yj in range(side):
                fy = values[yi, yj]
                acc = 0.0
                comp = 0.0
                for xi in range(side):
                    for xj in range(side):
                        term = _pair_pow(fabs(values[xi, xj] - fy), p) * \
                            table[xi - yi + side - 1, xj - yj + side - 1]
                        t = acc + term
                        if fabs(acc) >= fabs(term):
                            comp += (acc - t) + term
                        else:
                            comp += (term - t) + acc
                        acc = t
                out[yi, yj] = acc + comp
    return out_arr.ravel()


def weighted_sums_1d(const double[::1] values, const double[::1] table):
    """out[y] = sum_x g[x] * table[x - y + n - 1] (self term included)."""
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t x, y
    cdef double acc, comp, term, t
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for y in range(n):
            acc = 0.0
            comp = 0.0
            for x in range(n):
                term = values[x] * table[x - y + n - 1]
                t = acc + term
                if fabs(acc) >= fabs(term):
                    comp += (acc - t) + term
                else:
                    comp += (term - t) + acc
                acc = t
            out[y] = acc + comp
    return out_arr


def weighted_sums_2d(const double[:, ::1] values, const double[:, ::1] table):
    cdef Py_ssize_t side = values.shape[0]
    cdef Py_ssize_t yi, yj, xi, xj
    cdef double acc, comp, term, t
    out_arr = np.empty((side, side))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for yi in range(side):
            for yj in range(side):
                acc = 0.0
                comp = 0.0
                for xi in range(side):
                    for xj in range(side):
                        term = values[xi, xj] * \
                            table[xi - yi + side - 1, xj - yj + side - 1]
                        t = acc + term
                        if fabs(acc) >= fabs(term):
                            comp += (acc - t) + term
                        else:
                            comp += (term - t) + acc
                        acc = t
                out[yi, yj] = acc + comp
    return out_arr.ravel()
