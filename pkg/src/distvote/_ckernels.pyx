# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled twins of the kernels in ``_pykernels``.

Loop and accumulation order match the pure-Python versions exactly, so
both backends produce bit-identical arrays.
"""

import numpy as np


def rank_rows(const double[:, ::1] values, const Py_ssize_t[::1] order):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t m = values.shape[1]
    out_arr = np.empty((n, m), dtype=np.intp)
    cdef Py_ssize_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, t, j, a
    cdef double va
    for i in range(n):
        for t in range(m):
            out[i, t] = order[t]
        # stable insertion sort, descending by value; stability keeps the
        # tie-break priority order seeded above for equal values
        for t in range(1, m):
            a = out[i, t]
            va = values[i, a]
            j = t - 1
            while j >= 0 and values[i, out[i, j]] < va:
                out[i, j + 1] = out[i, j]
                j -= 1
            out[i, j + 1] = a
    return out_arr


def score_totals(const Py_ssize_t[:, ::1] rankings, const double[::1] weights):
    cdef Py_ssize_t n = rankings.shape[0]
    cdef Py_ssize_t m = rankings.shape[1]
    out_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, t
    for i in range(n):
        for t in range(m):
            out[rankings[i, t]] += weights[t]
    return out_arr


def welfare_totals(const double[:, ::1] values):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t m = values.shape[1]
    out_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, a
    for i in range(n):
        for a in range(m):
            out[a] += values[i, a]
    return out_arr
