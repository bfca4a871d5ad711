# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. ``_kernels_py`` mirrors every function here with the
same operation order, so both backends agree bit for bit."""

import numpy as np

from libc.math cimport sqrt, NAN


def triangulate_batch(const double[::1] r1, const double[::1] r2,
                      double half_baseline, double clamp_rel):
    cdef Py_ssize_t n = r1.shape[0]
    if r2.shape[0] != n:
        raise ValueError("r1 and r2 must have the same length")
    x_out = np.empty(n, dtype=np.float64)
    y_out = np.empty(n, dtype=np.float64)
    ok_out = np.empty(n, dtype=np.bool_)
    cdef double[::1] xs = x_out
    cdef double[::1] ys = y_out
    cdef char[::1] oks = ok_out.view(np.int8)
    cdef double a, b, xk, y2, s, four_x = 4.0 * half_baseline
    cdef double xx = half_baseline * half_baseline
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            a = r1[i]
            b = r2[i]
            xk = (a * a - b * b) / four_x
            y2 = (a * a + b * b) / 2.0 - xk * xk - xx
            xs[i] = xk
            if y2 >= 0.0:
                ys[i] = sqrt(y2)
                oks[i] = 1
            else:
                s = a + b
                if y2 >= -clamp_rel * (s * s):
                    ys[i] = 0.0
                    oks[i] = 1
                else:
                    ys[i] = NAN
                    oks[i] = 0
    return x_out, y_out, ok_out


def moving_average(const double[::1] values, Py_ssize_t window):
    if window < 1:
        raise ValueError("window must be >= 1")
    cdef Py_ssize_t n = values.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j, lo, hi
    cdef Py_ssize_t before = (window - 1) // 2, after = window // 2
    cdef double acc
    with nogil:
        for i in range(n):
            lo = i - before
            if lo < 0:
                lo = 0
            hi = i + after
            if hi > n - 1:
                hi = n - 1
            acc = 0.0
            for j in range(lo, hi + 1):
                acc = acc + values[j]
            o[i] = acc / <double>(hi - lo + 1)
    return out


def rolling_mean_std(const double[::1] values, Py_ssize_t window):
    if window < 2:
        raise ValueError("window must be >= 2")
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t m = n - window + 1
    if m < 0:
        m = 0
    mean_out = np.empty(m, dtype=np.float64)
    std_out = np.empty(m, dtype=np.float64)
    cdef double[::1] mu = mean_out
    cdef double[::1] sd = std_out
    cdef Py_ssize_t i, j
    cdef double acc, d
    with nogil:
        for i in range(m):
            acc = 0.0
            for j in range(window):
                acc = acc + values[i + j]
            mu[i] = acc / <double>window
            acc = 0.0
            for j in range(window):
                d = values[i + j] - mu[i]
                acc = acc + d * d
            sd[i] = sqrt(acc / <double>(window - 1))
    return mean_out, std_out
