# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled contour kernels.

Drop-in replacement for lmkit.kernels.pykernels, which documents the exact
semantics.  Kept dependency-free beyond NumPy so the extension builds with
a plain C compiler.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def moving_average(x, width):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t w = width
    if w < 1 or w % 2 == 0:
        raise ValueError("width must be odd and >= 1, got %r" % (width,))
    cdef Py_ssize_t n = xv.shape[0]
    if w == 1 or n == 0:
        return np.asarray(xv).copy()
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t h = w // 2
    cdef Py_ssize_t i, lo, hi
    # prefix sums; same accumulation order as the NumPy cumsum fallback
    csum_arr = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] csum = csum_arr
    csum[0] = 0.0
    for i in range(n):
        csum[i + 1] = csum[i] + xv[i]
    for i in range(n):
        lo = i - h
        if lo < 0:
            lo = 0
        hi = i + h
        if hi > n - 1:
            hi = n - 1
        out[i] = (csum[hi + 1] - csum[lo]) / (hi - lo + 1)
    return out_arr


def kernel_smooth(x, kernel):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] kv = np.ascontiguousarray(kernel, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t m = kv.shape[0]
    if m < 1 or m % 2 == 0:
        raise ValueError("kernel length must be odd and >= 1")
    cdef Py_ssize_t i, j, j0, j1
    cdef double wsum = 0.0
    for j in range(m):
        if kv[j] < 0:
            raise ValueError("kernel weights must be non-negative")
        wsum += kv[j]
    if wsum == 0.0:
        raise ValueError("kernel weights must not be all zero")
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    if n == 0:
        return out_arr
    cdef Py_ssize_t c = m // 2
    cdef double num, den
    for i in range(n):
        j0 = c - i
        if j0 < 0:
            j0 = 0
        j1 = c - i + n
        if j1 > m:
            j1 = m
        num = 0.0
        den = 0.0
        for j in range(j0, j1):
            num += kv[j] * xv[i - c + j]
            den += kv[j]
        out[i] = num / den
    return out_arr


def rate_of_rise(x, half_step):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t k = half_step
    if k < 1:
        raise ValueError("half_step must be >= 1")
    cdef Py_ssize_t n = xv.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    if n == 0:
        return out_arr
    cdef Py_ssize_t i, a, b
    for i in range(n):
        a = i + k
        if a > n - 1:
            a = n - 1
        b = i - k
        if b < 0:
            b = 0
        out[i] = xv[a] - xv[b]
    return out_arr


def peak_pick(x, double threshold):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef list idx_out = []
    cdef list mag_out = []
    cdef Py_ssize_t i = 0, j, run_end, ntied, target, pos
    cdef double m
    while i < n:
        if xv[i] < threshold:
            i += 1
            continue
        run_end = i
        while run_end + 1 < n and xv[run_end + 1] >= threshold:
            run_end += 1
        m = xv[i]
        for j in range(i + 1, run_end + 1):
            if xv[j] > m:
                m = xv[j]
        ntied = 0
        for j in range(i, run_end + 1):
            if xv[j] == m:
                ntied += 1
        # middle element of the tied maxima, matching pykernels
        target = ntied // 2
        pos = 0
        for j in range(i, run_end + 1):
            if xv[j] == m:
                if pos == target:
                    idx_out.append(j)
                    break
                pos += 1
        mag_out.append(m)
        i = run_end + 1
    return (
        np.asarray(idx_out, dtype=np.int64),
        np.asarray(mag_out, dtype=np.float64),
    )
