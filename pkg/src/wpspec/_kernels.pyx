# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled two-channel filter-and-decimate kernels.

Mirrors ``_kernels_py``: periodic (circular) and zero-padded (linear
convolution) analysis steps and their exact adjoints.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def analysis_periodic(const double[::1] x, const double[::1] h, const double[::1] g):
    cdef Py_ssize_t n = x.shape[0], taps = h.shape[0], half = n // 2
    cdef Py_ssize_t k, t, j
    cdef double sa, sd, v
    a = np.empty(half)
    d = np.empty(half)
    cdef double[::1] av = a, dv = d
    with nogil:
        for k in range(half):
            sa = 0.0
            sd = 0.0
            j = 2 * k
            for t in range(taps):
                if j >= n:
                    j = j % n
                v = x[j]
                sa += h[t] * v
                sd += g[t] * v
                j += 1
            av[k] = sa
            dv[k] = sd
    return a, d


def synthesis_periodic(const double[::1] a, const double[::1] d,
                       const double[::1] h, const double[::1] g):
    cdef Py_ssize_t half = a.shape[0], n = 2 * half, taps = h.shape[0]
    cdef Py_ssize_t k, t, j
    cdef double ak, dk
    out = np.zeros(n)
    cdef double[::1] ov = out
    with nogil:
        for k in range(half):
            ak = a[k]
            dk = d[k]
            j = 2 * k
            for t in range(taps):
                if j >= n:
                    j = j % n
                ov[j] += h[t] * ak + g[t] * dk
                j += 1
    return out


def analysis_zeropad(const double[::1] x, const double[::1] h, const double[::1] g):
    # y[k] = sum_t f[t] x[2k - t], all k with any overlap
    cdef Py_ssize_t n = x.shape[0], taps = h.shape[0]
    cdef Py_ssize_t half = (n + taps) // 2
    cdef Py_ssize_t k, t, lo, hi
    cdef double sa, sd, v
    a = np.empty(half)
    d = np.empty(half)
    cdef double[::1] av = a, dv = d
    with nogil:
        for k in range(half):
            sa = 0.0
            sd = 0.0
            lo = 2 * k - n + 1
            if lo < 0:
                lo = 0
            hi = 2 * k + 1
            if hi > taps:
                hi = taps
            for t in range(lo, hi):
                v = x[2 * k - t]
                sa += h[t] * v
                sd += g[t] * v
            av[k] = sa
            dv[k] = sd
    return a, d


def synthesis_zeropad(const double[::1] a, const double[::1] d,
                      const double[::1] h, const double[::1] g, Py_ssize_t n):
    cdef Py_ssize_t half = a.shape[0], taps = h.shape[0]
    cdef Py_ssize_t k, t, m
    cdef double ak, dk
    out = np.zeros(n)
    cdef double[::1] ov = out
    with nogil:
        for k in range(half):
            ak = a[k]
            dk = d[k]
            for t in range(taps):
                m = 2 * k - t
                if m < 0:
                    break
                if m < n:
                    ov[m] += h[t] * ak + g[t] * dk
    return out
