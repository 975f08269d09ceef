"""NumPy versions of the two-channel filter-and-decimate kernels.

Same signatures and results (up to summation order) as the compiled
``_kernels`` extension; used when the extension is not built.
"""
import numpy as np


def _periodic_index(n, taps):
    return (2 * np.arange(n // 2)[:, None] + np.arange(taps)[None, :]) % n


def analysis_periodic(x, h, g):
    x = np.ascontiguousarray(x, dtype=float)
    idx = _periodic_index(x.size, h.size)
    block = x[idx]
    return block @ h, block @ g


def synthesis_periodic(a, d, h, g):
    n = 2 * a.size
    idx = _periodic_index(n, h.size)
    contrib = a[:, None] * h[None, :] + d[:, None] * g[None, :]
    return np.bincount(idx.ravel(), weights=contrib.ravel(), minlength=n)


def analysis_zeropad(x, h, g):
    x = np.ascontiguousarray(x, dtype=float)
    return np.convolve(x, h)[::2].copy(), np.convolve(x, g)[::2].copy()


def synthesis_zeropad(a, d, h, g, n):
    taps = h.size
    up = np.zeros(2 * a.size)
    up[::2] = a
    out = np.convolve(up, h[::-1])[taps - 1: taps - 1 + n]
    up[::2] = d
    out += np.convolve(up, g[::-1])[taps - 1: taps - 1 + n]
    return out
