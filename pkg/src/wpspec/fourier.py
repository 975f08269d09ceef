"""DFT-based PSD estimators: periodogram, Welch, Blackman-Tukey.

Every estimate is one-sided on normalized frequency [0, 1] and scaled so
that its integral over [0, 1] equals the mean power of the analyzed signal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signals import Signal, Window, WindowKind, make_window

GRID_TRAPEZOID = "trapezoid"
GRID_BINS = "bins"


@dataclass(frozen=True)
class PsdEstimate:
    """Density values on an ascending normalized-frequency grid.

    ``grid_kind`` says how to integrate: ``"trapezoid"`` for DFT grids that
    include both 0 and 1, ``"bins"`` for piecewise-constant estimates whose
    grid points are bin centres of equal width.
    """

    freqs: np.ndarray
    values: np.ndarray
    estimator_desc: str
    grid_kind: str = GRID_TRAPEZOID

    def __post_init__(self):
        f = np.array(self.freqs, dtype=float, copy=True)
        v = np.array(self.values, dtype=float, copy=True)
        if f.ndim != 1 or f.shape != v.shape:
            raise ValueError("freqs and values must be 1-D and the same length")
        if f.size < 2:
            raise ValueError("an estimate needs at least 2 grid points")
        if np.any(np.diff(f) <= 0):
            raise ValueError("freqs must be strictly ascending")
        if f[0] < 0.0 or f[-1] > 1.0:
            raise ValueError("freqs must lie in [0, 1]")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("density values must be finite and non-negative")
        if self.grid_kind not in (GRID_TRAPEZOID, GRID_BINS):
            raise ValueError(f"unknown grid kind {self.grid_kind!r}")
        f.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "freqs", f)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.freqs.size

    @property
    def bin_width(self) -> float:
        return float(self.freqs[1] - self.freqs[0])

    def integral(self) -> float:
        if self.grid_kind == GRID_BINS:
            return float(np.sum(self.values) * self.bin_width)
        return float(np.trapezoid(self.values, self.freqs))

    def peak_frequency(self) -> float:
        return float(self.freqs[int(np.argmax(self.values))])


def dft(samples) -> np.ndarray:
    """Forward DFT, ``X[k] = sum_n x[n] exp(-2j pi k n / N)``."""
    x = np.asarray(samples)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("dft expects a non-empty 1-D sequence")
    return np.fft.fft(x)


def idft(spectrum) -> np.ndarray:
    X = np.asarray(spectrum)
    if X.ndim != 1 or X.size < 1:
        raise ValueError("idft expects a non-empty 1-D sequence")
    return np.fft.ifft(X)


def next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 0).bit_length()


def _check_nfft(nfft: int, minimum: int) -> int:
    nfft = int(nfft)
    if nfft < minimum:
        raise ValueError(f"nfft={nfft} is smaller than the required {minimum}")
    if nfft % 2:
        raise ValueError(f"nfft must be even so the grid ends at Nyquist, got {nfft}")
    return nfft


def one_sided_grid(nfft: int) -> np.ndarray:
    return 2.0 * np.arange(nfft // 2 + 1) / nfft


def _power_matched(values: np.ndarray, nfft: int, target_power: float) -> np.ndarray:
    """Rescale so the trapezoid integral over the one-sided grid is ``target_power``."""
    step = 2.0 / nfft
    integral = step * (values.sum() - 0.5 * (values[0] + values[-1]))
    if integral <= 0.0 or target_power == 0.0:
        return np.zeros_like(values)
    return values * (target_power / integral)


def _resolve_window(window, length: int) -> Window:
    if window is None:
        return make_window(WindowKind.RECTANGULAR, length)
    if isinstance(window, Window):
        return window
    return make_window(window, length)


def periodogram(signal: Signal, window=None, nfft: int | None = None) -> PsdEstimate:
    """Windowed periodogram ``|DFT(w * x)|^2 / sum(w^2)``.

    ``window`` may be a :class:`Window`, a window kind name, or ``None`` for
    rectangular. ``nfft`` defaults to the signal length rounded up to a power
    of two.
    """
    x = signal.samples
    n = x.size
    win = _resolve_window(window, n)
    if len(win) != n:
        raise ValueError(f"window length {len(win)} does not match signal length {n}")
    nfft = _check_nfft(next_pow2(n) if nfft is None else nfft, n)
    w = win.coefficients
    X = np.fft.rfft(w * x, n=nfft)
    values = (X.real**2 + X.imag**2) / np.dot(w, w)
    values = _power_matched(values, nfft, signal.mean_power)
    desc = f"periodogram(window={win.kind.value},nfft={nfft},seed={signal.seed})"
    return PsdEstimate(one_sided_grid(nfft), values, desc)


def welch_segment_count(n: int, segment_len: int, overlap: float) -> tuple[int, int]:
    """Return ``(hop, K)`` for full segments only; tail samples are dropped."""
    if segment_len > n:
        raise ValueError(f"segment_len={segment_len} exceeds signal length {n}")
    if segment_len < 2:
        raise ValueError("segment_len must be >= 2")
    if not 0.0 <= overlap < 1.0:
        raise ValueError(f"overlap must lie in [0, 1), got {overlap}")
    hop_f = segment_len * (1.0 - overlap)
    hop = int(round(hop_f))
    if hop <= 0 or abs(hop - hop_f) > 1e-9:
        raise ValueError(
            f"hop segment_len*(1-overlap) = {hop_f} must be a positive integer"
        )
    return hop, (n - segment_len) // hop + 1


def welch(
    signal: Signal,
    segment_len: int = 64,
    overlap: float = 0.5,
    window_kind=WindowKind.HAMMING,
    nfft: int | None = None,
) -> PsdEstimate:
    x = signal.samples
    hop, k = welch_segment_count(x.size, segment_len, overlap)
    win = make_window(window_kind, segment_len)
    nfft = _check_nfft(next_pow2(segment_len) if nfft is None else nfft, segment_len)
    w = win.coefficients
    segs = np.lib.stride_tricks.sliding_window_view(x, segment_len)[::hop][:k]
    X = np.fft.rfft(segs * w, n=nfft, axis=1)
    values = np.mean(X.real**2 + X.imag**2, axis=0) / np.dot(w, w)
    values = _power_matched(values, nfft, signal.mean_power)
    desc = (
        f"welch(segment={segment_len},overlap={overlap!r},window={win.kind.value},"
        f"nfft={nfft},K={k},seed={signal.seed})"
    )
    return PsdEstimate(one_sided_grid(nfft), values, desc)


def biased_autocorrelation(x: np.ndarray, max_lag: int) -> np.ndarray:
    """``r[k] = (1/N) sum_n x[n] x[n+k]`` for ``k = 0..max_lag``."""
    n = x.size
    m = next_pow2(2 * n)
    X = np.fft.rfft(x, n=m)
    r = np.fft.irfft(X.real**2 + X.imag**2, n=m)[: max_lag + 1]
    return r / n


def blackman_tukey(
    signal: Signal,
    max_lag: int,
    lag_window_kind=WindowKind.HAMMING,
    nfft: int | None = None,
) -> PsdEstimate:
    """Fourier transform of the lag-windowed biased autocorrelation.

    Lag windows whose transform goes negative (Hamming, for instance) can
    produce negative densities; those are clamped to zero and the count is
    recorded in ``estimator_desc``.
    """
    x = signal.samples
    n = x.size
    if not 1 <= max_lag < n:
        raise ValueError(f"max_lag must satisfy 1 <= max_lag < {n}, got {max_lag}")
    nfft = _check_nfft(next_pow2(2 * max_lag + 1) if nfft is None else nfft, 2 * max_lag + 1)
    lag_win = make_window(lag_window_kind, 2 * max_lag + 1)
    w = lag_win.coefficients[max_lag:]
    rw = biased_autocorrelation(x, max_lag) * w
    seq = np.zeros(nfft)
    seq[: max_lag + 1] = rw
    seq[nfft - max_lag:] = rw[1:][::-1]
    values = np.fft.rfft(seq).real
    clamped = int(np.count_nonzero(values < 0))
    values = np.maximum(values, 0.0)
    values = _power_matched(values, nfft, signal.mean_power)
    desc = (
        f"blackman_tukey(max_lag={max_lag},window={lag_win.kind.value},nfft={nfft},"
        f"clamped={clamped},seed={signal.seed})"
    )
    return PsdEstimate(one_sided_grid(nfft), values, desc)
