"""Slepian tapers and the multitaper (Thomson) spectrum estimator."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.signal import fftconvolve

from .fourier import PsdEstimate, _check_nfft, _power_matched, next_pow2, one_sided_grid
from .signals import Signal


@dataclass(frozen=True)
class TaperSet:
    """Orthonormal tapers (one per row) with their spectral concentrations."""

    tapers: np.ndarray
    eigenvalues: np.ndarray
    time_bandwidth: float

    def __post_init__(self):
        q = np.atleast_2d(np.array(self.tapers, dtype=float, copy=True))
        lam = np.atleast_1d(np.array(self.eigenvalues, dtype=float, copy=True))
        if lam.shape != (q.shape[0],):
            raise ValueError("need one eigenvalue per taper")
        if not self.time_bandwidth > 0:
            raise ValueError("time_bandwidth must be positive")
        gram = q @ q.T
        err = np.max(np.abs(gram - np.eye(q.shape[0])))
        if err > 1e-9:
            raise ValueError(f"tapers are not orthonormal (max Gram error {err:.3g})")
        if np.any(lam < 0) or np.any(lam > 1):
            raise ValueError("concentrations must lie in [0, 1]")
        q.setflags(write=False)
        lam.setflags(write=False)
        object.__setattr__(self, "tapers", q)
        object.__setattr__(self, "eigenvalues", lam)

    @property
    def K(self) -> int:
        return self.tapers.shape[0]

    @property
    def M(self) -> int:
        return self.tapers.shape[1]

    @classmethod
    def from_tapers(cls, tapers, time_bandwidth: float) -> "TaperSet":
        """Wrap arbitrary orthonormal tapers, computing their concentrations."""
        q = np.atleast_2d(np.asarray(tapers, dtype=float))
        lam = concentrations(q, time_bandwidth / q.shape[1])
        return cls(q, lam, time_bandwidth)

    def permuted(self, order) -> "TaperSet":
        order = list(order)
        return TaperSet(self.tapers[order], self.eigenvalues[order], self.time_bandwidth)


def concentrations(tapers: np.ndarray, half_bandwidth: float) -> np.ndarray:
    """Fraction of each taper's energy inside ``|f| <= W`` (cycles/sample).

    Applies the sinc kernel ``sin(2 pi W (n-m)) / (pi (n-m))`` to each taper
    by FFT convolution and takes the quadratic form.
    """
    m = tapers.shape[1]
    lags = np.arange(-(m - 1), m, dtype=float)
    kernel = 2.0 * half_bandwidth * np.sinc(2.0 * half_bandwidth * lags)
    out = np.empty(tapers.shape[0])
    for k, q in enumerate(tapers):
        aq = fftconvolve(q, kernel, mode="valid") if m > 1 else kernel * q
        out[k] = float(np.dot(q, aq))
    return np.clip(out, 0.0, 1.0)


def _fix_sign(q: np.ndarray) -> np.ndarray:
    # first element that is not numerically zero is made positive
    tol = 1e-12 * np.max(np.abs(q))
    idx = int(np.argmax(np.abs(q) > tol))
    return -q if q[idx] < 0 else q


def dpss(M: int, NW: float, K: int) -> TaperSet:
    """First ``K`` discrete prolate spheroidal sequences of length ``M``.

    The tapers are eigenvectors of Slepian's symmetric tridiagonal matrix,
    which commutes with the sinc concentration matrix but is far better
    conditioned. Concentrations are then measured against the sinc kernel.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if K > 2 * NW:
        raise ValueError(f"K={K} exceeds 2*NW={2 * NW}; higher tapers are poorly concentrated")
    if M < K:
        raise ValueError(f"M={M} must be >= K={K}")
    if not 0 < NW < M / 2:
        raise ValueError(f"NW must satisfy 0 < NW < M/2, got NW={NW}, M={M}")
    W = NW / M
    n = np.arange(M, dtype=float)
    diag = ((M - 1 - 2 * n) / 2.0) ** 2 * math.cos(2 * math.pi * W)
    off = n[1:] * (M - n[1:]) / 2.0
    _, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(M - K, M - 1))
    tapers = np.array([_fix_sign(v) for v in vecs.T[::-1]])
    tapers /= np.linalg.norm(tapers, axis=1, keepdims=True)
    lam = concentrations(tapers, W)
    return TaperSet(tapers, lam, float(NW))


def mtse(signal: Signal, taper_set: TaperSet, nfft: int | None = None) -> PsdEstimate:
    """Average of the ``K`` eigenspectra ``|DFT(q_k * x)|^2``.

    Per-bin sums are taken over eigenspectra sorted by value, so the result
    does not depend on the order of the tapers in ``taper_set``.
    """
    x = signal.samples
    if taper_set.M != x.size:
        raise ValueError(f"taper length {taper_set.M} does not match signal length {x.size}")
    nfft = _check_nfft(next_pow2(x.size) if nfft is None else nfft, x.size)
    X = np.fft.rfft(taper_set.tapers * x, n=nfft, axis=1)
    eig = np.sort(X.real**2 + X.imag**2, axis=0)
    values = eig.sum(axis=0) / taper_set.K
    values = _power_matched(values, nfft, signal.mean_power)
    desc = (
        f"mtse(NW={taper_set.time_bandwidth!r},K={taper_set.K},nfft={nfft},seed={signal.seed})"
    )
    return PsdEstimate(one_sided_grid(nfft), values, desc)


def save_tapers_csv(taper_set: TaperSet, path: str | Path) -> None:
    """One taper per column, header ``taper0,taper1,...``."""
    with Path(path).open("w", newline="") as fh:
        fh.write(f"# NW: {taper_set.time_bandwidth!r}\n")
        fh.write("# eigenvalues: " + ",".join(repr(v) for v in taper_set.eigenvalues.tolist()) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"taper{k}" for k in range(taper_set.K)])
        for row in taper_set.tapers.T.tolist():
            writer.writerow([repr(v) for v in row])


def load_tapers_csv(path: str | Path) -> TaperSet:
    nw, lam, rows = None, None, []
    with Path(path).open() as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                if key.strip() == "NW":
                    nw = float(val)
                elif key.strip() == "eigenvalues":
                    lam = [float(v) for v in val.split(",")]
                continue
            if line.strip() and not line.startswith("taper"):
                rows.append([float(v) for v in line.split(",")])
    tapers = np.array(rows).T
    if nw is None:
        raise ValueError(f"{path}: missing '# NW:' header")
    if lam is None:
        return TaperSet.from_tapers(tapers, nw)
    return TaperSet(tapers, lam, nw)
