"""Test sources and taper windows.

Frequencies are normalized so that 1.0 is Nyquist (pi rad/sample).
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class WindowKind(str, enum.Enum):
    RECTANGULAR = "rectangular"
    HAMMING = "hamming"
    HANN = "hann"
    BLACKMAN = "blackman"

    @classmethod
    def parse(cls, value: "WindowKind | str") -> "WindowKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"rect": "rectangular", "boxcar": "rectangular", "hanning": "hann"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown window kind {value!r}") from None


@dataclass(frozen=True)
class Signal:
    """A finite real sample block plus the metadata needed to regenerate it."""

    samples: np.ndarray
    source_desc: str = "custom"
    seed: int = 0

    def __post_init__(self):
        x = np.array(self.samples, dtype=float, copy=True)
        if x.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if x.size < 2:
            raise ValueError(f"signal needs at least 2 samples, got {x.size}")
        if not np.all(np.isfinite(x)):
            raise ValueError("signal contains non-finite samples")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    @property
    def length(self) -> int:
        return self.samples.size

    def __len__(self):
        return self.samples.size

    @property
    def mean_power(self) -> float:
        return float(np.dot(self.samples, self.samples) / self.samples.size)


@dataclass(frozen=True)
class Window:
    kind: WindowKind
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.array(self.coefficients, dtype=float, copy=True)
        w.setflags(write=False)
        object.__setattr__(self, "coefficients", w)

    def __len__(self):
        return self.coefficients.size


def make_tone(length: int, nu0: float, amplitude: float = 1.0, phase: float = 0.0) -> Signal:
    """Real sinusoid ``amplitude * cos(pi * nu0 * n + phase)``.

    ``nu0`` must lie strictly inside (0, 1); DC and Nyquist tones have no
    unambiguous band assignment.
    """
    if length < 2:
        raise ValueError("length must be >= 2")
    if not 0.0 < nu0 < 1.0:
        raise ValueError(f"nu0 must lie in (0, 1), got {nu0}")
    if not amplitude > 0.0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    n = np.arange(length, dtype=float)
    # reduce the cycle count modulo 2 before scaling by pi to keep long tones accurate
    cycles = np.mod(nu0 * n, 2.0)
    x = amplitude * np.cos(math.pi * cycles + phase)
    desc = f"tone(nu0={nu0!r},amplitude={amplitude!r},phase={phase!r})"
    return Signal(x, source_desc=desc, seed=0)


def make_partial_band(
    length: int,
    band_lo: float,
    band_hi: float,
    target_power: float = 1.0,
    seed: int = 0,
) -> Signal:
    """Seeded Gaussian noise brick-wall filtered to ``[band_lo, band_hi]``.

    The noise comes from numpy's PCG64 generator seeded with ``seed``. After
    masking the DFT bins outside the band, the result is rescaled so its mean
    power is exactly ``target_power``.
    """
    if length < 2:
        raise ValueError("length must be >= 2")
    if not 0.0 <= band_lo < band_hi <= 1.0:
        raise ValueError(f"need 0 <= band_lo < band_hi <= 1, got [{band_lo}, {band_hi}]")
    if band_hi - band_lo < 2.0 / length:
        raise ValueError(
            f"band [{band_lo}, {band_hi}] is narrower than one DFT bin (2/{length})"
        )
    if not target_power > 0.0:
        raise ValueError("target_power must be positive")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(length)
    spec = np.fft.rfft(noise)
    nu = 2.0 * np.arange(spec.size) / length
    spec[(nu < band_lo) | (nu > band_hi)] = 0.0
    x = np.fft.irfft(spec, n=length)
    power = np.dot(x, x) / length
    if power == 0.0:
        raise ValueError("band mask removed every DFT bin")
    x *= math.sqrt(target_power / power)
    desc = f"partial_band(lo={band_lo!r},hi={band_hi!r},power={target_power!r})"
    return Signal(x, source_desc=desc, seed=int(seed))


def make_white_noise(length: int, variance: float = 1.0, seed: int = 0) -> Signal:
    rng = np.random.default_rng(seed)
    x = math.sqrt(variance) * rng.standard_normal(length)
    return Signal(x, source_desc=f"white_noise(variance={variance!r})", seed=int(seed))


def make_window(kind: WindowKind | str, length: int) -> Window:
    """Symmetric cosine-family taper (denominator ``length - 1``)."""
    kind = WindowKind.parse(kind)
    if length < 2:
        raise ValueError("window length must be >= 2")
    if kind is WindowKind.RECTANGULAR:
        return Window(kind, np.ones(length))
    # written in terms of s = sin^2(pi n / (L-1)) so endpoints and the odd-length
    # midpoint come out exact; the cosine forms are algebraically identical
    n = np.arange(length, dtype=float)
    s = np.sin(math.pi * n / (length - 1)) ** 2
    if kind is WindowKind.HAMMING:
        w = 0.08 + 0.92 * s
    elif kind is WindowKind.HANN:
        w = s
    else:
        w = 0.36 * s + 0.64 * s * s
    w = np.minimum(w, w[::-1])  # exact symmetry
    return Window(kind, w)


def save_signal_csv(signal: Signal, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# source: {signal.source_desc}\n")
        fh.write(f"# seed: {signal.seed}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "value"])
        for i, v in enumerate(signal.samples.tolist()):
            writer.writerow([i, repr(v)])


def load_signal_csv(path: str | Path) -> Signal:
    path = Path(path)
    source_desc, seed = f"file({path.name})", 0
    values = []
    with path.open() as fh:
        lines = []
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                if key.strip() == "source":
                    source_desc = val.strip()
                elif key.strip() == "seed":
                    seed = int(val.strip())
                continue
            lines.append(line)
    reader = csv.reader(lines)
    header = next(reader)
    if [h.strip() for h in header] != ["index", "value"]:
        raise ValueError(f"{path}: expected header 'index,value', got {header}")
    for row in reader:
        if row:
            values.append(float(row[1]))
    return Signal(np.array(values), source_desc=source_desc, seed=seed)
