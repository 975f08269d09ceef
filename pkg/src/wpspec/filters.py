"""Paraunitary two-channel filter pairs.

Built-in Daubechies filters are generated, not tabulated: the maxflat
half-band polynomial is factored in extended precision and the
minimum-phase half is kept.
"""
from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np

BUILTIN_NAMES = ("haar",) + tuple(f"db{n}" for n in range(2, 16))


class FilterError(ValueError):
    pass


def alternating_flip(h: np.ndarray) -> np.ndarray:
    """``g[n] = (-1)^n h[L-1-n]``."""
    g = h[::-1].copy()
    g[1::2] = -g[1::2]
    return g


def orthonormality_residuals(h: np.ndarray) -> np.ndarray:
    """``|sum_n h[n] h[n+2k] - delta_k|`` for ``k = 0 .. L/2-1``."""
    taps = h.size
    res = np.empty(taps // 2)
    for k in range(taps // 2):
        s = float(np.dot(h[: taps - 2 * k], h[2 * k:]))
        res[k] = abs(s - (1.0 if k == 0 else 0.0))
    return res


@dataclass(frozen=True)
class FilterPair:
    """Analysis lowpass/highpass pair of an orthogonal two-channel bank."""

    lowpass: np.ndarray
    highpass: np.ndarray = field(repr=False)
    name: str = "custom"
    tol: float = field(default=1e-9, repr=False, compare=False)

    def __post_init__(self):
        h = np.array(self.lowpass, dtype=float, copy=True)
        g = np.array(self.highpass, dtype=float, copy=True)
        if h.ndim != 1 or h.size < 2:
            raise FilterError(f"{self.name}: lowpass needs at least 2 taps")
        if h.size % 2:
            raise FilterError(f"{self.name}: filter length {h.size} is odd")
        if not np.array_equal(g, alternating_flip(h)):
            raise FilterError(f"{self.name}: highpass is not the alternating flip of lowpass")
        s = float(h.sum())
        if abs(s - math.sqrt(2.0)) > self.tol:
            raise FilterError(f"{self.name}: sum(h) = {s!r}, expected sqrt(2)")
        res = orthonormality_residuals(h)
        worst = int(np.argmax(res))
        if res[worst] > self.tol:
            raise FilterError(
                f"{self.name}: not paraunitary, shift k={worst} has residual {res[worst]:.3g}"
            )
        h.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "lowpass", h)
        object.__setattr__(self, "highpass", g)

    @classmethod
    def from_lowpass(cls, h, name: str = "custom", tol: float = 1e-9) -> "FilterPair":
        h = np.asarray(h, dtype=float)
        if h.size % 2:
            raise FilterError(f"{name}: filter length {h.size} is odd")
        return cls(h, alternating_flip(h), name, tol)

    def __len__(self):
        return self.lowpass.size

    def __eq__(self, other):
        if not isinstance(other, FilterPair):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.lowpass, other.lowpass)

    def __hash__(self):
        return hash((self.name, self.lowpass.tobytes()))


@functools.lru_cache(maxsize=None)
def daubechies_lowpass(order: int) -> tuple[float, ...]:
    """Minimum-phase Daubechies lowpass with ``order`` vanishing moments.

    Roots of ``P(y) = sum_k C(order-1+k, k) y^k`` are mapped through
    ``y = (2 - z - 1/z) / 4``; the root inside the unit circle is kept.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    with mpmath.workdps(60):
        zeros = []
        if order > 1:
            # mpmath.polyroots wants the leading coefficient first
            coeffs = [mpmath.binomial(order - 1 + k, k) for k in range(order)][::-1]
            ys = mpmath.polyroots(coeffs, maxsteps=400, extraprec=400)
            for y in ys:
                b = 1 - 2 * mpmath.mpc(y)
                disc = mpmath.sqrt(b * b - 1)
                z1, z2 = b + disc, b - disc
                zeros.append(z1 if abs(z1) < 1 else z2)
        zeros.sort(key=lambda z: (float(abs(z)), float(mpmath.arg(z))))
        poly = [mpmath.mpc(1)]
        for z in [mpmath.mpc(-1)] * order + zeros:
            # multiply by (x - z), coefficients in descending powers
            nxt = poly + [mpmath.mpc(0)]
            for i in range(1, len(nxt)):
                nxt[i] -= z * poly[i - 1]
            poly = nxt
        total = mpmath.fsum(poly)
        scale = mpmath.sqrt(2) / total
        return tuple(float(mpmath.re(c * scale)) for c in poly)


def builtin_filter(name: str) -> FilterPair:
    key = name.strip().lower()
    if key in ("haar", "db1"):
        r = 1.0 / math.sqrt(2.0)
        return FilterPair.from_lowpass([r, r], "haar")
    m = re.fullmatch(r"db(\d+)", key)
    if m and 2 <= int(m.group(1)) <= 15:
        return FilterPair.from_lowpass(daubechies_lowpass(int(m.group(1))), key)
    raise FilterError(f"unknown built-in filter {name!r}; choose from {', '.join(BUILTIN_NAMES)}")


def read_coefficient_file(path: str | Path) -> np.ndarray:
    """One lowpass coefficient per line; ``#`` starts a comment."""
    vals = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            vals.append(float(line))
        except ValueError:
            raise FilterError(f"{path}:{lineno}: not a number: {line!r}") from None
    return np.array(vals)


def load_filter(name_or_path: str | Path) -> FilterPair:
    """Built-in name (``haar``, ``db2`` .. ``db15``) or path to a coefficient file.

    Coefficient files are checked to 1e-6: the lowpass must sum to sqrt(2)
    and be orthogonal to its even shifts.
    """
    text = str(name_or_path)
    path = Path(text)
    if path.is_file():
        h = read_coefficient_file(path)
        return FilterPair.from_lowpass(h, name=path.stem, tol=1e-6)
    return builtin_filter(text)
