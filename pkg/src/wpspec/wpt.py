"""Wavelet-packet decomposition and the wavelet-packet PSD estimator.

Leaves are stored in natural (filter-path) order: at every stage bit 0 is
the lowpass branch and the first stage is the most significant bit.
Decimating a highpass output mirrors its band, so ascending frequency
follows a Gray-code permutation of that order; :func:`gray_order` gives it.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .filters import FilterPair
from .fourier import GRID_BINS, PsdEstimate
from .signals import Signal


class BoundaryMode(str, enum.Enum):
    PERIODIC = "periodic"
    ZEROPAD = "zeropad"

    @classmethod
    def parse(cls, value) -> "BoundaryMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown boundary mode {value!r}") from None


@dataclass(frozen=True)
class WpTree:
    depth: int
    leaves: tuple
    boundary_mode: BoundaryMode
    analyzed_length: int
    padded_length: int
    filter_name: str = "custom"
    seed: int = 0
    level_lengths: tuple = ()
    level_energies: tuple = ()

    @property
    def leaf_length(self) -> int:
        return self.leaves[0].size

    def energy(self) -> float:
        return float(sum(np.dot(s, s) for s in self.leaves))


@dataclass(frozen=True)
class WpPsd:
    """Per-band powers in ascending-frequency order plus their density view."""

    leaf_powers: np.ndarray
    leaf_width: float
    as_estimate: PsdEstimate

    @property
    def densities(self) -> np.ndarray:
        return self.as_estimate.values


def analysis_step(x, filters: FilterPair, boundary_mode=BoundaryMode.PERIODIC):
    """One filter-and-decimate stage; returns ``(approx, detail)``.

    Periodic: ``approx[k] = sum_n h[n] x[(2k+n) mod len]``, output length
    ``len/2``. ZeroPad: even samples of the full linear convolution, output
    length ``ceil((len+L-1)/2)``. Both conserve energy exactly.
    """
    mode = BoundaryMode.parse(boundary_mode)
    x = np.ascontiguousarray(x, dtype=float)
    h, g = filters.lowpass, filters.highpass
    if mode is BoundaryMode.PERIODIC:
        if x.size % 2:
            raise ValueError(f"periodic analysis needs an even-length input, got {x.size}")
        return kernels.analysis_periodic(x, h, g)
    return kernels.analysis_zeropad(x, h, g)


def synthesis_step(approx, detail, filters: FilterPair, boundary_mode, length: int):
    """Adjoint of :func:`analysis_step`; inverts it for paraunitary filters."""
    mode = BoundaryMode.parse(boundary_mode)
    a = np.ascontiguousarray(approx, dtype=float)
    d = np.ascontiguousarray(detail, dtype=float)
    h, g = filters.lowpass, filters.highpass
    if mode is BoundaryMode.PERIODIC:
        return kernels.synthesis_periodic(a, d, h, g)
    return kernels.synthesis_zeropad(a, d, h, g, length)


def max_periodic_depth(n: int, taps: int) -> int:
    """Deepest J with ``n % 2**J == 0`` and every stage input at least ``taps`` long."""
    depth = 0
    while n % (1 << (depth + 1)) == 0 and n >> depth >= taps:
        depth += 1
    return depth


def _as_samples(signal):
    if isinstance(signal, Signal):
        return signal.samples, signal.seed
    return np.asarray(signal, dtype=float), 0


def wp_decompose(signal, filters: FilterPair, depth: int, boundary_mode=BoundaryMode.PERIODIC) -> WpTree:
    """Full uniform wavelet-packet tree of ``depth`` levels."""
    mode = BoundaryMode.parse(boundary_mode)
    x, seed = _as_samples(signal)
    n = x.size
    if depth < 1:
        raise ValueError("depth must be >= 1")
    block = 1 << depth
    if mode is BoundaryMode.PERIODIC:
        if n % block:
            raise ValueError(
                f"periodic depth {depth} needs length divisible by 2**{depth}={block}; "
                f"{n} is not (max feasible depth {max_periodic_depth(n, len(filters))})"
            )
        if n >> (depth - 1) < len(filters):
            raise ValueError(
                f"periodic depth {depth} on length {n}: stage input {n >> (depth - 1)} is "
                f"shorter than filter length {len(filters)} "
                f"(max feasible depth {max_periodic_depth(n, len(filters))})"
            )
        padded = n
        nodes = [np.array(x, dtype=float)]
    else:
        padded = -(-n // block) * block
        nodes = [np.concatenate([x, np.zeros(padded - n)])]
    lengths = [nodes[0].size]
    energies = [float(np.dot(nodes[0], nodes[0]))]
    for _ in range(depth):
        nxt = []
        for node in nodes:
            a, d = analysis_step(node, filters, mode)
            nxt.append(a)
            nxt.append(d)
        nodes = nxt
        lengths.append(nodes[0].size)
        energies.append(float(sum(np.dot(s, s) for s in nodes)))
    for s in nodes:
        s.setflags(write=False)
    return WpTree(
        depth=depth,
        leaves=tuple(nodes),
        boundary_mode=mode,
        analyzed_length=n,
        padded_length=padded,
        filter_name=filters.name,
        seed=seed,
        level_lengths=tuple(lengths),
        level_energies=tuple(energies),
    )


def wp_reconstruct(tree: WpTree, filters: FilterPair) -> Signal:
    """Invert the tree with the time-reversed (adjoint) bank; returns the padded signal."""
    nodes = list(tree.leaves)
    lengths = tree.level_lengths or _default_lengths(tree, len(filters))
    for level in range(tree.depth, 0, -1):
        out_len = lengths[level - 1]
        nodes = [
            synthesis_step(nodes[i], nodes[i + 1], filters, tree.boundary_mode, out_len)
            for i in range(0, len(nodes), 2)
        ]
    return Signal(nodes[0], source_desc=f"wp_reconstruct({tree.filter_name},J={tree.depth})", seed=tree.seed)


def _default_lengths(tree: WpTree, taps: int) -> tuple:
    lengths = [tree.padded_length]
    for _ in range(tree.depth):
        if tree.boundary_mode is BoundaryMode.PERIODIC:
            lengths.append(lengths[-1] // 2)
        else:
            lengths.append((lengths[-1] + taps) // 2)
    return tuple(lengths)


def gray_order(depth: int) -> np.ndarray:
    """Frequency rank of each natural-order leaf.

    Built level by level: a node whose band arrived mirrored (odd rank) hands
    the upper half of its band to its lowpass child.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    ranks = np.array([0, 1])
    for _ in range(depth - 1):
        nxt = np.empty(2 * ranks.size, dtype=int)
        mirrored = ranks % 2
        nxt[0::2] = 2 * ranks + mirrored
        nxt[1::2] = 2 * ranks + 1 - mirrored
        ranks = nxt
    return ranks


def frequency_sequence(depth: int) -> np.ndarray:
    """Natural leaf indices listed from lowest to highest band."""
    return np.argsort(gray_order(depth))


def wp_psd(tree: WpTree) -> WpPsd:
    """Leaf power ``E_m / N'`` and density ``P_m / (1 / 2**J)`` per band."""
    nbands = 1 << tree.depth
    energies = np.array([float(np.dot(s, s)) for s in tree.leaves])
    powers = energies[frequency_sequence(tree.depth)] / tree.padded_length
    width = 1.0 / nbands
    freqs = (np.arange(nbands) + 0.5) * width
    desc = (
        f"wp(filter={tree.filter_name},J={tree.depth},boundary={tree.boundary_mode.value},"
        f"seed={tree.seed})"
    )
    est = PsdEstimate(freqs, powers / width, desc, grid_kind=GRID_BINS)
    powers.setflags(write=False)
    return WpPsd(powers, width, est)
