"""Wavelet-packet and classical power-spectral-density estimation."""
__version__ = "0.1.0"

from .filters import FilterPair, builtin_filter, load_filter  # noqa: E402
from .fourier import PsdEstimate, blackman_tukey, dft, idft, periodogram, welch  # noqa: E402
from .metrics import BandSpec, MetricsReport, Scenario, compare, evaluate  # noqa: E402
from .multitaper import TaperSet, dpss, mtse  # noqa: E402
from .signals import Signal, WindowKind, make_partial_band, make_tone, make_white_noise, make_window  # noqa: E402
from .wpt import BoundaryMode, WpTree, frequency_sequence, gray_order, wp_decompose, wp_psd, wp_reconstruct  # noqa: E402

__all__ = [
    "BandSpec", "BoundaryMode", "FilterPair", "MetricsReport", "PsdEstimate", "Scenario", "Signal",
    "TaperSet", "WindowKind", "WpTree", "blackman_tukey", "builtin_filter", "compare", "dft", "dpss",
    "evaluate", "frequency_sequence", "gray_order", "idft", "load_filter", "make_partial_band",
    "make_tone", "make_white_noise", "make_window", "mtse", "periodogram", "welch", "wp_decompose",
    "wp_psd", "wp_reconstruct",
]
