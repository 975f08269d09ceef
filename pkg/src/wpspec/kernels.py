"""Backend selection for the filter-bank kernels.

The compiled extension is used when it imports; set ``WPSPEC_PURE_PYTHON=1``
to force the NumPy fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("WPSPEC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

analysis_periodic = _impl.analysis_periodic
synthesis_periodic = _impl.synthesis_periodic
analysis_zeropad = _impl.analysis_zeropad
synthesis_zeropad = _impl.synthesis_zeropad

python_backend = _kernels_py


def compiled_backend():
    """The compiled module, or ``None`` if it was not built."""
    try:
        from . import _kernels

        return _kernels
    except ImportError:
        return None
