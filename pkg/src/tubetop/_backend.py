"""Kernel backend selection.

The compiled extension is used when it imports cleanly; setting
``TUBETOP_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("TUBETOP_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

sympow_matrices = _impl.sympow_matrices
pfaffian_ltl = _impl.pfaffian_ltl
phase_increments = _impl.phase_increments
