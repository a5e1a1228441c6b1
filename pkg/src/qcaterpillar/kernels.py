"""Selects the compiled kernel module when available.

Set ``QCAT_PURE_PYTHON=1`` to force the pure-Python fallback.
"""
import os

from . import _kernels_py

if os.environ.get("QCAT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

bareiss_det = _impl.bareiss_det
horner_eval = _impl.horner_eval
sign_variations = _impl.sign_variations
