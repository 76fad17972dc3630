"""Kernel backend selection.

The compiled extension is used when importable; setting ``BVINF_PURE_PYTHON=1``
forces the pure-Python fallback.
"""

import os

from . import _pykernels

if os.environ.get("BVINF_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _pykernels
        BACKEND = "python"

mono_mul = _impl.mono_mul
mul_terms = _impl.mul_terms
koszul_sign = _impl.koszul_sign
set_partitions = _impl.set_partitions
