"""Kernel selection: compiled extension if importable, else pure Python.

Set ``PRFLOW_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

if os.environ.get("PRFLOW_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

if _compiled is not None:
    cn_march = _compiled.cn_march
    rk4_logistic = _compiled.rk4_logistic
    BACKEND = "cython"
else:
    cn_march = _fallback.cn_march
    rk4_logistic = _fallback.rk4_logistic
    BACKEND = "python"


def implementations():
    """Map backend name -> module for every available kernel implementation."""
    out = {"python": _fallback}
    try:
        from . import _kernels
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
