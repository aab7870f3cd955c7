"""Select the compiled kernels when available, the numpy ones otherwise.

Set ``MOCERT_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

kernels = _kernels_py
BACKEND = "python"

if os.environ.get("MOCERT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        kernels = _compiled
        BACKEND = "cython"
