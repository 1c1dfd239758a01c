"""Pick the compiled kernels when available, numpy otherwise.

Set ``HOLOBIAS_FORCE_PYTHON=1`` to force the numpy fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
kernels = _kernels_py

if os.environ.get("HOLOBIAS_FORCE_PYTHON", "") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        kernels = _compiled
        BACKEND = "cython"


def get(name: str):
    """Return the backend module by name (``"python"`` or ``"cython"``)."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
