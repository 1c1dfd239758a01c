"""Bessel function J0 with a range guard.

Evaluation is delegated to :func:`scipy.special.j0` (Cephes rational
approximations, absolute error near 1e-16 on the range used here).
"""

from __future__ import annotations

import numpy as np
from scipy import special

from .errors import NumericGuardError

J0_RANGE = 1e8


def bessel_j0(x):
    """``J0(x)`` for ``|x| <= 1e8``; even in ``x``.

    Raises
    ------
    NumericGuardError
        If any argument lies outside the guarded range or is not finite.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.abs(arr) <= J0_RANGE):
        raise NumericGuardError(f"J0 argument outside |x| <= {J0_RANGE:g}")
    out = special.j0(np.abs(arr))
    return out if out.ndim else float(out)


def j0_zeros(n: int) -> np.ndarray:
    """First ``n`` positive zeros of ``J0``."""
    return special.jn_zeros(0, n)
