"""Pure numpy versions of the hot loops.

Signatures match the compiled ``_kernels`` module one for one; see
:mod:`holobias._backend` for the selection logic. Summation over terms is
always in index order, which the support-bound check relies on.
"""

from __future__ import annotations

import numpy as np
from scipy import special

_TWO_PI = 2.0 * np.pi
_MASK53 = np.uint64((1 << 53) - 1)
_INV_2_53 = 2.0 ** -53
_BLOCK = 4096


def cos_sum(y, s, a, phi, center):
    """``center + sum_j a_j cos(s_j y_k + phi_j)`` for every ``y_k``."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    out = np.empty_like(y)
    for lo in range(0, y.size, _BLOCK):
        yb = y[lo:lo + _BLOCK]
        acc = np.zeros_like(yb)
        for sj, aj, pj in zip(s, a, phi):
            acc += aj * np.cos(sj * yb + pj)
        out[lo:lo + _BLOCK] = acc + center
    return out


def torus_points(u, M):
    """Numerators of ``x = M u mod 1`` in units of ``2**-53``.

    ``u`` has shape ``(n, r)`` with entries below ``2**53``; ``M`` is ``(d, r)``
    int64. Arithmetic wraps modulo ``2**64``, which ``2**53`` divides, so the
    low 53 bits are the exact residue.
    """
    u = np.ascontiguousarray(u, dtype=np.uint64)
    Mu = np.ascontiguousarray(M, dtype=np.int64).astype(np.uint64)
    num = np.zeros((u.shape[0], Mu.shape[0]), dtype=np.uint64)
    with np.errstate(over="ignore"):
        for k in range(Mu.shape[1]):
            num += u[:, k:k + 1] * Mu[:, k][None, :]
    return num & _MASK53


def torus_values(u, M, a, phi, center):
    """``w = sum_j a_j cos(2 pi x_j + phi_j) + center`` at the torus points of ``u``."""
    num = torus_points(u, M)
    x = num.astype(np.float64) * _INV_2_53
    acc = np.zeros(u.shape[0])
    for j in range(x.shape[1]):
        acc += a[j] * np.cos(_TWO_PI * x[:, j] + phi[j])
    return acc + center


def histogram(values, lo, hi, nbins):
    """Integer counts on ``nbins`` equal bins of ``[lo, hi]``; the top edge is closed."""
    idx = np.floor((values - lo) * (nbins / (hi - lo))).astype(np.int64)
    idx = np.clip(idx, 0, nbins - 1)
    keep = (values >= lo) & (values <= hi)
    return np.bincount(idx[keep], minlength=nbins).astype(np.int64)


def bessel_cos_integral(xi, w, a, x, center):
    """``sum_i w_i prod_j J0(a_j xi_i) cos(xi_i (x_k - center))`` for every ``x_k``."""
    xi = np.ascontiguousarray(xi, dtype=np.float64)
    prod = np.array(w, dtype=np.float64, copy=True)
    for aj in a:
        prod *= special.j0(aj * xi)
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(x)
    for lo in range(0, x.size, 64):
        d = x[lo:lo + 64] - center
        out[lo:lo + 64] = np.cos(np.outer(d, xi)) @ prod
    return out
