"""Exact integer linear algebra on lists of Python ints.

Only what the relation analysis needs: row-style Hermite normal form with the
unimodular transform, integer kernels (which come out saturated because the
transform is unimodular), and rank.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

Matrix = list[list[int]]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hermite_normal_form(A: Matrix) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form ``H = U A`` with ``U`` unimodular.

    Pivots are positive, entries above a pivot are reduced into
    ``[0, pivot)``, and zero rows sit at the bottom.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    H = [list(map(int, row)) for row in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if H[i][c] == 0:
                continue
            a, b = H[r][c], H[i][c]
            g, x, y = _xgcd(a, b)
            p, q = a // g, b // g
            # [[x, y], [-q, p]] has determinant x*p + y*q = 1
            for M in (H, U):
                ri, rj = M[r], M[i]
                M[r] = [x * u + y * v for u, v in zip(ri, rj)]
                M[i] = [-q * u + p * v for u, v in zip(ri, rj)]
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-v for v in H[r]]
            U[r] = [-v for v in U[r]]
        piv = H[r][c]
        for i in range(r):
            f = H[i][c] // piv
            if f:
                H[i] = [u - f * v for u, v in zip(H[i], H[r])]
                U[i] = [u - f * v for u, v in zip(U[i], U[r])]
        r += 1
    return H, U


def rank(A: Matrix) -> int:
    if not A:
        return 0
    H, _ = hermite_normal_form(A)
    return sum(1 for row in H if any(row))


def left_kernel(A: Matrix, ncols: int | None = None) -> Matrix:
    """Basis (as rows) of the lattice ``{k in Z^m : k A = 0}``.

    The basis spans the full integer solution lattice, i.e. it is saturated.
    ``ncols`` is only needed when ``A`` has zero columns.
    """
    m = len(A)
    if m == 0:
        return []
    n = len(A[0]) if ncols is None else ncols
    if n == 0:
        return [[int(i == j) for j in range(m)] for i in range(m)]
    H, U = hermite_normal_form(A)
    kernel = [U[i] for i in range(m) if not any(H[i])]
    if not kernel:
        return []
    # Canonical, readable basis for the same lattice.
    Hk, _ = hermite_normal_form(kernel)
    return [row for row in Hk if any(row)]


def right_kernel(A: Matrix, ncols: int) -> Matrix:
    """Basis (as rows) of ``{v in Z^n : A v = 0}`` for an ``m x n`` matrix."""
    if not A:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    At = [list(col) for col in zip(*A)]
    return left_kernel(At, ncols=len(A))


def clear_denominators(rows: list[list[Fraction]]) -> Matrix:
    """Scale each column by the lcm of its denominators; the left kernel is unchanged."""
    if not rows:
        return []
    ncols = len(rows[0])
    scales = [lcm(*(Fraction(r[j]).denominator for r in rows)) for j in range(ncols)]
    return [[int(Fraction(r[j]) * scales[j]) for j in range(ncols)] for r in rows]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]
