"""Reproducible uniform points on a torus, at exact dyadic coordinates.

Points are 53-bit integers ``u`` (so ``t = u / 2**53``). Each chunk of
``CHUNK`` points draws from its own Philox stream keyed by
``SeedSequence(seed, spawn_key=(chunk,))``, so the stream a point comes from
depends only on its index, never on the number of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

CHUNK = 1 << 16
BITS = 53
_TOP = np.uint64(1 << BITS)


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def uniform_chunk(seed: int, chunk: int, size: int, dim: int) -> np.ndarray:
    """``(size, dim)`` uint64 array of independent 53-bit integers."""
    return chunk_rng(seed, chunk).integers(0, 1 << BITS, size=(size, dim), dtype=np.uint64)


def chunk_sizes(n: int, chunk: int = CHUNK) -> list[int]:
    full, rest = divmod(int(n), chunk)
    return [chunk] * full + ([rest] if rest else [])


# -- rank-1 lattice --------------------------------------------------------------


def _p2_criterion(z: np.ndarray, N: int) -> float:
    """Worst-case squared error of the lattice for the Korobov space with alpha = 2."""
    i = np.arange(N, dtype=np.int64)
    prod = np.ones(N)
    for zk in z:
        x = (i * int(zk) % N) / N
        prod *= 1.0 + 2.0 * math.pi ** 2 * (x * x - x + 1.0 / 6.0)
    return float(prod.mean() - 1.0)


def korobov_vector(a: int, dim: int, N: int) -> np.ndarray:
    return np.array([pow(a, k, N) for k in range(dim)], dtype=np.int64)


@dataclass(frozen=True)
class RankOneLattice:
    """Shifted Korobov lattice ``t_i = frac(i z / N + shift)`` with ``N = 2**m``."""

    m: int
    z: tuple[int, ...]
    shift: tuple[int, ...]

    @property
    def N(self) -> int:
        return 1 << self.m

    def chunk(self, start: int, size: int) -> np.ndarray:
        """53-bit integer coordinates of points ``start .. start + size - 1``."""
        i = np.arange(start, start + size, dtype=np.uint64)
        z = np.array(self.z, dtype=np.uint64)
        base = (i[:, None] * z[None, :]) & np.uint64(self.N - 1)
        u = (base << np.uint64(BITS - self.m)) + np.array(self.shift, dtype=np.uint64)[None, :]
        return u & np.uint64((1 << BITS) - 1)


def rank_one_lattice(n_points: int, dim: int, seed: int, M: np.ndarray | None = None,
                     candidates: int = 16) -> RankOneLattice:
    """Pick a Korobov generator by the P2 criterion and draw a random shift.

    ``N`` is the next power of two at or above ``n_points``. Generators for
    which some row of ``M`` is orthogonal to ``z`` modulo ``N`` are skipped;
    such a row would make one torus coordinate constant along the lattice.
    """
    if n_points < 1 or dim < 1:
        raise ConfigError("lattice needs n_points >= 1 and dim >= 1")
    m = max(1, int(math.ceil(math.log2(n_points))))
    if m > BITS:
        raise ConfigError("too many lattice points")
    N = 1 << m
    rows = np.eye(dim, dtype=np.int64) if M is None else np.asarray(M, dtype=np.int64)
    shift = tuple(int(v) for v in uniform_chunk(seed, 0, 1, dim)[0])
    if dim == 1:
        if any(int(r[0]) % N == 0 for r in rows):
            raise ConfigError("subtorus direction degenerate modulo the lattice size")
        return RankOneLattice(m, (1,), shift)
    # Odd generators spread around N / golden ratio; deterministic in N.
    phi = (1 + 5 ** 0.5) / 2
    start = int(N / phi) | 1
    best = None
    for k in range(candidates * 4):
        if best is not None and k >= candidates:
            break
        a = (start + 2 * k) % N
        z = korobov_vector(a, dim, N)
        if any(int(np.dot(r, z)) % N == 0 for r in rows):
            continue
        crit = _p2_criterion(z, N)
        if best is None or crit < best[0]:
            best = (crit, z)
    if best is None:
        raise ConfigError("no admissible Korobov generator found")
    return RankOneLattice(m, tuple(int(v) for v in best[1]), shift)
