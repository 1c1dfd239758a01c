"""Limiting distribution of the normalized bias signal.

The signal ``E(y) = b + sum_j a_j cos(s_j y + phi_j)`` is the pullback of
``w(x) = b + sum_j a_j cos(2 pi x_j + phi_j)`` along the line
``x = s y / 2pi mod 1``. Its limiting law is the pushforward of Haar measure
on the orbit closure: the full torus when the ``s_j`` are rationally
independent, a subtorus ``x = M t`` otherwise.
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import sampling
from ._backend import kernels as _k
from .bessel import bessel_j0, j0_zeros
from .bias import bias_signal
from .catalog import RelationLattice, SpectrumCatalog, relation_lattice
from .errors import ConfigError, NumericGuardError, PreconditionError
from .kernels import HolonomyTestFunction, KernelScale, SmoothingKernel
from .quadrature import panel_nodes


@dataclass(frozen=True)
class AmplitudeSet:
    """Amplitudes ``a_j >= 0``, phases and frequencies of the cosine terms, plus the center ``b``.

    Index ``j`` is the torus coordinate of the ``j``-th catalog class.
    """

    amplitudes: np.ndarray
    center: float = 0.0
    phases: np.ndarray | None = None
    frequencies: np.ndarray | None = None

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=float).ravel()
        if np.any(~np.isfinite(a)) or np.any(a < 0):
            raise ConfigError("amplitudes must be finite and non-negative")
        phases = np.zeros_like(a) if self.phases is None else np.asarray(self.phases, dtype=float).ravel()
        if phases.shape != a.shape:
            raise ConfigError("phases and amplitudes differ in length")
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "center", float(self.center))
        if self.frequencies is not None:
            object.__setattr__(self, "frequencies", np.asarray(self.frequencies, dtype=float).ravel())

    @classmethod
    def from_catalog(cls, catalog: SpectrumCatalog, f: HolonomyTestFunction, kernel: SmoothingKernel,
                     scale: KernelScale, T: float = math.inf) -> "AmplitudeSet":
        sig = bias_signal(catalog, f, kernel, scale, T)
        return cls(sig.amplitudes, sig.center, sig.phases, sig.frequencies)

    def __len__(self):
        return self.amplitudes.size

    @property
    def positive(self) -> np.ndarray:
        return self.amplitudes[self.amplitudes > 0]

    @property
    def support_radius(self) -> float:
        """Float sum of the amplitudes in index order (the order every sampler uses)."""
        acc = 0.0
        for a in self.amplitudes:
            acc += float(a)
        return acc

    @property
    def support(self) -> tuple[float, float]:
        A = self.support_radius
        return self.center - A, self.center + A


@dataclass(frozen=True)
class BiasDistribution:
    grid: np.ndarray
    density: np.ndarray
    mass: float
    mean: float
    positive_probability: float
    method: str
    center: float = 0.0
    info: dict = field(default_factory=dict)

    def summary(self) -> dict:
        out = {
            "mass": self.mass,
            "mean": self.mean,
            "center": self.center,
            "positive_probability": self.positive_probability,
            "method": self.method,
        }
        out.update(self.info)
        return out


def _trapezoid(y, x) -> float:
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def _grid_stats(x: np.ndarray, p: np.ndarray) -> tuple[float, float, float]:
    mass = _trapezoid(p, x)
    mean = _trapezoid(x * p, x) / mass if mass > 0 else math.nan
    # Mass to the right of zero, interpolating the density at 0.
    if x[-1] <= 0:
        pos = 0.0
    elif x[0] >= 0:
        pos = mass
    else:
        k = int(np.searchsorted(x, 0.0))
        p0 = np.interp(0.0, x, p)
        xs = np.concatenate([[0.0], x[k:]])
        ps = np.concatenate([[p0], p[k:]])
        pos = _trapezoid(ps, xs)
    return mass, mean, (pos / mass if mass > 0 else math.nan)


# -- characteristic function -----------------------------------------------------


def char_fn(amps: AmplitudeSet, xi):
    """``exp(-i xi b) prod_j J0(a_j xi)``; phases do not enter under independence."""
    xi = np.asarray(xi, dtype=float)
    prod = np.ones(xi.shape)
    for a in amps.amplitudes:
        prod = prod * bessel_j0(a * xi)
    out = np.exp(-1j * xi * amps.center) * prod
    return out if out.ndim else complex(out)


def arcsine_reference(a: float, x):
    """Density ``1 / (pi sqrt(a^2 - x^2))`` of ``a cos(2 pi U)`` for uniform ``U``."""
    x = np.asarray(x, dtype=float)
    if not a > 0:
        raise ConfigError(f"arcsine law needs a > 0, got {a}")
    if np.any(np.abs(x) >= a):
        raise PreconditionError("arcsine density is only defined for |x| < a")
    out = 1.0 / (math.pi * np.sqrt((a - x) * (a + x)))
    return out if out.ndim else float(out)


def arcsine_cdf(a: float, x):
    """Distribution function of ``a cos(2 pi U)``."""
    x = np.clip(np.asarray(x, dtype=float) / a, -1.0, 1.0)
    return 0.5 + np.arcsin(x) / math.pi


# -- density by Fourier inversion --------------------------------------------------


def _envelope(a: np.ndarray, xi: float) -> float:
    return float(np.prod(np.minimum(1.0, np.sqrt(2.0 / (math.pi * a * xi)))))


def cutoff_frequency(a: np.ndarray, tail_epsilon: float) -> float:
    """Smallest ``Xi`` where ``prod_j min(1, sqrt(2 / (pi a_j Xi)))`` drops below ``tail_epsilon``."""
    lo, hi = 0.0, 2.0 / (math.pi * a.min())
    while _envelope(a, hi) >= tail_epsilon:
        lo, hi = hi, 2.0 * hi
        if hi > 1e12:
            raise NumericGuardError("characteristic function envelope decays too slowly")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _envelope(a, mid) < tail_epsilon:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi


def _zero_edges(a_min: float, Xi: float) -> np.ndarray:
    """Zeros of ``J0(a_min xi)`` below ``Xi``; McMahon's expansion beyond the first 64."""
    count = int(Xi * a_min / math.pi) + 2
    head = j0_zeros(min(count, 64))
    if count > 64:
        k = np.arange(65, count + 1, dtype=float)
        beta = (k - 0.25) * math.pi
        tail = beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta ** 3)
        head = np.concatenate([head, tail])
    z = head / a_min
    z = z[z < Xi]
    return np.concatenate([[0.0], z, [Xi]])


def inversion_nodes(a: np.ndarray, Xi: float, omega: float, order: int = 16):
    """Gauss-Legendre nodes on ``[0, Xi]``.

    Panels run between consecutive zeros of the slowest Bessel factor and
    are split so that none spans more than two periods ``4 pi / omega``; a
    16-point rule is then exact to about 1e-18 on each piece.
    """
    edges = _zero_edges(float(a.min()), Xi)
    lengths = np.diff(edges)
    pieces = np.maximum(1, np.ceil(lengths * omega / (4.0 * math.pi)).astype(np.int64))
    fine = [np.linspace(lo, hi, k + 1)[:-1] for lo, hi, k in zip(edges[:-1], edges[1:], pieces)]
    fine = np.concatenate(fine + [[Xi]])
    return panel_nodes(fine, order)


def default_grid(amps: AmplitudeSet, points: int = 401, margin: float | None = None) -> np.ndarray:
    """Symmetric grid about the center covering the support plus a margin (10% of the radius)."""
    A = amps.support_radius
    margin = 0.1 * A if margin is None else margin
    half = A + margin
    return amps.center + np.linspace(-half, half, points)


def density_inversion(amps: AmplitudeSet, grid=None, tail_epsilon: float = 1e-8,
                      margin: float | None = None, order: int = 16) -> BiasDistribution:
    """Density of the independent-coordinates law by inverting the Bessel product.

    ``p(x) = N int_0^Xi prod_j J0(a_j xi) cos(xi (x - b)) dxi``, with ``N`` fixed by
    unit mass on the grid. The fitted ``N`` is reported as ``prefactor``
    (the exact value is ``1/pi``).

    Raises
    ------
    PreconditionError
        Fewer than three positive amplitudes; use :func:`arcsine_reference`
        or :func:`sample_distribution` instead.
    ConfigError
        The grid does not cover ``[b - sum a - margin, b + sum a + margin]``.
    """
    a = amps.positive
    if a.size < 3:
        raise PreconditionError(
            f"density inversion needs at least 3 positive amplitudes, got {a.size}; "
            "use arcsine_reference for one term or the sample subcommand / sample_distribution"
        )
    b = amps.center
    A = amps.support_radius
    margin_used = 0.1 * A if margin is None else float(margin)
    x = default_grid(amps, margin=margin_used) if grid is None else np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size < 3 or np.any(np.diff(x) <= 0):
        raise ConfigError("grid must be a strictly increasing 1-d array with at least 3 points")
    lo, hi = b - A - margin_used, b + A + margin_used
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if x[0] > lo + slack or x[-1] < hi - slack:
        raise ConfigError(f"grid [{x[0]}, {x[-1]}] does not cover the support [{lo}, {hi}]")

    Xi = cutoff_frequency(a, tail_epsilon)
    omega = float(np.max(np.abs(x - b))) + float(a.sum())
    nodes, weights = inversion_nodes(a, Xi, omega, order)
    raw = np.asarray(_k.bessel_cos_integral(nodes, weights, a, x, b))
    # The same integral at the mirror images 2b - x. On a grid symmetric about
    # b those are grid points already, so the evaluation is reused.
    mirrored = 2.0 * b - x
    if np.allclose(mirrored[::-1], x, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(x).max()))):
        mirror = raw[::-1]
    else:
        mirror = np.asarray(_k.bessel_cos_integral(nodes, weights, a, mirrored, b))
    raw_mass = _trapezoid(raw, x)
    if not raw_mass > 0:
        raise NumericGuardError("inverted density has non-positive mass")
    prefactor = 1.0 / raw_mass
    p = raw * prefactor
    defect = float(np.max(np.abs(p - mirror * prefactor)))
    neg = p < 0
    min_density = float(p.min())
    p = np.where(neg, 0.0, p)
    mass, mean, pos = _grid_stats(x, p)
    info = {
        "prefactor": prefactor,
        "cutoff": Xi,
        "nodes": int(nodes.size),
        "symmetry_defect": defect,
        "clipped_points": int(neg.sum()),
        "min_density_before_clip": min_density,
        "tail_epsilon": tail_epsilon,
    }
    return BiasDistribution(x, p, mass, mean, pos, "inversion", b, info)


# -- sampling ------------------------------------------------------------------------


@dataclass(frozen=True)
class EmpiricalDistribution(BiasDistribution):
    samples: np.ndarray | None = None
    counts: np.ndarray | None = None
    n_samples: int = 0
    std: float = 0.0
    minimum: float = 0.0
    maximum: float = 0.0
    support: tuple[float, float] = (0.0, 0.0)
    points: np.ndarray | None = None

    @property
    def within_support(self) -> bool:
        lo, hi = self.support
        return lo <= self.minimum and self.maximum <= hi


def _resolve_lattice(amps: AmplitudeSet, lattice: RelationLattice | None) -> np.ndarray:
    n = len(amps)
    if lattice is None:
        return np.eye(n, dtype=np.int64)
    if lattice.n != n:
        raise PreconditionError(
            f"relation lattice has {lattice.n} coordinates but the amplitude set has {n}"
        )
    return lattice.M


def sample_distribution(amps: AmplitudeSet, lattice: RelationLattice | None = None,
                        n_samples: int = 1_000_000, seed: int = 0, bins: int = 200,
                        value_range: tuple[float, float] | None = None, qmc: bool = False,
                        keep_samples: bool = False, keep_points: bool = False,
                        workers: int = 1) -> EmpiricalDistribution:
    """Haar sampling of ``w(x) = b + sum a_j cos(2 pi x_j + phase_j)`` on ``x = M t mod 1``.

    Parameters
    ----------
    lattice : RelationLattice, optional
        ``None`` means independent coordinates (``M`` the identity).
    qmc : bool
        Use a randomly shifted rank-1 lattice with ``2**ceil(log2 n)`` points.
    keep_points : bool
        Also return the integer torus points (numerators over ``2**53``).
    workers : int
        Chunks are evaluated on this many threads; aggregation is in chunk
        order so results are identical for any worker count.
    """
    if n_samples < 1:
        raise ConfigError("n_samples must be >= 1")
    M = _resolve_lattice(amps, lattice)
    n, r = M.shape
    lo_s, hi_s = amps.support
    lo, hi = (lo_s, hi_s) if value_range is None else map(float, value_range)
    if not hi > lo:
        lo, hi = lo - 0.5, hi + 0.5  # all amplitudes zero: a point mass at b
    if r == 0 or n == 0:
        r = max(r, 1)
        M = np.zeros((n, 1), dtype=np.int64)

    if qmc:
        lat = sampling.rank_one_lattice(n_samples, r, seed, M)
        total = lat.N
        sizes = sampling.chunk_sizes(total)

        def draw(c):
            return lat.chunk(c * sampling.CHUNK, sizes[c])
    else:
        total = int(n_samples)
        sizes = sampling.chunk_sizes(total)

        def draw(c):
            return sampling.uniform_chunk(seed, c, sizes[c], r)

    a, phi, b = amps.amplitudes, amps.phases, amps.center

    def work(c):
        u = draw(c)
        w = np.asarray(_k.torus_values(u, M, a, phi, b))
        counts = np.asarray(_k.histogram(w, lo, hi, bins))
        pts = np.asarray(_k.torus_points(u, M)) if keep_points else None
        return (counts, float(np.sum(w)), float(np.sum((w - b) ** 2)), int(np.sum(w > 0)),
                float(w.min()), float(w.max()), w if keep_samples else None, pts)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, range(len(sizes))))
    else:
        results = [work(c) for c in range(len(sizes))]

    counts = np.zeros(bins, dtype=np.int64)
    s1 = s2 = 0.0
    npos = 0
    wmin, wmax = math.inf, -math.inf
    for cnt, c1, c2, cp, mn, mx, _, _ in results:
        counts += cnt
        s1 += c1
        s2 += c2
        npos += cp
        wmin, wmax = min(wmin, mn), max(wmax, mx)
    mean = s1 / total
    var = max(s2 / total - (mean - b) ** 2, 0.0)
    width = (hi - lo) / bins
    centers = lo + width * (np.arange(bins) + 0.5)
    density = counts / (total * width)
    samples = np.concatenate([res[6] for res in results]) if keep_samples else None
    points = np.concatenate([res[7] for res in results]) if keep_points else None
    info = {"n_samples": total, "seed": seed, "qmc": bool(qmc), "bins": bins,
            "min": wmin, "max": wmax, "std": math.sqrt(var)}
    return EmpiricalDistribution(
        centers, density, float(counts.sum()) / total, mean, npos / total,
        "qmc" if qmc else "montecarlo", b, info,
        samples=samples, counts=counts, n_samples=total, std=math.sqrt(var),
        minimum=wmin, maximum=wmax, support=(lo_s, hi_s), points=points,
    )


def sample_catalog(catalog: SpectrumCatalog, f: HolonomyTestFunction, kernel: SmoothingKernel,
                   scale: KernelScale, T: float = math.inf, share_equal_s: bool = False,
                   **kwargs) -> EmpiricalDistribution:
    """Sample the limiting law of a catalog, using its exact relations when it has them."""
    amps = AmplitudeSet.from_catalog(catalog, f, kernel, scale, T)
    cat = catalog.truncated(T) if math.isfinite(T) else catalog
    lattice = relation_lattice(cat, share_equal_s=share_equal_s)
    return sample_distribution(amps, lattice, **kwargs)


# -- time averages ---------------------------------------------------------------------

_INDICATOR = re.compile(r"^indicator>(.+)$")


def functional(name: str):
    """Named test functionals ``h`` for time averages.

    ``identity``, ``square``, ``one``, ``indicator>c`` (``1`` where ``x > c``) and
    ``clipped-exp`` (``exp(clip(x, -10, 10))``).
    """
    if name == "identity":
        return lambda v: v
    if name == "square":
        return lambda v: v * v
    if name == "one":
        return lambda v: np.ones_like(v)
    if name == "clipped-exp":
        return lambda v: np.exp(np.clip(v, -10.0, 10.0))
    m = _INDICATOR.match(name)
    if m:
        try:
            c = float(m.group(1))
        except ValueError as exc:
            raise ConfigError(f"bad threshold in {name!r}") from exc
        return lambda v: (v > c).astype(float)
    raise ConfigError(f"unknown functional {name!r}; use identity, square, one, indicator>c or clipped-exp")


def time_average(catalog: SpectrumCatalog, f: HolonomyTestFunction, kernel: SmoothingKernel,
                 scale: KernelScale, T: float, h: str, Y: float, grid_step: float,
                 block: int = 1 << 18) -> float:
    """``(1/(Y - eta0)) int_{eta0}^{Y} h(E^(T)(y)) dy`` by the composite trapezoid rule.

    The step actually used is ``(Y - eta0) / ceil((Y - eta0) / grid_step)``.

    Raises
    ------
    NumericGuardError
        If ``grid_step > pi / (4 max |s|)``.
    """
    hfun = functional(h)
    sig = bias_signal(catalog, f, kernel, scale, T)
    y0 = scale.eta0
    if not Y > y0:
        raise ConfigError(f"need Y > eta0, got Y={Y}, eta0={y0}")
    if not grid_step > 0:
        raise ConfigError("grid_step must be positive")
    smax = float(np.max(np.abs(sig.frequencies))) if sig.frequencies.size else 0.0
    if smax > 0 and grid_step > math.pi / (4.0 * smax):
        raise NumericGuardError(
            f"grid_step {grid_step:g} under-resolves the fastest oscillation; "
            f"need <= pi/(4 max|s|) = {math.pi / (4.0 * smax):.6g}"
        )
    intervals = int(math.ceil((Y - y0) / grid_step))
    step = (Y - y0) / intervals
    total = 0.0
    weight = 0.0
    for lo in range(0, intervals + 1, block):
        idx = np.arange(lo, min(lo + block, intervals + 1))
        y = y0 + step * idx
        y[idx == intervals] = Y
        w = np.where((idx == 0) | (idx == intervals), 0.5, 1.0)
        total += float(np.dot(w, hfun(np.asarray(sig(y)))))
        weight += float(w.sum())
    return total / weight


def torus_expectation(amps: AmplitudeSet, h: str, lattice: RelationLattice | None = None,
                      n_samples: int = 1_000_000, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo ``E h(w)`` on the orbit closure, with its standard error."""
    hfun = functional(h)
    emp = sample_distribution(amps, lattice, n_samples, seed, keep_samples=True)
    vals = hfun(emp.samples)
    return float(vals.mean()), float(vals.std() / math.sqrt(vals.size))

