"""Bias constant, truncated bias signal and geometric-side sums.

Every spectral sum runs over catalog classes (one representative of
``(s, p) ~ (-s, -p)``); a class contributes ``2 mult Re(fhat(-p) e^{isy} c_s)``,
the factor 2 absorbing the conjugate representative for real ``f``.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._backend import kernels as _k
from .catalog import SpectrumCatalog
from .errors import ConfigError, ConstraintError, ParseError, PreconditionError
from .kernels import (
    HolonomyTestFunction,
    KernelScale,
    SmoothingKernel,
    c_s_eta,
    g_window,
)


@dataclass(frozen=True)
class BiasConstant:
    """``value = zero_line_contribution - trivial_contribution``."""

    value: float
    zero_line_contribution: float
    trivial_contribution: float
    c0: float


def bias_constant(catalog: SpectrumCatalog, f: HolonomyTestFunction,
                  kernel: SmoothingKernel, scale: KernelScale) -> BiasConstant:
    """``(sum_{zero classes} mult Re fhat(p) - 2 Re fhat(1)) * 2 c_{0,eta}``.

    Zero lines are stored with ``p >= 0`` and each class is counted once.
    """
    f.require_bias_mode()
    c0 = c_s_eta(kernel, scale, 0.0).value.real
    zero = sum(ln.mult * f.coeff(ln.p).real for ln in catalog.zero_lines if ln.p != 0)
    zero_part = zero * 2.0 * c0
    trivial_part = 2.0 * f.coeff(1).real * 2.0 * c0
    return BiasConstant(zero_part - trivial_part, zero_part, trivial_part, c0)


@dataclass(frozen=True)
class BiasSignal:
    """``E(y) = center + sum_j amplitude_j cos(s_j y + phase_j)``.

    ``terms[j] = mult_j fhat(-p_j) c_{s_j,eta}``, so that
    ``amplitude_j = 2 |terms_j|`` and ``phase_j = arg terms_j``. Entries follow
    the catalog line order.
    """

    frequencies: np.ndarray
    terms: np.ndarray
    center: float
    bias: BiasConstant
    eta0: float

    @property
    def amplitudes(self) -> np.ndarray:
        return 2.0 * np.abs(self.terms)

    @property
    def phases(self) -> np.ndarray:
        return np.angle(self.terms)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(y < self.eta0):
            raise PreconditionError(f"E(y) needs y >= eta0 = {self.eta0}")
        flat = np.atleast_1d(y).ravel()
        out = _k.cos_sum(flat, self.frequencies, self.amplitudes, self.phases, self.center)
        out = np.asarray(out).reshape(y.shape)
        return out if out.ndim else float(out)


def bias_signal(catalog: SpectrumCatalog, f: HolonomyTestFunction, kernel: SmoothingKernel,
                scale: KernelScale, T: float = math.inf) -> BiasSignal:
    """Precompute the terms of the truncated signal ``E^(T)``."""
    b = bias_constant(catalog, f, kernel, scale)
    lines = catalog.truncated(T).lines if math.isfinite(T) else catalog.lines
    s = np.array([ln.s for ln in lines], dtype=float)
    terms = np.array(
        [ln.mult * f.coeff(-ln.p) * c_s_eta(kernel, scale, ln.s).value for ln in lines],
        dtype=complex,
    )
    return BiasSignal(s, terms, b.value, b, scale.eta0)


def eval_ET(catalog: SpectrumCatalog, f: HolonomyTestFunction, kernel: SmoothingKernel,
            scale: KernelScale, T: float, y):
    """Truncated normalized bias signal ``E^(T)[f, g_{y,eta}]`` at ``y`` (scalar or array)."""
    if not T > 0:
        raise ConfigError(f"cutoff T must be positive, got {T}")
    return bias_signal(catalog, f, kernel, scale, T)(y)


def weyl_weight(u, theta):
    """``(e^u + e^{-u} - 2 cos theta)^{-1}``, written as ``1/(4 sinh^2(u/2) + 4 sin^2(theta/2))``.

    The rewritten form avoids cancellation for small ``u``.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise ConfigError("Weyl weight needs u > 0")
    theta = np.asarray(theta, dtype=float)
    out = 1.0 / (4.0 * np.sinh(0.5 * u) ** 2 + 4.0 * np.sin(0.5 * theta) ** 2)
    return out if out.ndim else float(out)


# -- geodesic tables -----------------------------------------------------------


@dataclass(frozen=True)
class GeodesicRecord:
    length: float
    holonomy: float
    primitive_length: float

    def __post_init__(self):
        if not (self.length > 0 and self.primitive_length > 0):
            raise ConstraintError(f"geodesic lengths must be positive: {self}")
        if not 0.0 <= self.holonomy < 2.0 * math.pi:
            raise ConstraintError(f"holonomy must lie in [0, 2pi), got {self.holonomy}")
        k = self.length / self.primitive_length
        if round(k) < 1 or abs(k - round(k)) > 1e-9 * k:
            raise ConstraintError(
                f"length {self.length} is not a multiple of primitive length {self.primitive_length}"
            )

    @property
    def power(self) -> int:
        return int(round(self.length / self.primitive_length))

    @property
    def primitive(self) -> bool:
        return self.power == 1


def load_geodesics(source) -> list[GeodesicRecord]:
    """Read a CSV table with header ``length,holonomy,primitive_length``."""
    if isinstance(source, os.PathLike) or (isinstance(source, str) and os.path.isfile(source)):
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read geodesic table: {exc}") from exc
    else:
        text = str(source)
    reader = csv.DictReader(io.StringIO(text))
    header = [h.strip() for h in reader.fieldnames or []]
    if header != ["length", "holonomy", "primitive_length"]:
        raise ParseError(f"geodesic CSV header must be 'length,holonomy,primitive_length', got {header}")
    out = []
    for n, row in enumerate(reader, start=2):
        try:
            vals = [float(row[k]) for k in ("length", "holonomy", "primitive_length")]
        except (TypeError, ValueError) as exc:
            raise ParseError(f"line {n}: {exc}") from exc
        out.append(GeodesicRecord(*vals))
    return out


WEIGHTINGS = ("plain", "length-times-f", "weyl-tilde")


@dataclass(frozen=True)
class GeometricSum:
    value: float
    normalized: float
    count: int
    weighting: str


def geometric_bias_sum(geodesics: Sequence[GeodesicRecord], f: HolonomyTestFunction,
                       kernel: SmoothingKernel, scale: KernelScale, y: float,
                       primitive_only: bool = False, weighting: str = "plain") -> GeometricSum:
    """Smoothed bias count over a geodesic table.

    ``plain`` and ``length-times-f`` are the same sum
    ``sum l g_{y,eta}(l) f(hol)``; ``weyl-tilde`` is
    ``sum l_0 w (e^l + e^{-l}) g_{y,eta}(l) f(hol)``. ``normalized`` is
    ``e^{-y}`` times the value.
    """
    if weighting not in WEIGHTINGS:
        raise ConfigError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")
    if not y > scale.eta:
        raise ConfigError(f"need y > eta, got y={y}, eta={scale.eta}")
    recs = [g for g in geodesics if g.primitive or not primitive_only]
    if not recs:
        return GeometricSum(0.0, 0.0, 0, weighting)
    ell = np.array([g.length for g in recs])
    hol = np.array([g.holonomy for g in recs])
    gv = np.zeros_like(ell)
    near = ell < y + scale.eta  # g vanishes beyond y + eta
    gv[near] = g_window(kernel, scale, y, ell[near])
    fv = np.real(f(hol))
    if weighting == "weyl-tilde":
        ell0 = np.array([g.primitive_length for g in recs])
        weight = ell0 * weyl_weight(ell, hol) * (np.exp(ell) + np.exp(-ell))
    else:
        weight = ell
    value = float(np.sum(weight * gv * fv))
    return GeometricSum(value, value * math.exp(-y), len(recs), weighting)


# -- spectral side -------------------------------------------------------------


@dataclass(frozen=True)
class TraceMainTerms:
    value: float
    spectral: float
    zero_lines: float
    trivial: float
    parity: str
    dropped_error: str = field(default="O(1/eta^2 + 1), not modeled")


def trace_rhs_spectral(catalog: SpectrumCatalog, f: HolonomyTestFunction, kernel: SmoothingKernel,
                       scale: KernelScale, y: float, parity: str = "full") -> TraceMainTerms:
    """Main terms of the spectral side for the weighted count.

    ``2 e^y sum_{classes} mult Re(fhat(-p) e^{isy} c_s) - (fhat(1) + fhat(-1)) e^y c_0``,
    where the class sum includes the ``s = 0`` lines. ``parity`` replaces
    ``f`` by its even or odd part first.
    """
    if parity == "even":
        f = f.even_part()
    elif parity == "odd":
        f = f.odd_part()
    elif parity != "full":
        raise ConfigError(f"parity must be even, odd or full, got {parity!r}")
    f.require_bias_mode()
    ey = math.exp(y)
    spectral = 0.0
    for ln in catalog.lines:
        c = c_s_eta(kernel, scale, ln.s).value
        spectral += 2.0 * ln.mult * (f.coeff(-ln.p) * complex(math.cos(ln.s * y), math.sin(ln.s * y)) * c).real
    c0 = c_s_eta(kernel, scale, 0.0).value.real
    zero = sum(2.0 * ln.mult * (f.coeff(-ln.p) * c0).real for ln in catalog.zero_lines)
    trivial = ((f.coeff(1) + f.coeff(-1)) * c0).real
    spectral, zero, trivial = ey * spectral, ey * zero, ey * trivial
    return TraceMainTerms(spectral + zero - trivial, spectral, zero, trivial, parity)
