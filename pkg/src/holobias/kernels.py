"""Smoothing kernel, window transforms and holonomy test functions.

Conventions
-----------
* Circle: ``fhat(p) = (1/2pi) int_0^{2pi} f(theta) exp(-i p theta) dtheta``.
* Line: ``psihat(xi) = int psi(t) exp(-2 pi i xi t) dt``.

Both meet in the entire function ``Psi(z) = int psi(t) exp(z t) dt`` so that
``psihat(xi) = Psi(-2 pi i xi)`` and ``c_{s,eta} = Psi(eta (1 + i s)) / (1 + i s)``.
Everything below is phrased through ``Psi`` to keep the two conventions from
drifting apart.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np

from .errors import BiasModeError, ConfigError, NumericGuardError, ParseError
from .quadrature import gauss_legendre, tanh_sinh

OVERFLOW_GUARD = 700.0
_SMALL_S = 1e-8


def _bump_shape(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(-1.0 / ((1.0 - ti) * (1.0 + ti)))
    return out


_SHAPES: dict[str, Callable[[np.ndarray], np.ndarray]] = {"bump": _bump_shape}


@lru_cache(maxsize=None)
def _normalization(kind: str) -> float:
    shape = _SHAPES[kind]
    return 1.0 / (2.0 * tanh_sinh(shape, 0.0, 1.0, tol=1e-15))


@dataclass(frozen=True)
class SmoothingKernel:
    """Even, smooth, non-negative bump supported on [-1, 1] with unit mass."""

    kind: str = "bump"

    def __post_init__(self):
        if self.kind not in _SHAPES:
            raise ConfigError(f"unknown kernel kind {self.kind!r}; available: {sorted(_SHAPES)}")

    @property
    def normalization(self) -> float:
        return _normalization(self.kind)

    def __call__(self, t):
        return self.normalization * _SHAPES[self.kind](t)

    def cdf(self, u) -> np.ndarray:
        """``int_{-1}^u psi``, exact 0 / 1 outside the support."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.where(u >= 1.0, 1.0, 0.0)
        for k in np.flatnonzero(np.abs(u) < 1.0):
            uk = abs(u[k])
            part = tanh_sinh(self, 0.0, uk, tol=1e-15) if uk > 0 else 0.0
            out[k] = 0.5 + math.copysign(part, u[k])
        return out


@dataclass(frozen=True)
class KernelScale:
    eta: float
    eta0: float | None = None

    def __post_init__(self):
        eta0 = self.eta if self.eta0 is None else self.eta0
        object.__setattr__(self, "eta0", float(eta0))
        if not (self.eta > 0 and self.eta <= self.eta0):
            raise ConfigError(f"need 0 < eta <= eta0, got eta={self.eta}, eta0={self.eta0}")


def kernel_eval(kernel: SmoothingKernel, scale: KernelScale, t):
    """``psi_eta(t) = psi(t / eta) / eta``; zero for ``|t| >= eta``."""
    t = np.asarray(t, dtype=float)
    out = kernel(t / scale.eta) / scale.eta
    return out if out.ndim else float(out)


@lru_cache(maxsize=4096)
def _laplace_cached(kind: str, z: complex) -> complex:
    kernel = SmoothingKernel(kind)
    # psi is even, so Psi(z) = 2 int_0^1 psi(t) cosh(z t) dt; keeps Psi(i w) real.
    panels = max(1, int(math.ceil(abs(z.imag) / (4.0 * math.pi))))
    if z.imag == 0.0:
        val = tanh_sinh(lambda t: kernel(t) * np.cosh(z.real * t), 0.0, 1.0,
                        tol=1e-14, rtol=1e-15, panels=panels)
        return complex(2.0 * val, 0.0)
    if z.real == 0.0:
        val = tanh_sinh(lambda t: kernel(t) * np.cos(z.imag * t), 0.0, 1.0,
                        tol=1e-14, rtol=1e-15, panels=panels)
        return complex(2.0 * val, 0.0)
    val = tanh_sinh(lambda t: kernel(t) * np.cosh(z * t), 0.0, 1.0,
                    tol=1e-14, rtol=1e-15, panels=panels)
    return 2.0 * complex(val)


def laplace_psi(kernel: SmoothingKernel, z: complex) -> complex:
    """Entire extension ``Psi(z) = int_{-1}^{1} psi(t) exp(z t) dt``.

    ``Psi(0) = 1`` and ``Psi(conj z) = conj Psi(z)``. Raises
    :class:`NumericGuardError` when ``|Re z| > 700``.
    """
    z = complex(z)
    if abs(z.real) > OVERFLOW_GUARD:
        raise NumericGuardError(f"|Re z| = {abs(z.real):g} exceeds overflow guard {OVERFLOW_GUARD:g}")
    if z.imag < 0:
        return _laplace_cached(kernel.kind, z.conjugate()).conjugate()
    return _laplace_cached(kernel.kind, z)


def psi_hat(kernel: SmoothingKernel, xi: float) -> complex:
    """Fourier transform with the ``exp(-2 pi i xi t)`` convention."""
    return laplace_psi(kernel, complex(0.0, -2.0 * math.pi * xi))


@dataclass(frozen=True)
class SmoothingConstant:
    s: float
    eta: float
    value: complex

    def __complex__(self):
        return self.value

    def __abs__(self):
        return abs(self.value)


def c_s_eta(kernel: SmoothingKernel, scale: KernelScale, s: float) -> SmoothingConstant:
    """``c_{s,eta} = Psi(eta (1 + i s)) / (1 + i s)``."""
    w = complex(1.0, s)
    return SmoothingConstant(float(s), scale.eta, laplace_psi(kernel, scale.eta * w) / w)


def c_s_eta_direct(kernel: SmoothingKernel, scale: KernelScale, s: float, nodes: int = 48) -> complex:
    """``int psi_eta(t) exp(t (1 + i s)) / (1 + i s) dt`` straight from the definition.

    Composite Gauss-Legendre in the original variable ``t`` over
    ``[-eta, eta]``; kept independent of :func:`laplace_psi` so the two can
    cross-check each other.
    """
    eta = scale.eta
    w = complex(1.0, s)
    panels = max(4, int(math.ceil(abs(s) * eta / math.pi)) * 2)

    def integrand(t):
        return kernel_eval(kernel, scale, t) * np.exp(t * w)

    return complex(gauss_legendre(integrand, -eta, eta, n=nodes, panels=panels)) / w


def window_transform(kind: str, kernel: SmoothingKernel, scale: KernelScale, y: float, s: float) -> complex:
    """``int W(x) exp(i s x) dx`` for the smoothed windows ``W = g_{y,eta}`` or ``h_{y,eta}``.

    ``g``: ``2 psihat(-eta s / 2pi) sin(s y) / s``;
    ``h``: ``2 psihat(-eta s / 2pi) (cos(s y) - 1) / (i s)``.
    Removable singularities at ``s = 0`` are evaluated by series.
    """
    if not y > scale.eta:
        raise ConfigError(f"window transform needs y > eta (y={y}, eta={scale.eta})")
    ph = laplace_psi(kernel, complex(0.0, scale.eta * s)).real
    x = s * y
    if kind == "g":
        if abs(s) < _SMALL_S:
            ratio = y * (1.0 - x * x / 6.0)
        else:
            ratio = math.sin(x) / s
        return complex(2.0 * ph * ratio, 0.0)
    if kind == "h":
        if abs(s) < _SMALL_S:
            ratio = complex(0.0, 0.5 * s * y * y * (1.0 - x * x / 12.0))
        else:
            ratio = (math.cos(x) - 1.0) / complex(0.0, s)
        return 2.0 * ph * ratio
    raise ConfigError(f"window kind must be 'g' or 'h', got {kind!r}")


def g_window(kernel: SmoothingKernel, scale: KernelScale, y: float, x) -> np.ndarray:
    """``g_{y,eta} = psi_eta * 1_{[-y, y]}``; exactly 1 on ``|x| <= y - eta``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    eta = scale.eta
    return kernel.cdf((x + y) / eta) - kernel.cdf((x - y) / eta)


def h_window(kernel: SmoothingKernel, scale: KernelScale, y: float, x) -> np.ndarray:
    """``h_{y,eta} = psi_eta * (sgn . 1_{[-y, y]})``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    eta = scale.eta
    return 2.0 * kernel.cdf(x / eta) - kernel.cdf((x - y) / eta) - kernel.cdf((x + y) / eta)


# -- holonomy test functions ---------------------------------------------------


@dataclass(frozen=True)
class HolonomyTestFunction:
    """Trigonometric polynomial on the circle, stored by Fourier coefficients."""

    coeffs: Mapping[int, complex] = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        clean = {int(p): complex(c) for p, c in dict(self.coeffs).items() if c != 0}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def cos(cls, k: int) -> "HolonomyTestFunction":
        if k == 0:
            return cls({0: 1.0}, label="cos:0")
        return cls({k: 0.5, -k: 0.5}, label=f"cos:{k}")

    @classmethod
    def sin(cls, k: int) -> "HolonomyTestFunction":
        if k == 0:
            return cls({}, label="sin:0")
        return cls({k: -0.5j, -k: 0.5j}, label=f"sin:{k}")

    @classmethod
    def from_table(cls, rows) -> "HolonomyTestFunction":
        """From ``[{"p": int, "re": float, "im": float}, ...]``; repeated p accumulate."""
        coeffs: dict[int, complex] = {}
        try:
            for row in rows:
                p = row["p"]
                if isinstance(p, bool) or int(p) != p:
                    raise ParseError(f"coefficient index must be an integer, got {p!r}")
                coeffs[int(p)] = coeffs.get(int(p), 0) + complex(float(row.get("re", 0.0)),
                                                               float(row.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad coefficient table: {exc}") from exc
        return cls(coeffs, label="table")

    @classmethod
    def parse(cls, spec: str) -> "HolonomyTestFunction":
        """Parse ``cos:k``, ``sin:k``, a JSON table, or ``@path`` to a JSON table."""
        spec = spec.strip()
        if spec.startswith("@"):
            try:
                with open(spec[1:], encoding="utf-8") as fh:
                    spec = fh.read()
            except OSError as exc:
                raise ParseError(f"cannot read test function file: {exc}") from exc
        for name in ("cos", "sin"):
            if spec.startswith(name + ":"):
                try:
                    k = int(spec[len(name) + 1:])
                except ValueError as exc:
                    raise ParseError(f"bad harmonic in {spec!r}") from exc
                return getattr(cls, name)(k)
        try:
            rows = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ParseError(f"unrecognised test function {spec!r}") from exc
        return cls.from_table(rows)

    def coeff(self, p: int) -> complex:
        return self.coeffs.get(int(p), 0j)

    @property
    def mean(self) -> complex:
        return self.coeff(0)

    def is_real(self, tol: float = 1e-15) -> bool:
        return all(abs(c - self.coeff(-p).conjugate()) <= tol for p, c in self.coeffs.items())

    def require_bias_mode(self, tol: float = 1e-14):
        if abs(self.mean) > tol:
            raise BiasModeError(f"bias mode needs fhat(0) = 0, got {self.mean}")
        if not self.is_real():
            raise BiasModeError("bias mode needs a real-valued test function")

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=complex)
        for p, c in self.coeffs.items():
            out += c * np.exp(1j * p * theta)
        if self.is_real():
            out = out.real
        return out if out.ndim else out[()]

    def __neg__(self):
        return HolonomyTestFunction({p: -c for p, c in self.coeffs.items()}, label=f"-({self.label})")

    def even_part(self) -> "HolonomyTestFunction":
        keys = set(self.coeffs) | {-p for p in self.coeffs}
        return HolonomyTestFunction({p: 0.5 * (self.coeff(p) + self.coeff(-p)) for p in keys})

    def odd_part(self) -> "HolonomyTestFunction":
        keys = set(self.coeffs) | {-p for p in self.coeffs}
        return HolonomyTestFunction({p: 0.5 * (self.coeff(p) - self.coeff(-p)) for p in keys})

    def to_table(self) -> list[dict]:
        return [{"p": p, "re": c.real, "im": c.imag} for p, c in self.coeffs.items()]


def fourier_coeff(f, p: int, tol: float = 1e-13, max_points: int = 1 << 16) -> complex:
    """Circle Fourier coefficient ``fhat(p)``.

    Exact lookup for a :class:`HolonomyTestFunction`; for a plain callable the
    periodic trapezoid rule is refined by doubling until two successive
    values agree to ``tol``.
    """
    if isinstance(f, HolonomyTestFunction):
        return f.coeff(p)
    n = 64
    prev = None
    while n <= max_points:
        theta = 2.0 * math.pi * np.arange(n) / n
        vals = np.asarray(f(theta))
        if vals.shape != theta.shape:
            vals = np.broadcast_to(vals, theta.shape)
        re = np.mean(vals * np.cos(p * theta))
        im = -np.mean(vals * np.sin(p * theta))
        cur = complex(re, im)
        if prev is not None and abs(cur - prev) <= tol:
            return cur
        prev = cur
        n *= 2
    raise NumericGuardError(f"Fourier coefficient p={p} did not converge with {max_points} points")


def sample_test_function(func, max_p: int = 64, tol: float = 1e-13) -> HolonomyTestFunction:
    """Sample a smooth closed form into a coefficient table (coefficients below ``tol`` dropped)."""
    coeffs = {}
    for p in range(-max_p, max_p + 1):
        c = fourier_coeff(func, p)
        c = complex(c.real if abs(c.real) > tol else 0.0, c.imag if abs(c.imag) > tol else 0.0)
        if c:
            coeffs[p] = c
    return HolonomyTestFunction(coeffs, label="sampled")
