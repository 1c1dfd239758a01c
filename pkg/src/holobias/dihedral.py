"""Hecke characters of Q(zeta_12) with archimedean parameters in arithmetic progression.

Arithmetic happens in Z[zeta] with ``zeta = exp(2 pi i / 12)``, reduced by
``zeta^4 = zeta^2 - 1``, and in the residue fields at primes ``a + i`` of
Z[i] that stay inert in Q(zeta_12). Roots of unity are carried as exact
rational exponents ``r`` (standing for ``exp(2 pi i r)``), so every
finite-place computation is exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .catalog import ExactFrequency, SpectralLine, SpectrumCatalog
from .errors import ConfigError, PreconditionError

ZETA12 = cmath.exp(2j * math.pi / 12)


@dataclass(frozen=True)
class CyclotomicElement:
    """``a0 + a1 zeta + a2 zeta^2 + a3 zeta^3`` in Z[zeta_12]."""

    coeffs: tuple[int, int, int, int]

    def __post_init__(self):
        c = tuple(int(v) for v in self.coeffs)
        if len(c) != 4:
            raise ConfigError("a cyclotomic element has exactly four coefficients")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def of(cls, *coeffs: int) -> "CyclotomicElement":
        c = list(coeffs) + [0] * (4 - len(coeffs))
        return cls(tuple(c))

    def __mul__(self, other: "CyclotomicElement") -> "CyclotomicElement":
        return cyclo_mul(self, other)

    def __add__(self, other: "CyclotomicElement") -> "CyclotomicElement":
        return CyclotomicElement(tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CyclotomicElement") -> "CyclotomicElement":
        return CyclotomicElement(tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CyclotomicElement":
        return CyclotomicElement(tuple(-x for x in self.coeffs))

    def __pow__(self, k: int) -> "CyclotomicElement":
        if k < 0:
            raise ConfigError("negative powers are not defined in Z[zeta_12]")
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def embed(self, zeta: complex = ZETA12) -> complex:
        """Complex value under ``zeta -> exp(2 pi i / 12)`` (or another primitive root)."""
        return sum(c * zeta ** k for k, c in enumerate(self.coeffs))


def cyclo_mul(x: CyclotomicElement, y: CyclotomicElement) -> CyclotomicElement:
    """Exact product, reduced to degree at most 3 with ``zeta^4 = zeta^2 - 1``."""
    prod = [0] * 7
    for i, a in enumerate(x.coeffs):
        if a:
            for j, b in enumerate(y.coeffs):
                prod[i + j] += a * b
    for k in range(6, 3, -1):
        c = prod[k]
        if c:
            prod[k - 2] += c
            prod[k - 4] -= c
            prod[k] = 0
    return CyclotomicElement(tuple(prod[:4]))


ONE = CyclotomicElement.of(1)
ZETA = CyclotomicElement.of(0, 1)
SQRT3 = CyclotomicElement.of(0, 2, 0, -1)  # 2 zeta - zeta^3
FUNDAMENTAL_UNIT = CyclotomicElement.of(2) + SQRT3  # 2 + sqrt 3


# -- residue fields ------------------------------------------------------------------


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class ResidueField:
    """``Z[zeta_12] / (a + i)`` for a rational prime ``q = a^2 + 1`` with 3 a non-residue.

    Elements are pairs ``(c0, c1)`` meaning ``c0 + c1 zeta`` modulo ``q``. Since
    ``i = zeta^3``, the ideal contains ``a + zeta^3``, so ``zeta^3 = -a`` and,
    multiplying ``zeta^4 = zeta^2 - 1`` through, ``zeta^2 = 1 - a zeta``.
    """

    q: int
    a: int

    @property
    def rule(self) -> tuple[int, int]:
        """``(r0, r1)`` with ``zeta^2 = r0 + r1 zeta``."""
        return 1 % self.q, (-self.a) % self.q

    @property
    def size(self) -> int:
        return self.q * self.q

    @property
    def group_order(self) -> int:
        return self.q * self.q - 1

    def elem(self, c0: int, c1: int = 0) -> tuple[int, int]:
        return c0 % self.q, c1 % self.q

    def mul(self, x, y) -> tuple[int, int]:
        q = self.q
        r0, r1 = self.rule
        x0, x1 = x
        y0, y1 = y
        t = x1 * y1
        return (x0 * y0 + t * r0) % q, (x0 * y1 + x1 * y0 + t * r1) % q

    def pow(self, x, k: int) -> tuple[int, int]:
        out, base = (1 % self.q, 0), x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def reduce(self, z: CyclotomicElement) -> tuple[int, int]:
        """Image of a ring element: ``zeta^3 -> -a`` and ``zeta^2 -> 1 - a zeta``."""
        a0, a1, a2, a3 = z.coeffs
        return self.elem(a0 + a2 - self.a * a3, a1 - self.a * a2)

    def elements(self) -> Iterable[tuple[int, int]]:
        """Nonzero elements in lexicographic order of ``(c1, c0)``."""
        for c1 in range(self.q):
            for c0 in range(self.q):
                if c0 or c1:
                    yield (c0, c1)


def residue_field(a: int, q: int, b: int = 1) -> ResidueField:
    """Residue field of Z[zeta_12] at the Gaussian prime ``a + b i``.

    Raises
    ------
    ConfigError
        If ``b != 1``, ``q != a^2 + b^2``, ``q`` is not prime, or 3 is a square
        mod ``q`` (the prime would split in Q(zeta_12) rather than stay inert).
    """
    if b != 1:
        raise ConfigError("only primes of the form a + i are supported")
    if q != a * a + b * b:
        raise ConfigError(f"norm mismatch: {a}^2 + {b}^2 != {q}")
    if not _is_prime(q) or q in (2, 3):
        raise ConfigError(f"{q} is not an admissible odd prime")
    if pow(3, (q - 1) // 2, q) != q - 1:
        raise ConfigError(f"3 is a square modulo {q}; the prime is not inert")
    return ResidueField(q, a)


def element_order(field: ResidueField, x) -> int:
    x = field.elem(*x)
    if x == (0, 0):
        raise ConfigError("zero has no multiplicative order")
    one = field.elem(1)
    y, k = x, 1
    while y != one:
        y = field.mul(y, x)
        k += 1
    return k


def discrete_log(field: ResidueField, base, target) -> int:
    """Brute-force ``k`` in ``[0, q^2 - 1)`` with ``base^k = target``."""
    base, target = field.elem(*base), field.elem(*target)
    if target == (0, 0):
        raise ConfigError("discrete log of zero is undefined")
    if element_order(field, base) != field.group_order:
        raise ConfigError(f"{base} does not generate the multiplicative group")
    y = field.elem(1)
    for k in range(field.group_order):
        if y == target:
            return k
        y = field.mul(y, base)
    raise AssertionError("unreachable: a generator reaches every nonzero element")


def first_generator(field: ResidueField) -> tuple[int, int]:
    for x in field.elements():
        if element_order(field, x) == field.group_order:
            return x
    raise AssertionError("finite fields have cyclic unit groups")


# -- Hecke characters ------------------------------------------------------------------


@dataclass(frozen=True)
class LocalCharacter:
    """Character of the residue field units sending ``generator`` to ``exp(2 pi i image)``."""

    field: ResidueField
    generator: tuple[int, int]
    image: Fraction

    def __call__(self, x) -> Fraction:
        """Exponent ``r`` in ``[0, 1)`` with ``chi(x) = exp(2 pi i r)``."""
        return (discrete_log(self.field, self.generator, x) * self.image) % 1

    def at(self, z: CyclotomicElement) -> Fraction:
        return self(self.field.reduce(z))


@dataclass(frozen=True)
class PlaceData:
    q: int
    generator: tuple[int, int]
    image: Fraction
    dlog_zeta: int
    dlog_unit: int
    chi_zeta: Fraction
    chi_unit: Fraction
    chi_minus_one: Fraction


@dataclass(frozen=True)
class HeckeSolution:
    """Solutions ``k1 = k1_residue mod k1_modulus`` and ``t1 = t_scale (n + t_offset)``."""

    k1_residue: int
    k1_modulus: int
    t_offset: Fraction
    t_scale: float
    places: tuple[PlaceData, ...]
    t_scale_tag: str = "2*pi/log(2+sqrt3)"

    def t(self, n: int) -> float:
        return self.t_scale * float(n + self.t_offset)

    def t_exact(self, n: int) -> Fraction:
        """``t1(n)`` in units of ``t_scale``."""
        return n + self.t_offset

    def global_phase(self, n: int, k1: int | None = None) -> tuple[complex, complex]:
        """Values of the global character at ``zeta_12`` and ``2 + sqrt 3``; both should be 1."""
        k1 = self.k1_residue if k1 is None else k1
        fin_zeta = sum((p.chi_zeta for p in self.places), Fraction(0))
        fin_unit = sum((p.chi_unit for p in self.places), Fraction(0))
        u = FUNDAMENTAL_UNIT.embed()
        arch_zeta = (ZETA12 / abs(ZETA12)) ** k1
        arch_unit = cmath.exp(1j * self.t(n) * math.log(abs(u))) * (u / abs(u)) ** k1
        return (arch_zeta * cmath.exp(2j * math.pi * float(fin_zeta)),
                arch_unit * cmath.exp(2j * math.pi * float(fin_unit)))

    def to_json(self) -> dict:
        return {
            "k1_congruence": {"residue": self.k1_residue, "modulus": self.k1_modulus},
            "t_offset": f"{self.t_offset.numerator}/{self.t_offset.denominator}",
            "t_scale": self.t_scale,
            "t_scale_tag": self.t_scale_tag,
            "places": [
                {
                    "q": p.q,
                    "generator": list(p.generator),
                    "image": str(p.image),
                    "dlog_zeta": p.dlog_zeta,
                    "dlog_unit": p.dlog_unit,
                    "chi_zeta": str(p.chi_zeta),
                    "chi_unit": str(p.chi_unit),
                    "chi_minus_one": str(p.chi_minus_one),
                }
                for p in self.places
            ],
        }


def fundamental_unit_log() -> float:
    """``log(2 + sqrt 3) = arccosh 2``."""
    return math.acosh(2.0)


def solve_hecke(*chars: LocalCharacter) -> HeckeSolution:
    """Archimedean parameters making the product character trivial on the units.

    The unit group is generated by ``zeta_12`` and ``2 + sqrt 3``. With
    ``chi_inf(z) = |z|^{it} (z/|z|)^k``, triviality at ``zeta_12`` fixes ``k``
    modulo 12 and triviality at ``2 + sqrt 3`` (real and positive) fixes ``t``
    up to multiples of ``2 pi / log(2 + sqrt 3)``.

    Raises
    ------
    PreconditionError
        If some local character does not send -1 to -1.
    ConfigError
        If the finite phase at ``zeta_12`` is not a twelfth root of unity.
    """
    places = []
    fin_zeta = Fraction(0)
    fin_unit = Fraction(0)
    for chi in chars:
        F = chi.field
        dz = discrete_log(F, chi.generator, F.reduce(ZETA))
        du = discrete_log(F, chi.generator, F.reduce(FUNDAMENTAL_UNIT))
        cz, cu = (dz * chi.image) % 1, (du * chi.image) % 1
        cm = chi(F.elem(-1))
        if cm != Fraction(1, 2):
            raise PreconditionError(f"character at q={F.q} has chi(-1) = exp(2 pi i {cm}), not -1")
        places.append(PlaceData(F.q, chi.generator, chi.image, dz, du, cz, cu, cm))
        fin_zeta += cz
        fin_unit += cu
    # zeta^k * exp(2 pi i fin_zeta) = 1  <=>  k/12 + fin_zeta in Z
    k_frac = (-fin_zeta * 12)
    if k_frac.denominator != 1:
        raise ConfigError(f"finite phase {fin_zeta % 1} at zeta_12 is not a 12th root of unity")
    k1 = int(k_frac) % 12
    offset = (-fin_unit) % 1
    return HeckeSolution(k1, 12, offset, 2.0 * math.pi / fundamental_unit_log(), tuple(places))


def reference_characters() -> tuple[LocalCharacter, LocalCharacter]:
    """The worked example: ``zeta + 3 -> zeta_24`` at 2+i and ``7 + zeta -> zeta_288`` at 4+i."""
    F1 = residue_field(2, 5)
    F2 = residue_field(4, 17)
    return (LocalCharacter(F1, (3, 1), Fraction(1, 24)),
            LocalCharacter(F2, (7, 1), Fraction(1, 288)))


BETA = "beta"


def export_progression(sol: HeckeSolution, n_range: Iterable[int], p_weight: int | None = None,
                       mult: int = 1) -> SpectrumCatalog:
    """Catalog of lines ``s = (n + offset) beta`` with ``beta = 2 pi / log(2 + sqrt 3)``."""
    p = sol.k1_residue if p_weight is None else int(p_weight)
    if (p - sol.k1_residue) % sol.k1_modulus:
        raise PreconditionError(f"weight {p} is not {sol.k1_residue} mod {sol.k1_modulus}")
    basis = {BETA: sol.t_scale}
    lines = []
    for n in n_range:
        exact = ExactFrequency.of({BETA: sol.t_exact(n)}, basis)
        lines.append(SpectralLine(exact.value, p, mult, exact))
    return SpectrumCatalog(tuple(lines), (), tuple(basis.items()), False)
