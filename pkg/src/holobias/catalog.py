"""Spectral catalogs: data model, ingestion, validation and relation analysis.

A catalog lists principal-series parameters ``(s, p)`` with multiplicities.
Since ``(s, p)`` and ``(-s, -p)`` label the same representation, only one
representative per class is stored: ``s > 0``, or ``s = 0`` with ``p >= 0``.
Lines with ``s = 0`` are kept apart in ``zero_lines``; they only enter the
bias constant.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import intlinalg
from .errors import BasisError, ConstraintError, ParseError, RelationRefused


# -- exact frequencies ---------------------------------------------------------


def _as_fraction(value) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ParseError(f"exact coefficient must be an integer or 'num/den' string, got {value!r}")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational coefficient {value!r}") from exc


def _fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ExactFrequency:
    """Rational combination of named basis frequencies.

    ``coeffs`` and ``basis`` are stored as sorted tuples so instances hash
    and compare by value.
    """

    coeffs: tuple[tuple[str, Fraction], ...]
    basis: tuple[tuple[str, float], ...]

    def __post_init__(self):
        coeffs = {}
        for name, q in dict(self.coeffs).items():
            q = q if isinstance(q, Fraction) else _as_fraction(q)
            if q:
                coeffs[str(name)] = q
        if not coeffs:
            raise ConstraintError("exact frequency needs at least one nonzero coefficient")
        basis = {str(k): float(v) for k, v in dict(self.basis).items()}
        missing = sorted(set(coeffs) - set(basis))
        if missing:
            raise BasisError(f"undeclared basis frequency {missing}")
        object.__setattr__(self, "coeffs", tuple(sorted(coeffs.items())))
        object.__setattr__(self, "basis", tuple(sorted((k, basis[k]) for k in coeffs)))

    @classmethod
    def of(cls, coeffs: Mapping[str, object], basis: Mapping[str, float]) -> "ExactFrequency":
        return cls(tuple(coeffs.items()), tuple(basis.items()))

    @property
    def value(self) -> float:
        # Fraction arithmetic on the exact binary values: one rounding at the end.
        b = dict(self.basis)
        return float(sum(q * Fraction(b[name]) for name, q in self.coeffs))

    def __neg__(self) -> "ExactFrequency":
        return ExactFrequency(tuple((k, -q) for k, q in self.coeffs), self.basis)

    def to_json(self) -> dict:
        return {"coeffs": {k: _fraction_str(q) for k, q in self.coeffs}}


# -- lines and catalogs ----------------------------------------------------------


@dataclass(frozen=True)
class SpectralLine:
    s: float
    p: int
    mult: int = 1
    exact: ExactFrequency | None = None

    def __post_init__(self):
        if isinstance(self.p, bool) or int(self.p) != self.p:
            raise ConstraintError(f"weight p must be an integer, got {self.p!r}")
        if isinstance(self.mult, bool) or int(self.mult) != self.mult or self.mult < 1:
            raise ConstraintError(f"multiplicity must be an integer >= 1, got {self.mult!r}")
        s = self.exact.value if self.exact is not None else float(self.s)
        if not math.isfinite(s):
            raise ConstraintError(f"spectral parameter must be finite, got {s}")
        if s == 0:
            s = 0.0  # drop the sign of -0.0
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "mult", int(self.mult))

    def canonical(self) -> "SpectralLine":
        """Representative of the class ``(s, p) ~ (-s, -p)``."""
        if self.s < 0 or (self.s == 0 and self.p < 0):
            exact = -self.exact if self.exact is not None else None
            return SpectralLine(-self.s, -self.p, self.mult, exact)
        return self

    @property
    def order_key(self):
        return (max(abs(self.s), abs(self.p)), self.s, self.p)

    def to_json(self) -> dict:
        s = self.exact.to_json() if self.exact is not None else self.s
        return {"s": s, "p": self.p, "mult": self.mult}


def _merge(lines: Iterable[SpectralLine]) -> list[SpectralLine]:
    merged: dict[tuple[float, int], SpectralLine] = {}
    for line in lines:
        line = line.canonical()
        key = (line.s, line.p)
        old = merged.get(key)
        if old is None:
            merged[key] = line
            continue
        if old.exact != line.exact:
            raise ConstraintError(
                f"lines at s={line.s!r}, p={line.p} disagree on their exact representation"
            )
        merged[key] = SpectralLine(line.s, line.p, old.mult + line.mult, line.exact)
    return sorted(merged.values(), key=lambda ln: ln.order_key)


@dataclass(frozen=True)
class SpectrumCatalog:
    """Immutable, canonicalized spectral catalog.

    ``lines`` hold the ``s != 0`` classes sorted by ``(max(|s|,|p|), s, p)``;
    downstream amplitude indices follow this order. ``zero_lines`` hold the
    ``s = 0`` classes with ``p >= 0``.
    """

    lines: tuple[SpectralLine, ...] = ()
    zero_lines: tuple[SpectralLine, ...] = ()
    basis: tuple[tuple[str, float], ...] = ()
    independence_declared: bool = False

    def __post_init__(self):
        all_lines = list(self.lines) + list(self.zero_lines)
        merged = _merge(all_lines)
        object.__setattr__(self, "lines", tuple(ln for ln in merged if ln.s != 0))
        object.__setattr__(self, "zero_lines", tuple(ln for ln in merged if ln.s == 0))
        object.__setattr__(self, "basis", tuple(sorted((str(k), float(v)) for k, v in dict(self.basis).items())))
        object.__setattr__(self, "independence_declared", bool(self.independence_declared))

    @classmethod
    def build(cls, lines=(), zero_lines=(), basis=None, independence_declared=False) -> "SpectrumCatalog":
        """Convenience constructor from tuples ``(s, p[, mult])`` or lines."""

        def as_line(item, zero=False):
            if isinstance(item, SpectralLine):
                return item
            if zero:
                p, *rest = item
                return SpectralLine(0.0, p, *rest)
            return SpectralLine(*item)

        return cls(
            tuple(as_line(x) for x in lines),
            tuple(as_line(x, zero=True) for x in zero_lines),
            tuple(dict(basis or {}).items()),
            independence_declared,
        )

    def __len__(self):
        return len(self.lines)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([ln.s for ln in self.lines], dtype=float)

    @property
    def is_exact(self) -> bool:
        return all(ln.exact is not None for ln in self.lines)

    def truncated(self, T: float) -> "SpectrumCatalog":
        """Keep oscillating classes with ``|s| < T`` and ``|p| < T``; zero lines untouched."""
        keep = tuple(ln for ln in self.lines if abs(ln.s) < T and abs(ln.p) < T)
        return SpectrumCatalog(keep, self.zero_lines, self.basis, self.independence_declared)

    def equal_s_groups(self) -> list[list[int]]:
        """Index groups of lines sharing the same ``s`` with different ``p``."""
        groups: dict[float, list[int]] = {}
        for j, ln in enumerate(self.lines):
            groups.setdefault(ln.s, []).append(j)
        return [g for g in groups.values() if len(g) > 1]

    def to_json(self) -> dict:
        out = {
            "independence_declared": self.independence_declared,
            "lines": [ln.to_json() for ln in self.lines],
            "zero_lines": [{"p": ln.p, "mult": ln.mult} for ln in self.zero_lines],
        }
        if self.basis:
            out["basis"] = [{"name": k, "value": v} for k, v in self.basis]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


# -- ingestion -------------------------------------------------------------------


def _int_field(rec: Mapping, key: str, default=None) -> int:
    if key not in rec:
        if default is None:
            raise ParseError(f"record {dict(rec)!r} lacks field {key!r}")
        return default
    v = rec[key]
    if isinstance(v, bool):
        raise ParseError(f"field {key!r} must be an integer, got {v!r}")
    if isinstance(v, float):
        if not v.is_integer():
            raise ParseError(f"field {key!r} must be an integer, got {v!r}")
        v = int(v)
    if not isinstance(v, int):
        raise ParseError(f"field {key!r} must be an integer, got {v!r}")
    return v


def _parse_json(data) -> SpectrumCatalog:
    if not isinstance(data, dict):
        raise ParseError("catalog JSON must be an object")
    unknown = set(data) - {"basis", "independence_declared", "lines", "zero_lines"}
    if unknown:
        raise ParseError(f"unknown catalog keys {sorted(unknown)}")
    basis: dict[str, float] = {}
    for entry in data.get("basis") or []:
        try:
            name, value = str(entry["name"]), float(entry["value"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad basis entry {entry!r}") from exc
        if name in basis:
            raise ParseError(f"basis name {name!r} declared twice")
        if not math.isfinite(value):
            raise ParseError(f"basis value for {name!r} must be finite")
        basis[name] = value
    indep = data.get("independence_declared", False)
    if not isinstance(indep, bool):
        raise ParseError("independence_declared must be a boolean")

    lines = []
    for rec in data.get("lines") or []:
        if not isinstance(rec, dict) or "s" not in rec:
            raise ParseError(f"bad line record {rec!r}")
        p = _int_field(rec, "p")
        mult = _int_field(rec, "mult", default=1)
        s = rec["s"]
        if isinstance(s, dict):
            coeffs = s.get("coeffs")
            if not isinstance(coeffs, dict):
                raise ParseError(f"exact frequency needs a 'coeffs' object, got {s!r}")
            missing = sorted(set(coeffs) - set(basis))
            if missing:
                raise BasisError(f"exact frequency references undeclared basis {missing}")
            exact = ExactFrequency.of({k: _as_fraction(v) for k, v in coeffs.items()}, basis)
            lines.append(SpectralLine(exact.value, p, mult, exact))
        elif isinstance(s, (int, float)) and not isinstance(s, bool):
            lines.append(SpectralLine(float(s), p, mult))
        else:
            raise ParseError(f"bad spectral parameter {s!r}")
    zero = []
    for rec in data.get("zero_lines") or []:
        if not isinstance(rec, dict):
            raise ParseError(f"bad zero line record {rec!r}")
        zero.append(SpectralLine(0.0, _int_field(rec, "p"), _int_field(rec, "mult", default=1)))
    return SpectrumCatalog(tuple(lines), tuple(zero), tuple(basis.items()), indep)


def _parse_csv(text: str) -> SpectrumCatalog:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != ["s", "p", "mult"]:
        raise ParseError(f"catalog CSV header must be 's,p,mult', got {reader.fieldnames}")
    lines = []
    for n, row in enumerate(reader, start=2):
        try:
            s = float(row["s"])
            p_raw, m_raw = float(row["p"]), float(row["mult"])
        except (TypeError, ValueError) as exc:
            raise ParseError(f"line {n}: {exc}") from exc
        if not (p_raw.is_integer() and m_raw.is_integer()):
            raise ParseError(f"line {n}: p and mult must be integers")
        lines.append(SpectralLine(s, int(p_raw), int(m_raw)))
    return SpectrumCatalog(tuple(lines))


def load_catalog(source, format: str | None = None) -> SpectrumCatalog:
    """Load a catalog from a path or from literal text.

    Parameters
    ----------
    source : str or os.PathLike
        File path, or the JSON/CSV text itself.
    format : {"json", "csv"}, optional
        Guessed from the file extension or the first character when omitted.
    """
    text = None
    if isinstance(source, os.PathLike) or (isinstance(source, str) and "\n" not in source
                                            and os.path.isfile(source)):
        path = os.fspath(source)
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read catalog {path}: {exc}") from exc
        if format is None:
            ext = os.path.splitext(path)[1].lower()
            format = {".json": "json", ".csv": "csv"}.get(ext)
    else:
        text = str(source)
    if format is None:
        format = "json" if text.lstrip().startswith("{") else "csv"
    if format == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"catalog is not valid JSON: {exc}") from exc
        return _parse_json(data)
    if format == "csv":
        return _parse_csv(text)
    raise ParseError(f"unknown catalog format {format!r}")


# -- validation ------------------------------------------------------------------


@dataclass(frozen=True)
class WeylViolation:
    p: int
    R: int
    count: int
    bound: float


def validate_weyl(catalog: SpectrumCatalog, volume: float, slack: float = 1.0) -> list[WeylViolation]:
    """Flag windows ``|s| in [R-1, R+1]`` at fixed ``p`` whose multiplicity exceeds the Weyl-type bound.

    The bound is ``slack * volume * (R^2 + p^2) + slack``. Diagnostic only:
    violations are returned (and warned about), never raised.
    """
    if not volume > 0:
        raise ConstraintError(f"volume must be positive, got {volume}")
    allc = list(catalog.lines) + list(catalog.zero_lines)
    report = []
    for p in sorted({ln.p for ln in allc}):
        same = [ln for ln in allc if ln.p == p]
        top = int(math.ceil(max(ln.s for ln in same))) + 1
        for R in range(0, top + 1):
            count = sum(ln.mult for ln in same if R - 1 <= ln.s <= R + 1)
            bound = slack * volume * (R * R + p * p) + slack
            if count > bound:
                report.append(WeylViolation(p, R, count, bound))
    if report:
        warnings.warn(f"{len(report)} spectral window(s) exceed the Weyl-type bound", stacklevel=2)
    return report


# -- relation lattice ----------------------------------------------------------------


@dataclass(frozen=True)
class RelationLattice:
    """Integer relations among the catalog frequencies and the subtorus they cut out.

    ``relations`` has one row per relation ``k`` with ``k . s = 0``;
    ``subtorus_basis`` is the ``n x r`` matrix ``M`` whose columns span the
    saturated annihilator, so ``x = M t mod 1`` parametrises the orbit closure.
    """

    relations: tuple[tuple[int, ...], ...]
    subtorus_basis: tuple[tuple[int, ...], ...]
    n: int
    r: int
    shared: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def M(self) -> np.ndarray:
        return np.array(self.subtorus_basis, dtype=np.int64).reshape(self.n, self.r)

    @property
    def K(self) -> np.ndarray:
        return np.array(self.relations, dtype=np.int64).reshape(len(self.relations), self.n)

    @classmethod
    def independent(cls, n: int) -> "RelationLattice":
        eye = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        return cls((), eye, n, n)

    @classmethod
    def from_relations(cls, rows: Sequence[Sequence[int]], n: int, shared=()) -> "RelationLattice":
        rows = [list(map(int, r)) for r in rows if any(r)]
        if rows:
            # Re-saturate whatever was given; the kernel of the kernel is saturated.
            Mrows = intlinalg.right_kernel(rows, n)
            if Mrows:
                rows = intlinalg.left_kernel([list(c) for c in zip(*Mrows)])
            else:
                rows = [[int(i == j) for j in range(n)] for i in range(n)]
        else:
            Mrows = [[int(i == j) for j in range(n)] for i in range(n)]
        cols = [_sign_normalize(v) for v in Mrows]
        r = len(cols)
        M = tuple(tuple(cols[c][i] for c in range(r)) for i in range(n))
        return cls(tuple(tuple(r_) for r_ in rows), M, n, r, tuple(shared))

    def check(self) -> bool:
        """``relations @ M == 0`` exactly and ``rank + r == n``."""
        K = [list(r) for r in self.relations]
        M = [list(r) for r in self.subtorus_basis]
        ok = all(v == 0 for row in (intlinalg.matmul(K, M) if K and M and self.r else []) for v in row)
        return ok and intlinalg.rank(K) + self.r == self.n


def _sign_normalize(v: Sequence[int]) -> list[int]:
    for x in v:
        if x:
            return list(v) if x > 0 else [-y for y in v]
    return list(v)


def relation_lattice(catalog: SpectrumCatalog, share_equal_s: bool = False) -> RelationLattice:
    """Exact integer relations among the catalog's oscillating frequencies.

    Parameters
    ----------
    catalog : SpectrumCatalog
    share_equal_s : bool
        Under an independence declaration, classes with equal ``s`` but
        different ``p`` normally get their own torus coordinates. Setting this
        ties them together with relations ``e_i - e_j``. Exact catalogs detect
        equal frequencies on their own.

    Raises
    ------
    RelationRefused
        If some frequency is a bare float and independence was not declared.
    """
    n = len(catalog.lines)
    groups = catalog.equal_s_groups()
    if catalog.independence_declared:
        if groups and not share_equal_s:
            warnings.warn(
                "equal spectral parameters with different weights get separate torus "
                "coordinates; pass share_equal_s=True to tie them",
                stacklevel=2,
            )
        if not (share_equal_s and groups):
            return RelationLattice.independent(n)
        rows = []
        for g in groups:
            for j in g[1:]:
                row = [0] * n
                row[g[0]], row[j] = 1, -1
                rows.append(row)
        return RelationLattice.from_relations(rows, n, shared=tuple(tuple(g) for g in groups))
    if not catalog.is_exact:
        raise RelationRefused(
            "relation analysis needs exact frequencies for every line, "
            "or independence_declared = true"
        )
    if n == 0:
        return RelationLattice((), (), 0, 0)
    names = sorted({name for ln in catalog.lines for name, _ in ln.exact.coeffs})
    A = [[dict(ln.exact.coeffs).get(name, Fraction(0)) for name in names] for ln in catalog.lines]
    Aint = intlinalg.clear_denominators(A)
    rows = intlinalg.left_kernel(Aint)
    return RelationLattice.from_relations(rows, n, shared=tuple(tuple(g) for g in groups))
