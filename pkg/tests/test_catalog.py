import json
import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holobias.bias import eval_ET
from holobias.catalog import (
    ExactFrequency,
    RelationLattice,
    SpectralLine,
    SpectrumCatalog,
    load_catalog,
    relation_lattice,
    validate_weyl,
)
from holobias.errors import BasisError, ConstraintError, ParseError, RelationRefused
from holobias.kernels import HolonomyTestFunction, KernelScale, SmoothingKernel, c_s_eta


def test_conjugate_lines_merge():
    cat = load_catalog('{"lines": [{"s": 1.5, "p": 1, "mult": 1}, {"s": -1.5, "p": -1, "mult": 1}]}')
    assert [(ln.s, ln.p, ln.mult) for ln in cat.lines] == [(1.5, 1, 2)]


def test_zero_lines_only():
    cat = load_catalog('{"lines": [], "zero_lines": [{"p": 1, "mult": 2}]}')
    assert len(cat) == 0
    assert [(ln.p, ln.mult) for ln in cat.zero_lines] == [(1, 2)]


def test_csv_zero_row_canonical():
    cat = load_catalog("s,p,mult\n0.0,-3,1\n")
    assert [(ln.s, ln.p, ln.mult) for ln in cat.zero_lines] == [(0.0, 3, 1)]
    assert math.copysign(1.0, cat.zero_lines[0].s) == 1.0


def test_representative_convention():
    assert SpectralLine(-2.0, 3).canonical().s == 2.0
    assert SpectralLine(-2.0, 3).canonical().p == -3
    assert SpectralLine(0.0, -1).canonical().p == 1


@pytest.mark.parametrize("text, err", [
    ('{"lines": [{"s": 1, "p": 1, "mult": 0}]}', ConstraintError),
    ('{"lines": [{"s": 1, "p": 1.5}]}', ParseError),
    ('{"lines": [{"s": {"coeffs": {"gamma": "1/2"}}, "p": 1}]}', BasisError),
    ('{"lines": [{"p": 1}]}', ParseError),
    ("{not json", ParseError),
    ("a,b\n1,2\n", ParseError),
])
def test_load_errors(text, err):
    with pytest.raises(err):
        load_catalog(text)


def test_conflicting_exact_duplicates_rejected():
    basis = {"x": 1.0, "y": 1.0}
    a = SpectralLine(1.0, 1, 1, ExactFrequency.of({"x": 1}, basis))
    b = SpectralLine(1.0, 1, 1, ExactFrequency.of({"y": 1}, basis))
    with pytest.raises(ConstraintError):
        SpectrumCatalog((a, b), (), tuple(basis.items()))


def test_exact_values_survive_round_trip(tmp_path):
    text = json.dumps({
        "basis": [{"name": "beta", "value": 4.770984191560898}],
        "lines": [{"s": {"coeffs": {"beta": "11/18"}}, "p": 4}],
    })
    cat = load_catalog(text)
    assert cat.lines[0].exact.coeffs == (("beta", Fraction(11, 18)),)
    path = tmp_path / "cat.json"
    path.write_text(cat.dumps())
    again = load_catalog(path)
    assert again == cat
    assert again.dumps() == cat.dumps()


lines_st = st.lists(
    st.tuples(st.floats(-20, 20, allow_nan=False).map(lambda v: round(v, 3)),
              st.integers(-4, 4), st.integers(1, 3)),
    max_size=8,
)


@settings(max_examples=50, deadline=None)
@given(lines_st)
def test_canonicalization_idempotent(lines):
    cat = SpectrumCatalog.build(lines)
    assert load_catalog(cat.dumps()) == cat
    keys = [ln.order_key for ln in cat.lines]
    assert keys == sorted(keys)


@settings(max_examples=30, deadline=None)
@given(lines_st.filter(lambda ls: any(s != 0 for s, _, _ in ls)), st.floats(1.0, 10.0))
def test_merge_does_not_change_signal(lines, y):
    f = HolonomyTestFunction({1: 0.5 - 0.2j, -1: 0.5 + 0.2j, 2: 0.1j, -2: -0.1j})
    k, sc = SmoothingKernel(), KernelScale(0.1)
    merged = SpectrumCatalog.build(lines)
    # naive two-sided sum over the raw, unmerged records
    raw = 0.0
    for s, p, m in lines:
        if s == 0:
            continue
        for ss, pp in ((s, p), (-s, -p)):
            raw += m * (f.coeff(-pp) * np.exp(1j * ss * y) * c_s_eta(k, sc, ss).value).real
    b = eval_ET(SpectrumCatalog.build([], [(ln.p, ln.mult) for ln in merged.zero_lines]), f, k, sc, math.inf, y)
    assert eval_ET(merged, f, k, sc, math.inf, y) == pytest.approx(raw + b, abs=1e-11)


def test_truncation():
    cat = SpectrumCatalog.build([(1.0, 1), (5.0, 1), (1.0, 7)], [(2, 1)])
    cut = cat.truncated(5.0)
    assert [(ln.s, ln.p) for ln in cut.lines] == [(1.0, 1)]
    assert cut.zero_lines == cat.zero_lines


def test_weyl_validation():
    assert validate_weyl(SpectrumCatalog(), 1.0) == []
    assert validate_weyl(SpectrumCatalog.build([(2.0, 1)]), 1.0, slack=10) == []
    with pytest.warns(UserWarning):
        bad = validate_weyl(SpectrumCatalog.build([(2.0, 0, 10 ** 6)]), 1.0, slack=1)
    assert bad and all(v.count == 10 ** 6 for v in bad)
    assert any(v.R == 2 for v in bad)
    assert bad[0].count > bad[0].bound


def _exact_catalog(coeffs):
    basis = {"beta": 2 * math.pi / math.acosh(2.0)}
    exact = [ExactFrequency.of({"beta": c}, basis) for c in coeffs]
    lines = [SpectralLine(e.value, 1, 1, e) for e in exact]
    return SpectrumCatalog(tuple(lines), (), tuple(basis.items()))


def test_progression_lattice():
    lat = relation_lattice(_exact_catalog([Fraction(11, 18), Fraction(29, 18), Fraction(47, 18)]))
    assert lat.r == 1
    assert lat.M[:, 0].tolist() == [11, 29, 47]
    assert lat.check()
    # the hand relations lie in the span of the computed ones
    K = np.array(lat.K, dtype=float)
    for rel in ([29, -11, 0], [47, 0, -11]):
        coef, *_ = np.linalg.lstsq(K.T, np.array(rel, dtype=float), rcond=None)
        assert np.allclose(K.T @ coef, rel)


def test_duplicate_frequency_lattice():
    basis = {"beta": 1.0}
    ex = ExactFrequency.of({"beta": 1}, basis)
    cat = SpectrumCatalog((SpectralLine(1.0, 1, 1, ex), SpectralLine(1.0, 2, 1, ex)), (), tuple(basis.items()))
    lat = relation_lattice(cat)
    assert lat.r == 1
    assert lat.relations == ((1, -1),)


def test_declared_independence():
    cat = SpectrumCatalog.build([(1.0, 1), (math.sqrt(2), 1), (math.sqrt(3), 1)], independence_declared=True)
    lat = relation_lattice(cat)
    assert lat.r == 3 and lat.relations == ()
    assert lat.M.tolist() == np.eye(3, dtype=int).tolist()


def test_float_frequencies_refused():
    with pytest.raises(RelationRefused):
        relation_lattice(SpectrumCatalog.build([(1.0, 1), (2.0, 1)]))


def test_equal_s_sharing():
    cat = SpectrumCatalog.build([(1.0, 1), (1.0, 2)], independence_declared=True)
    with pytest.warns(UserWarning):
        assert relation_lattice(cat).r == 2
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert relation_lattice(cat, share_equal_s=True).r == 1


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=4, max_size=4), max_size=3))
def test_lattice_invariants(rows):
    lat = RelationLattice.from_relations(rows, 4)
    assert lat.check()
