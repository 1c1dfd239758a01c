import cmath
import math

import numpy as np
import pytest

from holobias.bias import (
    GeodesicRecord,
    bias_constant,
    bias_signal,
    eval_ET,
    geometric_bias_sum,
    load_geodesics,
    trace_rhs_spectral,
    weyl_weight,
)
from holobias.catalog import SpectrumCatalog
from holobias.errors import BiasModeError, ConfigError, ConstraintError, ParseError, PreconditionError
from holobias.kernels import HolonomyTestFunction, KernelScale, SmoothingKernel, c_s_eta, g_window

K = SmoothingKernel()
SC = KernelScale(0.1)
COS = HolonomyTestFunction.cos(1)
EMPTY = SpectrumCatalog()


def c0():
    return c_s_eta(K, SC, 0.0).value.real


def test_bias_examples():
    assert bias_constant(EMPTY, COS, K, SC).value == -2 * c0()
    assert bias_constant(SpectrumCatalog.build([], [(1, 2)]), COS, K, SC).value == 0.0
    assert bias_constant(EMPTY, HolonomyTestFunction.cos(3), K, SC).value == 0.0


def test_bias_mode_required():
    with pytest.raises(BiasModeError):
        bias_constant(EMPTY, HolonomyTestFunction({0: 1.0}), K, SC)


def test_empty_signal_is_bias():
    ys = np.linspace(0.2, 30, 7)
    assert np.all(eval_ET(EMPTY, COS, K, SC, 10.0, ys) == bias_constant(EMPTY, COS, K, SC).value)


def test_single_class_peak():
    s, p, m = 3.0, 1, 2
    cat = SpectrumCatalog.build([(s, p, m)])
    c = c_s_eta(K, SC, s).value
    b = bias_constant(cat, COS, K, SC).value
    y = (2 * math.pi - cmath.phase(c)) / s
    assert eval_ET(cat, COS, K, SC, math.inf, y) - b == pytest.approx(2 * m * 0.5 * abs(c), abs=1e-13)


def _naive(catalog, f, y):
    total = 0.0
    for ln in catalog.lines:
        c = c_s_eta(K, SC, ln.s).value
        total += 2 * ln.mult * (f.coeff(-ln.p) * complex(math.cos(ln.s * y), math.sin(ln.s * y)) * c).real
    return total + bias_constant(catalog, f, K, SC).value


def test_signal_matches_naive_sum():
    f = HolonomyTestFunction({1: 0.5 + 0.1j, -1: 0.5 - 0.1j, 2: 0.3j, -2: -0.3j})
    cat = SpectrumCatalog.build([(1.3, 1), (2.9, -2, 3), (7.1, 2)], [(2, 1)])
    assert eval_ET(cat, f, K, SC, math.inf, 5.0) == pytest.approx(_naive(cat, f, 5.0), abs=1e-12)


def test_truncation_drops_lines():
    cat = SpectrumCatalog.build([(1.0, 1), (9.0, 1)])
    assert eval_ET(cat, COS, K, SC, 5.0, 2.0) == pytest.approx(_naive(SpectrumCatalog.build([(1.0, 1)]), COS, 2.0))


def test_sign_flip():
    cat = SpectrumCatalog.build([(1.3, 1), (2.0, 2)], [(1, 1)])
    f = HolonomyTestFunction({1: 0.5, -1: 0.5, 2: 0.25, -2: 0.25})
    assert bias_constant(cat, -f, K, SC).value == -bias_constant(cat, f, K, SC).value
    assert eval_ET(cat, -f, K, SC, math.inf, 3.0) == pytest.approx(-eval_ET(cat, f, K, SC, math.inf, 3.0), abs=1e-15)
    geo = [GeodesicRecord(1.0, 2.0, 1.0), GeodesicRecord(2.0, 0.5, 1.0)]
    assert geometric_bias_sum(geo, -f, K, SC, 3.0).value == -geometric_bias_sum(geo, f, K, SC, 3.0).value


def test_mult_scaling():
    f = COS
    one = SpectrumCatalog.build([(1.5, 1, 1)], [(1, 1)])
    two = SpectrumCatalog.build([(1.5, 1, 2)], [(1, 2)])
    b1, b2 = bias_constant(one, f, K, SC), bias_constant(two, f, K, SC)
    assert b2.zero_line_contribution == 2 * b1.zero_line_contribution
    assert b2.trivial_contribution == b1.trivial_contribution
    osc = lambda cat, b: eval_ET(cat, f, K, SC, math.inf, 4.0) + b.trivial_contribution
    assert osc(two, b2) == pytest.approx(2 * osc(one, b1), abs=1e-13)


def test_almost_periodic_single_class():
    s = 2.3
    sig = bias_signal(SpectrumCatalog.build([(s, 1)]), COS, K, SC)
    y = np.linspace(1, 10, 11)
    assert np.allclose(sig(y + 2 * math.pi / s), sig(y), atol=1e-12)


def test_signal_below_eta0_refused():
    with pytest.raises(PreconditionError):
        eval_ET(EMPTY, COS, K, KernelScale(0.1, 0.5), math.inf, 0.2)


def test_weyl_weight():
    assert weyl_weight(math.log(2), math.pi / 2) == pytest.approx(0.4, abs=1e-15)
    u, th = 0.7, 1.3
    z = complex(u, th)
    ref = 1 / (abs(1 - cmath.exp(z)) * abs(1 - cmath.exp(-z)))
    assert weyl_weight(u, th) == pytest.approx(ref, abs=1e-14)
    assert weyl_weight(0.3, 0.0) == pytest.approx((2 * math.sinh(0.15)) ** -2, rel=1e-15)
    with pytest.raises(ConfigError):
        weyl_weight(0.0, 1.0)


def test_geometric_examples():
    one = [GeodesicRecord(1.0, math.pi, 1.0)]
    assert geometric_bias_sum(one, COS, K, SC, 2.0).value == pytest.approx(-1.0, abs=1e-15)
    edge = [GeodesicRecord(2.2, 0.0, 2.2)]
    assert geometric_bias_sum(edge, COS, K, SC, 2.0).value == 0.0


def test_weyl_tilde_against_hand_sum():
    recs = [GeodesicRecord(0.8, 0.3, 0.8), GeodesicRecord(1.6, 0.6, 0.8), GeodesicRecord(1.1, 2.0, 1.1),
            GeodesicRecord(2.5, 5.5, 2.5), GeodesicRecord(3.05, 1.0, 3.05)]
    y = 3.0
    out = geometric_bias_sum(recs, COS, K, SC, y, weighting="weyl-tilde")
    ref = 0.0
    for g in recs:
        w = 1 / (math.exp(g.length) + math.exp(-g.length) - 2 * math.cos(g.holonomy))
        gv = float(g_window(K, SC, y, np.array([g.length]))[0])
        ref += g.primitive_length * w * (math.exp(g.length) + math.exp(-g.length)) * gv * math.cos(g.holonomy)
    assert out.value == pytest.approx(ref, abs=1e-12)
    assert out.normalized == pytest.approx(ref * math.exp(-y), abs=1e-14)
    prim = geometric_bias_sum(recs, COS, K, SC, y, primitive_only=True, weighting="weyl-tilde")
    assert prim.count == 4


def test_geodesic_table_parsing():
    recs = load_geodesics("length,holonomy,primitive_length\n1.0,0.5,1.0\n2.0,1.0,1.0\n")
    assert [g.power for g in recs] == [1, 2]
    with pytest.raises(ParseError):
        load_geodesics("l,h\n1,2\n")
    with pytest.raises(ConstraintError):
        load_geodesics("length,holonomy,primitive_length\n-1.0,0.5,1.0\n")
    with pytest.raises(ConstraintError):
        GeodesicRecord(1.5, 0.0, 1.0)


def test_trace_main_terms():
    y = 4.0
    assert trace_rhs_spectral(EMPTY, COS, K, SC, y).value == pytest.approx(-math.exp(y) * c0(), rel=1e-15)
    s = 1.7
    cat = SpectrumCatalog.build([(s, 1, 2)])
    c = c_s_eta(K, SC, s).value
    direct = 2 * math.exp(y) * 2 * (0.5 * complex(math.cos(s * y), math.sin(s * y)) * c).real - math.exp(y) * c0()
    assert trace_rhs_spectral(cat, COS, K, SC, y).value == pytest.approx(direct, rel=1e-12)


def test_trace_regrouping():
    cat = SpectrumCatalog.build([(1.2, 1), (3.3, 2, 2)], [(1, 1)])
    y = 2.5
    b = bias_constant(cat, COS, K, SC)
    tr = trace_rhs_spectral(cat, COS, K, SC, y)
    ey = math.exp(y)
    expected = ey * (eval_ET(cat, COS, K, SC, math.inf, y) - b.value) + tr.zero_lines - ey * c0()
    assert tr.value == pytest.approx(expected, rel=1e-12)


def test_trace_parity():
    f = HolonomyTestFunction({1: 0.5 - 0.5j, -1: 0.5 + 0.5j})
    cat = SpectrumCatalog.build([(1.2, 1), (3.3, -1)])
    parts = [trace_rhs_spectral(cat, f, K, SC, 2.0, parity=p).value for p in ("even", "odd", "full")]
    assert parts[0] + parts[1] == pytest.approx(parts[2], rel=1e-13)
    with pytest.raises(ConfigError):
        trace_rhs_spectral(cat, f, K, SC, 2.0, parity="both")
