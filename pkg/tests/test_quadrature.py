import math

import numpy as np
import pytest

from holobias.errors import NumericGuardError
from holobias.quadrature import gauss_legendre, panel_nodes, tanh_sinh


def test_tanh_sinh_polynomial():
    assert tanh_sinh(lambda x: x ** 3 - x, 0.0, 2.0) == pytest.approx(2.0, abs=1e-13)


def test_tanh_sinh_endpoint_singularity():
    # int_0^1 x^{-1/2} dx = 2
    assert tanh_sinh(lambda x: 1 / np.sqrt(x), 0.0, 1.0) == pytest.approx(2.0, abs=1e-10)


def test_tanh_sinh_matches_gauss_legendre_on_smooth_oscillation():
    f = lambda x: np.exp(-x) * np.cos(7 * x)
    a = tanh_sinh(f, 0.0, 3.0, panels=4)
    b = gauss_legendre(f, 0.0, 3.0, n=32, panels=8)
    assert a == pytest.approx(b, abs=1e-13)


def test_reversed_limits_negate():
    f = lambda x: np.sin(x)
    assert tanh_sinh(f, 1.0, 0.0) == pytest.approx(-(1 - math.cos(1.0)), abs=1e-14)
    assert tanh_sinh(f, 0.3, 0.3) == 0.0


def test_non_convergence_is_guarded():
    with pytest.raises(NumericGuardError):
        tanh_sinh(lambda x: np.sin(1e4 * x) * np.exp(x), 0.0, 10.0, max_level=3, tol=1e-15)


def test_panel_nodes_weights_sum_to_length():
    x, w = panel_nodes(np.array([0.0, 0.5, 2.0, 2.25]), 16)
    assert w.sum() == pytest.approx(2.25, abs=1e-14)
    assert np.all(np.diff(x) > 0)
