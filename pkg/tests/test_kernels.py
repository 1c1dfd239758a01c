import cmath
import math

import numpy as np
import pytest

from holobias.errors import BiasModeError, ConfigError, NumericGuardError, ParseError
from holobias.kernels import (
    HolonomyTestFunction,
    KernelScale,
    SmoothingKernel,
    c_s_eta,
    c_s_eta_direct,
    fourier_coeff,
    g_window,
    h_window,
    kernel_eval,
    laplace_psi,
    psi_hat,
    sample_test_function,
    window_transform,
)
from holobias.quadrature import gauss_legendre

K = SmoothingKernel()


def test_bump_unit_mass_and_support():
    assert gauss_legendre(K, -1.0, 1.0, n=64, panels=8) == pytest.approx(1.0, abs=1e-12)
    assert K(np.array([-1.0, 1.0, 1.5]))[...].tolist() == [0.0, 0.0, 0.0]
    assert K(np.array([0.3]))[0] == K(np.array([-0.3]))[0]


def test_scaled_kernel_mass():
    sc = KernelScale(0.05)
    val = gauss_legendre(lambda t: kernel_eval(K, sc, t), -0.05, 0.05, n=64, panels=8)
    assert val == pytest.approx(1.0, abs=1e-12)


def test_scale_validation():
    with pytest.raises(ConfigError):
        KernelScale(0.2, 0.1)
    with pytest.raises(ConfigError):
        KernelScale(0.0)


def test_laplace_basics():
    assert laplace_psi(K, 0) == pytest.approx(1.0, abs=1e-14)
    z = 0.3 + 2.0j
    assert laplace_psi(K, z.conjugate()) == laplace_psi(K, z).conjugate()
    with pytest.raises(NumericGuardError):
        laplace_psi(K, 701.0)


def test_psi_hat_is_real_and_even():
    assert psi_hat(K, 0.7).imag == 0.0
    assert psi_hat(K, 0.7) == pytest.approx(psi_hat(K, -0.7), abs=1e-15)


@pytest.mark.parametrize("eta", [0.01, 0.1, 0.7])
@pytest.mark.parametrize("s", [0.0, 1.3, -8.0, 60.0])
def test_c_s_eta_two_routes(eta, s):
    sc = KernelScale(eta)
    assert abs(c_s_eta(K, sc, s).value - c_s_eta_direct(K, sc, s)) < 1e-12


def test_c_s_eta_small_eta_limit():
    for eta in (1e-1, 1e-2, 1e-3, 1e-4):
        assert abs(c_s_eta(K, KernelScale(eta), 0.0).value - 1) <= 2 * eta
    c = c_s_eta(K, KernelScale(1e-4), 3.0).value
    assert c == pytest.approx(1 / (1 + 3j), abs=1e-3)


def test_c_s_eta_conjugate_symmetry():
    sc = KernelScale(0.2)
    for s in (0.5, 4.0, 33.0):
        assert c_s_eta(K, sc, -s).value == c_s_eta(K, sc, s).value.conjugate()


def test_window_plateau_and_support():
    sc = KernelScale(0.1)
    g = g_window(K, sc, 2.0, np.array([0.0, 1.0, 1.9, 2.1, 3.0]))
    assert g.tolist()[:3] == [1.0, 1.0, 1.0]
    assert g.tolist()[3:] == [0.0, 0.0]
    h = h_window(K, sc, 2.0, np.array([-1.0, 1.0]))
    assert h.tolist() == [-1.0, 1.0]
    assert g_window(K, sc, 2.0, np.array([2.0]))[0] == pytest.approx(0.5, abs=1e-14)


@pytest.mark.parametrize("kind", ["g", "h"])
def test_window_transform_matches_direct_integral(kind):
    sc = KernelScale(0.2)
    y, s = 1.5, 2.7
    win = g_window if kind == "g" else h_window
    direct = gauss_legendre(lambda x: win(K, sc, y, x) * np.exp(1j * s * x), -y - 0.2, y + 0.2,
                            n=32, panels=40)
    assert window_transform(kind, K, sc, y, s) == pytest.approx(direct, abs=1e-10)


def test_window_transform_small_s_series():
    sc = KernelScale(0.1)
    assert window_transform("g", K, sc, 2.0, 0.0) == pytest.approx(4.0, abs=1e-14)
    assert window_transform("h", K, sc, 2.0, 0.0) == 0.0
    assert window_transform("g", K, sc, 2.0, 1e-9) == pytest.approx(4.0, abs=1e-12)


def test_test_function_parsing_and_coefficients():
    f = HolonomyTestFunction.parse("cos:2")
    assert f.coeff(2) == f.coeff(-2) == 0.5
    g = HolonomyTestFunction.parse("sin:1")
    assert g(np.pi / 2) == pytest.approx(1.0, abs=1e-15)
    t = HolonomyTestFunction.parse('[{"p": 1, "re": 0.5}, {"p": -1, "re": 0.5}]')
    assert t(0.0) == pytest.approx(1.0)
    with pytest.raises(ParseError):
        HolonomyTestFunction.parse("tan:1")


def test_bias_mode():
    HolonomyTestFunction.cos(1).require_bias_mode()
    with pytest.raises(BiasModeError):
        HolonomyTestFunction({0: 1.0, 1: 0.5, -1: 0.5}).require_bias_mode()
    with pytest.raises(BiasModeError):
        HolonomyTestFunction({1: 1.0}).require_bias_mode()


def test_even_odd_split():
    f = HolonomyTestFunction({1: 0.5 - 0.25j, -1: 0.5 + 0.25j})
    th = np.linspace(0, 6, 7)
    assert np.allclose(f.even_part()(th) + f.odd_part()(th), f(th), atol=1e-15)
    assert np.allclose(f.even_part()(th), f.even_part()(-th))


def test_fourier_coeff_of_closed_form():
    c = fourier_coeff(lambda th: np.cos(th) ** 3, 1)
    assert c == pytest.approx(3 / 8, abs=1e-14)
    f = sample_test_function(lambda th: np.exp(np.cos(th)) - 1.2660658777520082, max_p=20)
    assert abs(f.mean) < 1e-12
    assert f(0.4) == pytest.approx(math.exp(math.cos(0.4)) - 1.2660658777520082, abs=1e-12)
