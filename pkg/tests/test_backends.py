import os
import subprocess
import sys

import numpy as np
import pytest

from holobias import _backend
from holobias import _kernels_py as ref
from holobias.sampling import uniform_chunk


def test_cos_sum(backend):
    y = np.linspace(0, 40, 1001)
    s, a, phi = np.array([1.0, 2.5]), np.array([0.3, 0.7]), np.array([0.1, -2.0])
    got = np.asarray(backend.cos_sum(y, s, a, phi, -0.5))
    want = -0.5 + (a * np.cos(np.outer(y, s) + phi)).sum(axis=1)
    assert np.allclose(got, want, atol=1e-14)


def test_torus_points_are_exact(backend):
    u = uniform_chunk(1, 0, 500, 1)
    M = np.array([[11], [29], [47]], dtype=np.int64)
    x = np.asarray(backend.torus_points(u, M))
    top = 1 << 53
    for t, row in zip(u[:, 0], x):
        assert [int(v) for v in row] == [(m * int(t)) % top for m in (11, 29, 47)]


def test_histogram_closed_top_edge(backend):
    v = np.array([0.0, 0.5, 1.0, 1.0, -0.1, 1.1])
    assert np.asarray(backend.histogram(v, 0.0, 1.0, 2)).tolist() == [1, 3]


def test_backends_agree():
    if not _can_load("cython"):
        pytest.skip("compiled core not built")
    cy = _backend.get("cython")
    u = uniform_chunk(3, 0, 4000, 2)
    M = np.array([[1, 0], [0, 1], [1, 1]], dtype=np.int64)
    a, phi = np.array([0.5, 0.3, 0.2]), np.array([0.0, 1.0, 2.0])
    assert np.array_equal(np.asarray(cy.torus_values(u, M, a, phi, 0.1)),
                          np.asarray(ref.torus_values(u, M, a, phi, 0.1)))
    xi = np.linspace(0, 50, 500)
    w = np.full_like(xi, 0.1)
    x = np.linspace(-1, 1, 9)
    assert np.allclose(cy.bessel_cos_integral(xi, w, a, x, 0.0),
                       ref.bessel_cos_integral(xi, w, a, x, 0.0), atol=1e-13)


def _can_load(name):
    try:
        _backend.get(name)
        return True
    except ImportError:
        return False


def test_force_python_env():
    code = "from holobias import _backend; print(_backend.BACKEND)"
    env = dict(os.environ, HOLOBIAS_FORCE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
