import os
import subprocess
import sys

import numpy as np
import pytest

from tdhsim import _kernels_py, kernels


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
    forced = os.environ.get("TDHSIM_PURE_PYTHON", "") not in ("", "0")
    if kernels.compiled_available() and not forced:
        assert kernels.BACKEND == "cython"
    if forced:
        assert kernels.BACKEND == "python"


def test_gradient_matches_finite_differences(rng):
    phases = rng.uniform(-1, 1, size=8)
    xs = np.linspace(-0.9, 0.9, 7)
    p, dp = _kernels_py.qsp_top_left_grad(phases, xs)
    h = 1e-6
    for j in range(len(phases)):
        e = np.zeros_like(phases)
        e[j] = h
        fd = (_kernels_py.qsp_top_left(phases + e, xs) - _kernels_py.qsp_top_left(phases - e, xs)) / (2 * h)
        assert np.allclose(dp[:, j], fd, atol=1e-8)
    assert np.allclose(p, _kernels_py.qsp_top_left(phases, xs))


@pytest.mark.skipif(not kernels.compiled_available(), reason="compiled extension not built")
def test_backends_agree(rng):
    from tdhsim import _kernels

    for k in (0, 1, 5, 40):
        phases = rng.uniform(-np.pi, np.pi, size=k + 1)
        xs = np.cos(np.linspace(0, np.pi, 33))
        assert np.allclose(_kernels.qsp_top_left(phases, xs), _kernels_py.qsp_top_left(phases, xs), atol=1e-13)
        p1, d1 = _kernels.qsp_top_left_grad(phases, xs)
        p2, d2 = _kernels_py.qsp_top_left_grad(phases, xs)
        assert np.allclose(p1, p2, atol=1e-13) and np.allclose(d1, d2, atol=1e-13)


def test_pure_python_override():
    env = dict(os.environ, TDHSIM_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from tdhsim import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
