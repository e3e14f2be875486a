"""The numba loop kernels and the vectorised numpy kernels must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from periodic_bumps import _accel, _kernels

pytestmark = pytest.mark.skipif(not _accel.NUMBA_AVAILABLE, reason="numba not installed")

AMPS = np.array([4.0, -1.5])
RATES = np.array([2.0, 1.0])


@pytest.fixture
def xs(rng):
    return rng.uniform(-12.0, 12.0, 500)


def _both(name, *args):
    return _kernels.JIT[name](*args), _kernels.NUMPY[name](*args)


@pytest.mark.parametrize("T", [0.4, 3.2, 40.0])
def test_exp_periodized(xs, T):
    j, n = _both("exp_periodized", xs, T, AMPS, RATES)
    assert np.allclose(j, n, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("T", [0.4, 3.2, 40.0])
def test_exp_antiderivative(xs, T):
    j, n = _both("exp_antiderivative", xs, T, AMPS, RATES)
    assert np.allclose(j, n, rtol=1e-13, atol=1e-12)


def test_exp_symbol(rng):
    th = rng.uniform(-np.pi, np.pi, 300)
    (jd, jl), (nd, nl) = _both("exp_symbol", th, 0.97, 3.2, AMPS, RATES)
    assert np.allclose(jd, nd, atol=1e-13) and np.allclose(jl, nl, atol=1e-13)


def test_fourier_sum(rng):
    ks = np.arange(-30, 31, dtype=float)
    c = rng.normal(size=ks.size) + 1j * rng.normal(size=ks.size)
    th = rng.uniform(-np.pi, np.pi, 200)
    j, n = _both("fourier_sum", c, ks, th)
    assert np.allclose(j, n, atol=1e-12)


@pytest.mark.parametrize("b", [0.3, 1.2])
def test_oscillatory(xs, b):
    T, K = 2.5, 40
    j, n = _both("osc_periodized", xs, T, b, K)
    assert np.allclose(j, n, atol=1e-13)
    h0 = 4 * b / (1 + b * b)
    j, n = _both("osc_antiderivative", xs, T, b, K, h0)
    assert np.allclose(j, n, atol=1e-12)


def test_block_circulant(rng):
    blocks = rng.normal(size=(7, 2, 2))
    j, n = _both("block_circulant", blocks)
    assert np.array_equal(j, n)
    # block (i, j) is blocks[(j - i) mod N]
    assert np.array_equal(n[2:4, 6:8], blocks[2])
    assert np.array_equal(n[12:14, 0:2], blocks[1])


def test_uncompiled_loops_match(rng):
    x = rng.uniform(-5, 5, 20)
    py = _kernels.JIT["exp_periodized"].py_func(x, 1.3, AMPS, RATES)
    assert np.allclose(py, _kernels.NUMPY["exp_periodized"](x, 1.3, AMPS, RATES), atol=1e-13)


@pytest.mark.parametrize("flag, expected", [("1", "numpy"), ("0", "numba")])
def test_env_flag_selects_path(flag, expected):
    code = (
        "from periodic_bumps import _kernels as k;"
        "print('numpy' if k.exp_periodized is k.NUMPY['exp_periodized'] else 'numba')"
    )
    env = dict(os.environ, PERIODIC_BUMPS_DISABLE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expected
