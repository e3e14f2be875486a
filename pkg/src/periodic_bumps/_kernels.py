"""Hot numeric kernels with a numba path and a vectorised numpy path.

Every kernel exists twice: ``<name>_loop`` written as explicit loops (compiled
with numba when enabled) and ``<name>_numpy`` using array broadcasting. The
unsuffixed name is bound to whichever implementation ``_accel.USE_NUMBA``
selects. Both paths are exercised against each other in the test-suite.

Exponential families are described by parallel arrays ``amps`` and ``rates``
so that ``omega(x) = sum_j amps[j] * exp(-rates[j] * |x|)``; the wizard hat is
``amps = [S1, -S2]``, ``rates = [s1, s2]``.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, njit

__all__ = [
    "exp_periodized",
    "exp_antiderivative",
    "exp_symbol",
    "fourier_sum",
    "osc_periodized",
    "osc_antiderivative",
    "block_circulant",
]


# ---------------------------------------------------------------------------
# Exponential family: closed-form lattice sums
# ---------------------------------------------------------------------------


def exp_periodized_loop(x, T, amps, rates):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        xr = x[i] - T * math.floor(x[i] / T)
        acc = 0.0
        for j in range(amps.shape[0]):
            r = rates[j]
            acc += amps[j] * (math.exp(-r * xr) + math.exp(-r * (T - xr))) / (-math.expm1(-r * T))
        out[i] = acc
    return out


def exp_periodized_numpy(x, T, amps, rates):
    xr = (x - T * np.floor(x / T))[:, None]
    r = rates[None, :]
    terms = (np.exp(-r * xr) + np.exp(-r * (T - xr))) / (-np.expm1(-r * T))
    return terms @ amps


def exp_antiderivative_loop(x, T, amps, rates):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        n = math.floor(x[i] / T)
        xr = x[i] - T * n
        acc = 0.0
        for j in range(amps.shape[0]):
            r = rates[j]
            num = -math.expm1(-r * xr) + math.exp(-r * T) * math.expm1(r * xr)
            acc += amps[j] * (2.0 * n / r + num / (r * -math.expm1(-r * T)))
        out[i] = acc
    return out


def exp_antiderivative_numpy(x, T, amps, rates):
    n = np.floor(x / T)
    xr = (x - T * n)[:, None]
    r = rates[None, :]
    num = -np.expm1(-r * xr) + np.exp(-r * T) * np.expm1(r * xr)
    terms = 2.0 * n[:, None] / r + num / (r * -np.expm1(-r * T))
    return terms @ amps


def exp_symbol_loop(thetas, a, T, amps, rates):
    """Unnormalised symbol entries (diagonal, lower-left) for 0 < 2a < T."""
    n = thetas.shape[0]
    diag = np.zeros(n)
    lower = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        c = math.cos(thetas[i])
        e_re = math.cos(thetas[i])
        e_im = -math.sin(thetas[i])
        for j in range(amps.shape[0]):
            r = rates[j]
            q = math.exp(-r * T)
            den = 1.0 + q * q - 2.0 * q * c
            diag[i] += amps[j] * (1.0 - q * q) / den
            sh_2a = math.exp(-r * (T - 2.0 * a)) - math.exp(-r * (T + 2.0 * a))
            sh_rest = math.exp(-2.0 * a * r) - math.exp(-r * (2.0 * T - 2.0 * a))
            lower[i] += amps[j] * complex(sh_2a * e_re + sh_rest, sh_2a * e_im) / den
    return diag, lower


def exp_symbol_numpy(thetas, a, T, amps, rates):
    c = np.cos(thetas)[:, None]
    r = rates[None, :]
    q = np.exp(-r * T)
    den = 1.0 + q * q - 2.0 * q * c
    diag = ((1.0 - q * q) / den) @ amps
    sh_2a = np.exp(-r * (T - 2.0 * a)) - np.exp(-r * (T + 2.0 * a))
    sh_rest = np.exp(-2.0 * a * r) - np.exp(-r * (2.0 * T - 2.0 * a))
    lower = ((sh_2a * np.exp(-1j * thetas)[:, None] + sh_rest) / den) @ amps.astype(np.complex128)
    return diag, lower


# ---------------------------------------------------------------------------
# Generic lattice Fourier sum: sum_k c_k exp(i k theta)
# ---------------------------------------------------------------------------


def fourier_sum_loop(coeffs, ks, thetas):
    out = np.zeros(thetas.shape[0], dtype=np.complex128)
    for i in range(thetas.shape[0]):
        acc = 0j
        for m in range(ks.shape[0]):
            ang = ks[m] * thetas[i]
            acc += coeffs[m] * complex(math.cos(ang), math.sin(ang))
        out[i] = acc
    return out


def fourier_sum_numpy(coeffs, ks, thetas):
    return np.exp(1j * np.outer(thetas, ks)) @ coeffs


# ---------------------------------------------------------------------------
# Oscillatory kernel exp(-b|x|)(b sin|x| + cos x): truncated lattice sums
# ---------------------------------------------------------------------------


def _osc_value(y, b):
    t = abs(y)
    return math.exp(-b * t) * (b * math.sin(t) + math.cos(t))


def _osc_primitive(y, b):
    # int_0^y of the kernel; odd in y.
    t = abs(y)
    d = 1.0 + b * b
    A = (1.0 - b * b) / d
    B = -2.0 * b / d
    val = math.exp(-b * t) * (A * math.sin(t) + B * math.cos(t)) - B
    return val if y >= 0.0 else -val


_osc_value_jit = njit(_osc_value)
_osc_primitive_jit = njit(_osc_primitive)


def osc_periodized_loop(x, T, b, K):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        xr = x[i] - T * math.floor(x[i] / T)
        acc = 0.0
        for k in range(-K, K + 1):
            acc += _osc_value_jit(xr - k * T, b)
        out[i] = acc
    return out


def osc_antiderivative_loop(x, T, b, K, h0):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        n = math.floor(x[i] / T)
        xr = x[i] - T * n
        acc = 0.0
        for k in range(-K, K + 1):
            acc += _osc_primitive_jit(xr - k * T, b) - _osc_primitive_jit(-k * T, b)
        out[i] = acc + n * h0
    return out


def _osc_value_numpy(y, b):
    t = np.abs(y)
    return np.exp(-b * t) * (b * np.sin(t) + np.cos(t))


def _osc_primitive_numpy(y, b):
    t = np.abs(y)
    d = 1.0 + b * b
    A = (1.0 - b * b) / d
    B = -2.0 * b / d
    val = np.exp(-b * t) * (A * np.sin(t) + B * np.cos(t)) - B
    return np.where(y >= 0.0, val, -val)


def osc_periodized_numpy(x, T, b, K):
    xr = x - T * np.floor(x / T)
    shifts = T * np.arange(-K, K + 1)
    return _osc_value_numpy(xr[:, None] - shifts[None, :], b).sum(axis=1)


def osc_antiderivative_numpy(x, T, b, K, h0):
    n = np.floor(x / T)
    xr = x - T * n
    shifts = T * np.arange(-K, K + 1)
    terms = _osc_primitive_numpy(xr[:, None] - shifts[None, :], b) - _osc_primitive_numpy(-shifts, b)[None, :]
    return terms.sum(axis=1) + n * h0


# ---------------------------------------------------------------------------
# Block-circulant assembly: block (i, j) = blocks[(j - i) mod N]
# ---------------------------------------------------------------------------


def block_circulant_loop(blocks):
    N = blocks.shape[0]
    m = blocks.shape[1]
    out = np.empty((N * m, N * m))
    for i in range(N):
        for j in range(N):
            blk = blocks[(j - i) % N]
            for p in range(m):
                for q in range(m):
                    out[i * m + p, j * m + q] = blk[p, q]
    return out


def block_circulant_numpy(blocks):
    N, m, _ = blocks.shape
    idx = (np.arange(N)[None, :] - np.arange(N)[:, None]) % N
    return blocks[idx].transpose(0, 2, 1, 3).reshape(N * m, N * m)


_LOOPS = {
    "exp_periodized": exp_periodized_loop,
    "exp_antiderivative": exp_antiderivative_loop,
    "exp_symbol": exp_symbol_loop,
    "fourier_sum": fourier_sum_loop,
    "osc_periodized": osc_periodized_loop,
    "osc_antiderivative": osc_antiderivative_loop,
    "block_circulant": block_circulant_loop,
}
_NUMPY = {
    "exp_periodized": exp_periodized_numpy,
    "exp_antiderivative": exp_antiderivative_numpy,
    "exp_symbol": exp_symbol_numpy,
    "fourier_sum": fourier_sum_numpy,
    "osc_periodized": osc_periodized_numpy,
    "osc_antiderivative": osc_antiderivative_numpy,
    "block_circulant": block_circulant_numpy,
}

JIT = {name: njit(fn) for name, fn in _LOOPS.items()}
NUMPY = dict(_NUMPY)

_active = JIT if USE_NUMBA else NUMPY
exp_periodized = _active["exp_periodized"]
exp_antiderivative = _active["exp_antiderivative"]
exp_symbol = _active["exp_symbol"]
fourier_sum = _active["fourier_sum"]
osc_periodized = _active["osc_periodized"]
osc_antiderivative = _active["osc_antiderivative"]
block_circulant = _active["block_circulant"]
