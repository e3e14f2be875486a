"""Independent reference implementations used by the tests."""

import numpy as np
from scipy import integrate


def direct_omega_p(k, T, x, K=60):
    x = np.asarray(x, dtype=float)
    shifts = T * np.arange(-K, K + 1)
    return k(x[..., None] - shifts).sum(axis=-1)


def quad_W_p(k, T, x):
    kinks = T * np.arange(1, int(x // T) + 1)  # omega_p has corners at the lattice points
    f = lambda t: float(direct_omega_p(k, T, t))  # noqa: E731
    return integrate.quad(f, 0.0, x, points=kinks if kinks.size else None, limit=400, epsabs=1e-14)[0]


def osc_complex_closed(b, T, x):
    """Oscillatory kernel as the real part of a complex exponential sum."""
    c = b - 1j
    S = 1.0 - 1j * b
    n = np.floor(x / T)
    y = x - n * T
    den = 1.0 - np.exp(-c * T)
    psi = (np.exp(-c * y) + np.exp(-c * (T - y))) / den
    Psi = (np.exp(c * (y - T)) - np.exp(-c * y) - np.exp(-c * T) + 1.0) / (c * den)
    h0 = 2.0 * S / c
    return np.real(S * psi), np.real(n * h0 + S * Psi)
