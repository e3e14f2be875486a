"""Linear stability of regular 1-bump periodic solutions.

The linearisation at ``u_p`` acts through the values of a perturbation at the
threshold crossings ``-a + kT`` and ``a + kT``; on that lattice it is the block
Laurent operator with blocks

    A_k = (1/|u_p'(a)|) [[omega(kT),      omega(-2a + kT)],
                         [omega(2a + kT), omega(kT)      ]]

whose symbol ``Phi(e^{i theta}) = sum_k A_k e^{i k theta}`` is a Hermitian 2x2
matrix with equal diagonal. The nonzero spectrum is the union over theta of
the two branches ``Phi_11 -+ |Phi_12|``. Stability requires every branch value
to be at most 1 (the value 1 itself is always present: it belongs to the
translation mode ``u_p'``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from . import _kernels
from .errors import ContractViolation, InvalidInputError, ZeroEigenvalueError
from .existence import REG_TOL, BumpSolution
from .kernel import SERIES_TOL
from .numerics import Interval, eig_dense, eig_hermitian_2x2, golden_section

N_THETA = 4096
MERGE_TOL = 1e-6
STAB_TOL = 1e-9

Verdict = Literal["unstable", "marginally_stable"]


@dataclass(frozen=True)
class SymbolMatrix:
    phi11: complex
    phi12: complex
    phi21: complex
    phi22: complex
    theta: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.phi11, self.phi12], [self.phi21, self.phi22]], dtype=np.complex128)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return (abs(self.phi12 - np.conj(self.phi21)) <= tol
                and abs(complex(self.phi11).imag) + abs(complex(self.phi22).imag) <= tol)


@dataclass
class SpectrumReport:
    thetas: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    intervals: list[Interval]
    verdict: Verdict
    max_lambda: float
    extrema: dict[str, float] = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "intervals": [[iv.lo, iv.hi] for iv in self.intervals],
            "verdict": self.verdict,
            "max_lambda": self.max_lambda,
            **self.extrema,
        }


@dataclass
class CirculantApprox:
    q: int
    matrix: np.ndarray
    eigenvalues: np.ndarray
    reference: np.ndarray

    @property
    def mismatch(self) -> float:
        got = np.sort(self.eigenvalues.real)
        return float(np.max(np.abs(got - np.sort(self.reference))))


def _require_regular(sol: BumpSolution) -> float:
    reg = sol.regularity
    if not reg > REG_TOL:
        raise ContractViolation(
            f"solution with a={sol.a:g} is not regular (|u_p'(a)| = {reg:.3g}); "
            "the linearisation does not exist"
        )
    return reg


def symbol_entries(sol: BumpSolution, thetas, method: str = "auto"):
    """Normalised ``(Phi_11, Phi_12, Phi_21)`` on an array of angles.

    ``Phi_11`` is real. ``method="series"`` sums the block Fourier series
    directly even when a closed form exists.
    """
    reg = _require_regular(sol)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    k, a, T = sol.kernel, sol.a, sol.T
    if method not in ("auto", "series"):
        raise InvalidInputError(f"unknown method {method!r}")
    if method == "auto" and k.exp_terms is not None and sol.pk.method != "series":
        amps, rates = k.exp_terms
        diag, lower = _kernels.exp_symbol(thetas, a, T, amps, rates)
        return diag / reg, np.conj(lower) / reg, lower / reg
    K = k.truncation(T, 2.0 * a, SERIES_TOL)
    ks = np.arange(-K, K + 1, dtype=float)
    c_diag = k(ks * T).astype(np.complex128)
    c_up = k(-2.0 * a + ks * T).astype(np.complex128)
    c_low = k(2.0 * a + ks * T).astype(np.complex128)
    diag = _kernels.fourier_sum(c_diag, ks, thetas).real
    upper = _kernels.fourier_sum(c_up, ks, thetas)
    lower = _kernels.fourier_sum(c_low, ks, thetas)
    return diag / reg, upper / reg, lower / reg


def symbol(sol: BumpSolution, theta: float, method: str = "auto") -> SymbolMatrix:
    """``Phi(e^{i theta})`` for a regular solution."""
    d, up, low = symbol_entries(sol, [theta], method)
    return SymbolMatrix(complex(d[0]), complex(up[0]), complex(low[0]), complex(d[0]), float(theta))


def branches(sol: BumpSolution, theta: float, method: str = "auto") -> tuple[float, float]:
    """The two eigenvalues ``lambda1 <= lambda2`` of the symbol at ``theta``."""
    lam1, lam2, _, _ = eig_hermitian_2x2(symbol(sol, theta, method))
    return lam1, lam2


def branch_arrays(sol: BumpSolution, thetas, method: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`branches`: ``Phi_11 -+ |Phi_21|``."""
    d, _, low = symbol_entries(sol, thetas, method)
    mod = np.abs(low)
    return d - mod, d + mod


def _refine(func: Callable[[float], float], thetas, values, maximize: bool) -> float:
    i = int(np.argmax(values) if maximize else np.argmin(values))
    best = float(values[i])
    if 0 < i < len(thetas) - 1:
        _, v = golden_section(func, thetas[i - 1], thetas[i + 1], maximize=maximize, x_tol=1e-13)
        best = max(best, v) if maximize else min(best, v)
    return best


def merge_intervals(intervals: list[Interval], merge_tol: float = MERGE_TOL) -> list[Interval]:
    out: list[Interval] = []
    for iv in sorted(intervals, key=lambda i: (i.lo, i.hi)):
        if out and iv.lo - out[-1].hi < merge_tol:
            out[-1] = Interval(out[-1].lo, max(out[-1].hi, iv.hi))
        else:
            out.append(iv)
    return out


def spectrum_intervals(sol: BumpSolution, n_theta: int = N_THETA, merge_tol: float = MERGE_TOL,
                       stab_tol: float = STAB_TOL, method: str = "auto") -> SpectrumReport:
    """Sample both branches on ``[0, pi]`` and assemble the spectral set.

    Each branch is continuous in theta, so its image is ``[min, max]``; the
    sampled extrema are polished by golden-section search before the two
    ranges are merged.
    """
    if n_theta < 64:
        raise InvalidInputError(f"n_theta must be >= 64, got {n_theta}")
    thetas = np.linspace(0.0, math.pi, n_theta)
    lam1, lam2 = branch_arrays(sol, thetas, method)

    def branch_fn(idx):
        return lambda t: branch_arrays(sol, [t], method)[idx][0]

    ext = {
        "min_l1": _refine(branch_fn(0), thetas, lam1, maximize=False),
        "max_l1": _refine(branch_fn(0), thetas, lam1, maximize=True),
        "min_l2": _refine(branch_fn(1), thetas, lam2, maximize=False),
        "max_l2": _refine(branch_fn(1), thetas, lam2, maximize=True),
    }
    ranges = [Interval(ext["min_l1"], ext["max_l1"]), Interval(ext["min_l2"], ext["max_l2"])]
    intervals = merge_intervals(ranges, merge_tol)
    max_lambda = max(ext["max_l1"], ext["max_l2"])
    verdict: Verdict = "unstable" if max_lambda > 1.0 + stab_tol else "marginally_stable"
    return SpectrumReport(thetas, lam1, lam2, intervals, verdict, max_lambda, ext)


def classify(sol: BumpSolution, n_theta: int = N_THETA, stab_tol: float = STAB_TOL) -> Verdict:
    return spectrum_intervals(sol, n_theta, stab_tol=stab_tol).verdict


def translation_branch(sol: BumpSolution) -> int:
    """Branch (1 or 2) carrying the translation eigenvalue 1 at theta = 0.

    At theta = 0 the symbol is real symmetric with eigenvector (1, -1) and
    eigenvalue 1; it is the lower branch iff ``omega_p(2a; T) >= 0``.
    """
    return 1 if sol.pk.omega_p(2.0 * sol.a) >= 0.0 else 2


def circulant(sol: BumpSolution, q: int) -> CirculantApprox:
    """Finite block-circulant section ``L(1+q)`` built from the (1+q)T-periodisation."""
    if not (isinstance(q, (int, np.integer)) and 0 <= q <= 255):
        raise InvalidInputError(f"q must be an integer in [0, 255], got {q!r}")
    reg = _require_regular(sol)
    N = q + 1
    big = sol.pk.with_period(N * sol.T)
    n = np.arange(N, dtype=float) * sol.T
    diag = big.omega_p(n)
    blocks = np.empty((N, 2, 2))
    blocks[:, 0, 0] = diag
    blocks[:, 1, 1] = diag
    blocks[:, 0, 1] = big.omega_p(-2.0 * sol.a + n)
    blocks[:, 1, 0] = big.omega_p(2.0 * sol.a + n)
    blocks /= reg
    matrix = _kernels.block_circulant(blocks)
    eigs = eig_dense(matrix)
    roots_of_unity = 2.0 * math.pi * np.arange(N) / N
    l1, l2 = branch_arrays(sol, roots_of_unity)
    return CirculantApprox(q, matrix, eigs, np.sort(np.concatenate([l1, l2])))


def _eig_pair(sol: BumpSolution, theta: float, branch: int):
    if branch not in (1, 2):
        raise InvalidInputError(f"branch must be 1 or 2, got {branch!r}")
    lam1, lam2, w1, w2 = eig_hermitian_2x2(symbol(sol, theta))
    return (lam1, w1) if branch == 1 else (lam2, w2)


def eigenfunction(sol: BumpSolution, theta: float, branch: int, xs) -> np.ndarray:
    """Eigenfunction of the linearisation for ``lambda_branch(theta)`` sampled at ``xs``.

    Lattice values are ``v_k = exp(-i k theta) w`` with ``w`` the symbol's
    eigenvector; ``v(x)`` is then recovered from the kernel sum divided by the
    eigenvalue.
    """
    reg = _require_regular(sol)
    lam, w = _eig_pair(sol, theta, branch)
    if abs(lam) <= 1e-12:
        raise ZeroEigenvalueError(f"eigenvalue {lam:g} at theta={theta:g} is zero")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    T, a, k = sol.T, sol.a, sol.kernel
    k0 = np.round(xs / T)
    xr = xs - k0 * T
    K = k.truncation(T, T / 2.0 + a, SERIES_TOL)
    m = np.arange(-K, K + 1, dtype=float)
    shifts = m * T
    phase = np.exp(-1j * np.outer(k0, np.ones_like(m)) * theta - 1j * m[None, :] * theta)
    left = k(xr[:, None] + a - shifts[None, :])
    right = k(xr[:, None] - a - shifts[None, :])
    total = ((left * w[0] + right * w[1]) * phase).sum(axis=1)
    return total / (lam * reg)


def apply_linearization(sol: BumpSolution, v: Callable[[np.ndarray], np.ndarray], xs) -> np.ndarray:
    """``(H'(u_p) v)(x)`` evaluated from the values of ``v`` at the crossings ``+-a + kT``."""
    reg = _require_regular(sol)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    T, a, k = sol.T, sol.a, sol.kernel
    K = k.truncation(T, T / 2.0 + a, SERIES_TOL)
    k0 = np.round(xs / T)
    kk = k0[:, None] + np.arange(-K, K + 1, dtype=float)[None, :]
    lattice = np.unique(kk)
    v_minus = dict(zip(lattice, np.asarray(v(-a + lattice * T))))
    v_plus = dict(zip(lattice, np.asarray(v(a + lattice * T))))
    vm = np.vectorize(v_minus.__getitem__, otypes=[complex])(kk)
    vp = np.vectorize(v_plus.__getitem__, otypes=[complex])(kk)
    x = xs[:, None]
    total = (k(x + a - kk * T) * vm + k(x - a - kk * T) * vp).sum(axis=1)
    return total / reg
