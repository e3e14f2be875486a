"""1-bump periodic stationary solutions.

For a period ``T`` and threshold ``h`` a candidate half-width ``a`` solves
``W_p(2a; T) = h`` with ``0 < a < T/2``. The candidate profile is

    u_p(x) = W_p(x + a; T) - W_p(x - a; T)

and it is a genuine 1-bump periodic solution iff ``u_p > h`` on ``(0, a)`` and
``u_p < h`` on ``(a, T/2]``. Its slope at the threshold crossing is
``|u_p'(a)| = omega_p(0; T) - omega_p(2a; T)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .kernel import Kernel, PeriodizedKernel
from .numerics import F_TOL, GRID_N, X_TOL, Interval, RootList, find_roots

EPS_A = 1e-8
REG_TOL = 1e-8
VERIFY_GRID_N = 4096


@dataclass(frozen=True)
class BumpSolution:
    pk: PeriodizedKernel
    h: float
    a: float
    tangent: bool = False

    @property
    def T(self) -> float:
        return self.pk.T

    @property
    def kernel(self) -> Kernel:
        return self.pk.kernel

    @property
    def regularity(self) -> float:
        """``omega_p(0; T) - omega_p(2a; T)``, the slope magnitude at ``x = a``."""
        return derivative_at_a(self)

    @property
    def is_regular(self) -> bool:
        return self.regularity > REG_TOL

    def __call__(self, x):
        return eval_solution(self, x)


@dataclass(frozen=True)
class VerificationReport:
    condition1: bool
    condition2: bool
    condition3: bool
    is_regular: bool
    worst_margin: float
    regularity: float
    lipschitz: float

    @property
    def accepted(self) -> bool:
        return self.condition1 and self.condition2 and self.condition3 and self.is_regular


def find_candidates(pk: PeriodizedKernel, h: float, grid_n: int = GRID_N, x_tol: float = X_TOL,
                    f_tol: float = F_TOL) -> RootList:
    """Roots ``a`` of ``W_p(2a; T) = h`` inside ``(0, T/2)``, tangencies flagged."""
    if not math.isfinite(h):
        raise InvalidInputError(f"threshold must be finite, got {h}")
    if not 0.0 < h < pk.h0:
        warnings.warn(f"threshold h={h:g} outside (0, h0={pk.h0:g})", RuntimeWarning, stacklevel=2)
    T = pk.T
    eps = EPS_A * T
    f = lambda a: pk.W_p(2.0 * np.asarray(a, dtype=float)) - h  # noqa: E731
    roots = find_roots(f, Interval(eps, T / 2.0 - eps), grid_n=grid_n, x_tol=x_tol, f_tol=f_tol, vectorized=True)
    keep = [(r, m) for r, m in roots if 0.0 < r < T / 2.0]
    return RootList([r for r, _ in keep], [m for _, m in keep])


def solutions(pk: PeriodizedKernel, h: float, **kwargs) -> list[BumpSolution]:
    """Every candidate of :func:`find_candidates` wrapped as a :class:`BumpSolution`."""
    return [BumpSolution(pk, h, a, m == "tangent") for a, m in find_candidates(pk, h, **kwargs)]


def eval_solution(sol: BumpSolution, x):
    """``u_p(x) = W_p(x + a) - W_p(x - a)``."""
    out = np.asarray(sol.pk.W_p(np.add(x, sol.a)) - sol.pk.W_p(np.subtract(x, sol.a)))
    return float(out) if out.ndim == 0 else out


def derivative_at_a(sol: BumpSolution) -> float:
    """``omega_p(0; T) - omega_p(2a; T)`` (signed; a genuine bump has it >= 0)."""
    return sol.pk.omega_p(0.0) - sol.pk.omega_p(2.0 * sol.a)


def verify(sol: BumpSolution, grid_n: int = VERIFY_GRID_N, f_tol: float = F_TOL,
           x_tol: float = X_TOL) -> VerificationReport:
    """Check the threshold crossing, the two sign conditions and regularity on grids."""
    if grid_n < 64:
        raise InvalidInputError(f"grid_n must be >= 64, got {grid_n}")
    a, h, T = sol.a, sol.h, sol.T
    c1 = 0.0 < a < T / 2.0 and abs(eval_solution(sol, a) - h) <= f_tol

    inner = np.linspace(0.0, a, grid_n + 2)[1:-1]
    outer = np.linspace(a, T / 2.0, grid_n + 1)[1:]
    m_in = eval_solution(sol, inner) - h
    m_out = h - eval_solution(sol, outer)
    c2 = bool(inner.size) and bool(np.all(m_in > 0.0))
    c3 = bool(outer.size) and bool(np.all(m_out > 0.0))

    near = 2.0 * x_tol
    margins = np.concatenate([m_in[np.abs(inner - a) > near], m_out[np.abs(outer - a) > near]])
    worst = float(margins.min()) if margins.size else math.nan

    period_grid = np.linspace(0.0, T, grid_n, endpoint=False)
    lipschitz = 2.0 * float(np.max(np.abs(sol.pk.omega_p(period_grid))))
    reg = derivative_at_a(sol)
    return VerificationReport(bool(c1), c2, c3, reg > REG_TOL, worst, reg, lipschitz)


def solve(kernel: Kernel, T: float, h: float, **kwargs) -> list[tuple[BumpSolution, VerificationReport]]:
    """Candidates for ``(kernel, T, h)`` with their verification reports."""
    pk = PeriodizedKernel(kernel, T)
    return [(s, verify(s)) for s in solutions(pk, h, **kwargs)]
