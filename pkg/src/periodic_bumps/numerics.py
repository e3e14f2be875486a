"""Shared numerical primitives.

Grid-plus-bisection root finding with tangency detection, the closed-form
eigendecomposition of a 2x2 Hermitian matrix, a dense eigensolver used as a
cross-check oracle, and golden-section extremisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from .errors import ContractViolation, InvalidBracketError, InvalidInputError, NumericalError

GRID_N = 2048
X_TOL = 1e-10
F_TOL = 1e-9
HERM_TOL = 1e-10

Multiplicity = Literal["simple", "tangent"]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise InvalidInputError(f"interval bounds must be finite, got [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise InvalidInputError(f"interval lower bound {self.lo} exceeds upper bound {self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


@dataclass
class RootList:
    """Roots in strictly increasing order, each tagged ``simple`` or ``tangent``."""

    roots: list[float] = field(default_factory=list)
    multiplicity_flags: list[Multiplicity] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(zip(self.roots, self.multiplicity_flags))

    @property
    def tangent(self) -> list[float]:
        return [r for r, m in self if m == "tangent"]


def _checked(f, x):
    y = float(f(x))
    if not math.isfinite(y):
        raise NumericalError(f"non-finite function value {y} at x={x!r}")
    return y


def bisect(f: Callable[[float], float], lo: float, hi: float, x_tol: float = X_TOL,
           f_lo: float | None = None, f_hi: float | None = None, max_iter: int = 200) -> float:
    """Bisection on a sign-change bracket until the bracket is no wider than ``x_tol``."""
    f_lo = _checked(f, lo) if f_lo is None else f_lo
    f_hi = _checked(f, hi) if f_hi is None else f_hi
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        raise InvalidBracketError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        if hi - lo <= x_tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = _checked(f, mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_section(f: Callable[[float], float], lo: float, hi: float, maximize: bool = False,
                   x_tol: float = 1e-12, max_iter: int = 200) -> tuple[float, float]:
    """Golden-section search for an extremum of a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x))``. The endpoints are compared at the end so a monotone
    ``f`` returns the better endpoint.
    """
    sgn = -1.0 if maximize else 1.0
    g = lambda t: sgn * _checked(f, t)  # noqa: E731
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(max_iter):
        if b - a <= x_tol:
            break
        if gc < gd:
            b, d, gd = d, c, gc
            c = b - _GOLDEN * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _GOLDEN * (b - a)
            gd = g(d)
    best = [(gc, c), (gd, d), (g(lo), lo), (g(hi), hi)]
    val, x = min(best)
    return x, sgn * val


def find_roots(f: Callable, domain: Interval | tuple[float, float], grid_n: int = GRID_N,
               x_tol: float = X_TOL, f_tol: float = F_TOL, vectorized: bool = False) -> RootList:
    """All roots of ``f`` on ``domain`` visible on a uniform grid.

    Sign changes between neighbouring grid points are refined by bisection and
    reported as ``simple``. Interior local minima of ``|f|`` without a sign
    change in either adjacent cell are refined by golden-section search and
    reported as ``tangent`` when the refined ``|f|`` is at most ``f_tol``. Two
    simple roots closer than two grid cells whose enclosed extremum is within
    ``f_tol`` of zero are collapsed into one tangent root.

    With ``vectorized=True`` ``f`` is called once on the whole grid array.
    """
    if not isinstance(domain, Interval):
        domain = Interval(*domain)
    if domain.lo >= domain.hi:
        raise InvalidInputError(f"degenerate domain [{domain.lo}, {domain.hi}]")
    if grid_n < 8:
        raise InvalidInputError(f"grid_n must be >= 8, got {grid_n}")
    if not (x_tol > 0 and f_tol > 0):
        raise InvalidInputError("x_tol and f_tol must be positive")

    xs = np.linspace(domain.lo, domain.hi, grid_n)
    if vectorized:
        fs = np.asarray(f(xs), dtype=float)
    else:
        fs = np.array([float(f(x)) for x in xs])
    bad = ~np.isfinite(fs)
    if bad.any():
        i = int(np.argmax(bad))
        raise NumericalError(f"non-finite function value {fs[i]} at x={xs[i]!r}")

    found: list[tuple[float, Multiplicity]] = []
    h = xs[1] - xs[0]
    sign_change = fs[:-1] * fs[1:] < 0.0

    for i in np.nonzero(sign_change)[0]:
        r = bisect(f, xs[i], xs[i + 1], x_tol, fs[i], fs[i + 1])
        found.append((r, "simple"))

    for i in np.nonzero(fs == 0.0)[0]:
        left = fs[i - 1] if i > 0 else None
        right = fs[i + 1] if i < grid_n - 1 else None
        crosses = left is not None and right is not None and left * right < 0.0
        at_edge = left is None or right is None
        found.append((float(xs[i]), "simple" if crosses or at_edge else "tangent"))

    absf = np.abs(fs)
    for i in range(1, grid_n - 1):
        if fs[i] == 0.0 or sign_change[i - 1] or sign_change[i]:
            continue
        if fs[i - 1] == 0.0 or fs[i + 1] == 0.0:
            continue
        if absf[i] > absf[i - 1] or absf[i] > absf[i + 1]:
            continue
        x_star, val = golden_section(lambda t: abs(_checked(f, t)), xs[i - 1], xs[i + 1], x_tol=x_tol * 1e-2)
        if min(val, absf[i]) <= f_tol:
            found.append((x_star if val <= absf[i] else float(xs[i]), "tangent"))

    found.sort()
    merged: list[tuple[float, Multiplicity]] = []
    for r, kind in found:
        if merged and r - merged[-1][0] <= x_tol:
            continue
        if merged and kind == "simple" and merged[-1][1] == "simple" and r - merged[-1][0] <= 2.0 * h:
            r0 = merged[-1][0]
            mid_sign = math.copysign(1.0, _checked(f, 0.5 * (r0 + r)))
            x_ext, v_ext = golden_section(lambda t: mid_sign * _checked(f, t), r0, r, maximize=True,
                                          x_tol=x_tol * 1e-2)
            if abs(v_ext) <= f_tol:
                merged[-1] = (x_ext, "tangent")
                continue
        merged.append((r, kind))

    return RootList([float(r) for r, _ in merged], [k for _, k in merged])


def _as_matrix(m) -> np.ndarray:
    if hasattr(m, "as_array"):
        m = m.as_array()
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (2, 2):
        raise InvalidInputError(f"expected a 2x2 matrix, got shape {m.shape}")
    return m


def _phase_normalise(w: np.ndarray) -> np.ndarray:
    w = w / np.linalg.norm(w)
    k = 0 if abs(w[0]) > 1e-14 else 1
    return w * (abs(w[k]) / w[k])


def eig_hermitian_2x2(m, herm_tol: float = HERM_TOL):
    """Closed-form eigenpairs ``(lam1, lam2, w1, w2)`` of a Hermitian 2x2 matrix.

    ``lam1 <= lam2``. With equal diagonal entries this is
    ``m11 -+ |m12|``. Eigenvectors have unit norm and their first nonzero
    component is real and positive.
    """
    m = _as_matrix(m)
    asym = abs(m[0, 1] - np.conj(m[1, 0]))
    imag_diag = abs(m[0, 0].imag) + abs(m[1, 1].imag)
    if asym > herm_tol or imag_diag > herm_tol:
        raise ContractViolation(
            f"matrix not Hermitian within {herm_tol:g}: off-diagonal mismatch {asym:.3g}, "
            f"imaginary diagonal {imag_diag:.3g}"
        )
    d1, d2 = m[0, 0].real, m[1, 1].real
    off = 0.5 * (m[0, 1] + np.conj(m[1, 0]))
    mean = 0.5 * (d1 + d2)
    half_gap = 0.5 * (d1 - d2)
    rad = math.hypot(half_gap, abs(off))
    lam1, lam2 = mean - rad, mean + rad

    if abs(off) == 0.0:
        e1 = np.array([1.0, 0.0], dtype=np.complex128)
        e2 = np.array([0.0, 1.0], dtype=np.complex128)
        return (lam1, lam2, e1, e2) if d1 <= d2 else (lam1, lam2, e2, e1)

    vecs = []
    for lam in (lam1, lam2):
        # Two null-vector candidates of (m - lam I); keep the better conditioned one.
        u = np.array([off, lam - d1], dtype=np.complex128)
        v = np.array([lam - d2, np.conj(off)], dtype=np.complex128)
        w = u if np.linalg.norm(u) >= np.linalg.norm(v) else v
        vecs.append(_phase_normalise(w))
    return lam1, lam2, vecs[0], vecs[1]


def eig_dense(m) -> np.ndarray:
    """Eigenvalues of a small dense square matrix (LAPACK ``geev`` via numpy)."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvalidInputError(f"eig_dense needs a non-empty square matrix, got shape {m.shape}")
    if m.shape[0] > 512:
        raise InvalidInputError(f"eig_dense is limited to dimension 512, got {m.shape[0]}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix has non-finite entries")
    return np.linalg.eigvals(m)


def multiset_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Max absolute difference between two real multisets after sorting."""
    a = np.sort(np.real_if_close(np.asarray(a)).real)
    b = np.sort(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        return math.inf
    return float(np.max(np.abs(a - b))) if a.size else 0.0
