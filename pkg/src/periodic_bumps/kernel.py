"""Connectivity kernels and their periodisations.

A kernel ``omega`` must be even, decay like ``C (1+|x|)^(-1-delta)`` and have
positive mass ``h0 = int omega``. Its T-periodisation is the lattice sum
``omega_p(x; T) = sum_k omega(x - kT)`` with antiderivative
``W_p(x; T) = int_0^x omega_p``.

Exponential and wizard-hat kernels have closed forms for both. Other kernels
go through a truncated lattice sum whose cutoff is chosen from the kernel's
decay envelope so that the neglected tail stays below ``SERIES_TOL``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Mapping

import numpy as np
from scipy import integrate

from . import _kernels
from .errors import AdmissibilityError, InvalidInputError

SERIES_TOL = 1e-12
MAX_TRUNCATION = 200_000


class Kernel:
    """Base class. Subclasses are frozen dataclasses."""

    #: (amps, rates) for sums of exponentials, None otherwise
    exp_terms: tuple[np.ndarray, np.ndarray] | None = None

    def __call__(self, x):
        raise NotImplementedError

    def integral(self) -> float:
        raise NotImplementedError

    @property
    def decay_constants(self) -> tuple[float, float]:
        """``(C, delta)`` with ``|omega(x)| <= C (1+|x|)^(-1-delta)``."""
        raise NotImplementedError

    @property
    def exp_envelope(self) -> tuple[float, float] | None:
        """``(C, rate)`` with ``|omega(x)| <= C exp(-rate |x|)``, if known."""
        return None

    def tail_bound(self, K: int, T: float, reach: float) -> float:
        """Bound on ``sum_{|k|>K} |omega(y - kT)|`` uniformly for ``|y| <= reach``."""
        env = self.exp_envelope
        start = K * T + T - reach  # smallest |y - kT| over |k| >= K+1
        if start <= 0:
            return math.inf
        if env is not None:
            C, r = env
            return 2.0 * C * math.exp(-r * start) / (-math.expm1(-r * T))
        C, delta = self.decay_constants
        # sum over k >= K+1 bounded by the integral from K of the monotone envelope
        lead = C * (1.0 + start) ** (-1.0 - delta)
        tail = C * (1.0 + start) ** (-delta) / (delta * T)
        return 2.0 * (lead + tail)

    def truncation(self, T: float, reach: float, tol: float = SERIES_TOL) -> int:
        """Smallest cutoff ``K`` with ``tail_bound(K, T, reach) <= tol`` (capped)."""
        K = max(1, int(math.ceil(reach / T)))
        while self.tail_bound(K, T, reach) > tol:
            if K >= MAX_TRUNCATION:
                warnings.warn(
                    f"lattice-sum cutoff capped at {MAX_TRUNCATION}; certified tail "
                    f"{self.tail_bound(K, T, reach):.3g} exceeds {tol:g}",
                    RuntimeWarning,
                    stacklevel=2,
                )
                return K
            K = min(MAX_TRUNCATION, K * 2 if K < 64 else K + max(64, K // 4))
        # shrink back to the smallest admissible K
        lo, hi = K // 2 if K > 1 else 1, K
        while lo < hi:
            mid = (lo + hi) // 2
            if self.tail_bound(mid, T, reach) <= tol:
                hi = mid
            else:
                lo = mid + 1
        return hi

    def to_config(self) -> dict:
        raise NotImplementedError


def _exp_sum(x, amps, rates):
    ax = np.abs(np.asarray(x, dtype=float))
    out = np.zeros_like(ax)
    for A, r in zip(amps, rates):
        out = out + A * np.exp(-r * ax)
    return out


@dataclass(frozen=True)
class Exponential(Kernel):
    """``S exp(-s|x|)``."""

    S: float
    s: float

    def __post_init__(self):
        if not (self.S > 0 and self.s > 0):
            raise AdmissibilityError(f"exponential kernel needs S > 0 and s > 0, got S={self.S}, s={self.s}")

    @property
    def exp_terms(self):
        return np.array([self.S], dtype=float), np.array([self.s], dtype=float)

    def __call__(self, x):
        return _exp_sum(x, *self.exp_terms)

    def integral(self) -> float:
        return 2.0 * self.S / self.s

    @property
    def exp_envelope(self):
        return self.S, self.s

    @property
    def decay_constants(self):
        # sup (1+x)^2 exp(-s x) is attained at x = 2/s - 1 when s < 2
        return self.S * _poly_over_exp(self.s), 1.0

    def to_config(self):
        return {"type": "exponential", "S": self.S, "s": self.s}


@dataclass(frozen=True)
class WizardHat(Kernel):
    """``S1 exp(-s1|x|) - S2 exp(-s2|x|)`` with ``S1 > S2 > 0``, ``s1 > s2 > 0``."""

    S1: float
    s1: float
    S2: float
    s2: float

    def __post_init__(self):
        if not (self.S1 > self.S2 > 0 and self.s1 > self.s2 > 0):
            raise AdmissibilityError(
                f"wizard hat needs S1 > S2 > 0 and s1 > s2 > 0, got {self.S1}, {self.s1}, {self.S2}, {self.s2}"
            )
        kernel_integral(self)

    @property
    def exp_terms(self):
        return np.array([self.S1, -self.S2], dtype=float), np.array([self.s1, self.s2], dtype=float)

    def __call__(self, x):
        return _exp_sum(x, *self.exp_terms)

    def integral(self) -> float:
        return 2.0 * (self.S1 / self.s1 - self.S2 / self.s2)

    @property
    def exp_envelope(self):
        return self.S1 + self.S2, self.s2

    @property
    def decay_constants(self):
        return (self.S1 + self.S2) * _poly_over_exp(self.s2), 1.0

    def to_config(self):
        return {"type": "wizard_hat", "S1": self.S1, "s1": self.s1, "S2": self.S2, "s2": self.s2}


@dataclass(frozen=True)
class OscillatoryDecay(Kernel):
    """``exp(-b|x|) (b sin|x| + cos x)``."""

    b: float

    def __post_init__(self):
        if not self.b > 0:
            raise AdmissibilityError(f"oscillatory kernel needs b > 0, got {self.b}")

    def __call__(self, x):
        ax = np.abs(np.asarray(x, dtype=float))
        return np.exp(-self.b * ax) * (self.b * np.sin(ax) + np.cos(ax))

    def antiderivative(self, x):
        """``int_0^x omega``."""
        return _kernels._osc_primitive_numpy(np.asarray(x, dtype=float), self.b)

    def integral(self) -> float:
        return 4.0 * self.b / (1.0 + self.b * self.b)

    @property
    def exp_envelope(self):
        return 1.0 + self.b, self.b

    @property
    def decay_constants(self):
        return (1.0 + self.b) * _poly_over_exp(self.b), 1.0

    def to_config(self):
        return {"type": "oscillatory", "b": self.b}


@dataclass(frozen=True)
class Tabulated(Kernel):
    """User-supplied kernel. Evenness is imposed by evaluating at ``|x|``.

    ``evaluator`` should accept numpy arrays; scalar-only callables are
    wrapped with ``np.vectorize``. ``decay_rate`` optionally declares an
    exponential envelope ``decay_C exp(-decay_rate |x|)``, which gives much
    shorter lattice sums than the algebraic bound.
    """

    evaluator: Callable = field(compare=False)
    decay_C: float = 1.0
    decay_delta: float = 1.0
    decay_rate: float | None = None
    name: str = "tabulated"

    def __post_init__(self):
        if not (self.decay_C > 0 and self.decay_delta > 0):
            raise AdmissibilityError("tabulated kernel needs decay_C > 0 and decay_delta > 0")
        if self.decay_rate is not None and not self.decay_rate > 0:
            raise AdmissibilityError("decay_rate must be positive when given")
        kernel_integral(self)

    def __call__(self, x):
        ax = np.abs(np.asarray(x, dtype=float))
        try:
            out = np.asarray(self.evaluator(ax), dtype=float)
            if out.shape != ax.shape:
                raise ValueError
        except (TypeError, ValueError):
            out = np.vectorize(lambda t: float(self.evaluator(t)), otypes=[float])(ax)
        return out

    @cached_property
    def _h0(self) -> float:
        val, _ = integrate.quad(lambda t: float(self(t)), 0.0, np.inf, limit=400, epsabs=1e-13, epsrel=1e-12)
        return 2.0 * val

    def integral(self) -> float:
        return self._h0

    @property
    def exp_envelope(self):
        return None if self.decay_rate is None else (self.decay_C, self.decay_rate)

    @property
    def decay_constants(self):
        return self.decay_C, self.decay_delta

    def to_config(self):
        raise InvalidInputError("tabulated kernels cannot be serialised to a config document")


def _poly_over_exp(rate: float) -> float:
    """``sup_{x >= 0} (1+x)^2 exp(-rate x)``."""
    if rate >= 2.0:
        return 1.0
    x = 2.0 / rate - 1.0
    return (1.0 + x) ** 2 * math.exp(-rate * x)


def eval_kernel(k: Kernel, x):
    """``omega(x)``; scalar in, scalar out."""
    out = k(x)
    return float(out) if np.ndim(out) == 0 else out


def kernel_integral(k: Kernel) -> float:
    """Mass ``h0 = int omega``; raises :class:`AdmissibilityError` when ``h0 <= 0``."""
    h0 = k.integral()
    if not h0 > 0:
        raise AdmissibilityError(f"kernel mass h0 = {h0:g} must be positive")
    return h0


@dataclass(frozen=True)
class PeriodizedKernel:
    """A kernel bound to a period ``T``.

    ``method`` selects the evaluation route: ``"auto"`` uses the closed form
    when the kernel has one, ``"series"`` forces the truncated lattice sum.
    """

    kernel: Kernel
    T: float
    method: str = "auto"

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0):
            raise InvalidInputError(f"period T must be positive, got {self.T}")
        if self.method not in ("auto", "closed", "series"):
            raise InvalidInputError(f"unknown method {self.method!r}")
        if self.method == "closed" and self.kernel.exp_terms is None:
            raise InvalidInputError(f"{type(self.kernel).__name__} has no closed-form periodisation")

    @property
    def closed_form(self) -> bool:
        return self.method != "series" and self.kernel.exp_terms is not None

    @cached_property
    def h0(self) -> float:
        return kernel_integral(self.kernel)

    @cached_property
    def truncation_K(self) -> int:
        # arguments are reduced to [0, T)
        return self.kernel.truncation(self.T, self.T)

    def omega_p(self, x):
        """``omega_p(x; T)``; accepts scalars or arrays."""
        xa = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        if self.closed_form:
            amps, rates = self.kernel.exp_terms
            out = _kernels.exp_periodized(xa, self.T, amps, rates)
        elif isinstance(self.kernel, OscillatoryDecay):
            out = _kernels.osc_periodized(xa, self.T, self.kernel.b, self.truncation_K)
        else:
            out = self._series_generic(xa)
        return _shape_like(out, x)

    def W_p(self, x):
        """``W_p(x; T) = int_0^x omega_p(y; T) dy``; accepts scalars or arrays."""
        xa = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        if self.closed_form:
            amps, rates = self.kernel.exp_terms
            out = _kernels.exp_antiderivative(xa, self.T, amps, rates)
        elif isinstance(self.kernel, OscillatoryDecay):
            out = _kernels.osc_antiderivative(xa, self.T, self.kernel.b, self.truncation_K, self.h0)
        elif self.kernel.exp_terms is not None:
            out = self._antiderivative_exp_series(xa)
        else:
            out = self._antiderivative_quad(xa)
        return _shape_like(out, x)

    def _series_generic(self, xa):
        K = self.truncation_K
        xr = xa - self.T * np.floor(xa / self.T)
        shifts = self.T * np.arange(-K, K + 1)
        out = np.empty_like(xr)
        # chunk to bound memory for long lattice sums
        step = max(1, 2_000_000 // shifts.size)
        for i in range(0, xr.size, step):
            out[i:i + step] = self.kernel(xr[i:i + step, None] - shifts[None, :]).sum(axis=1)
        return out

    def _antiderivative_exp_series(self, xa):
        # term-wise primitive of each exponential: sign(y)(1 - exp(-r|y|))/r
        amps, rates = self.kernel.exp_terms
        K = self.truncation_K
        n = np.floor(xa / self.T)
        xr = xa - self.T * n
        shifts = self.T * np.arange(-K, K + 1)
        out = np.zeros_like(xr)
        for A, r in zip(amps, rates):
            prim = lambda y: np.sign(y) * -np.expm1(-r * np.abs(y)) / r  # noqa: E731
            out += A * (prim(xr[:, None] - shifts[None, :]) - prim(-shifts)[None, :]).sum(axis=1)
        return out + n * self.h0

    def _antiderivative_quad(self, xa):
        n = np.floor(xa / self.T)
        xr = xa - self.T * n
        f = lambda t: float(self._series_generic(np.array([t]))[0])  # noqa: E731
        vals = np.array([integrate.quad(f, 0.0, r, limit=200, epsabs=1e-13, epsrel=1e-12)[0] if r > 0 else 0.0
                         for r in xr])
        return vals + n * self.h0

    def with_period(self, T: float) -> "PeriodizedKernel":
        return PeriodizedKernel(self.kernel, T, self.method)


def _shape_like(out, x):
    if np.ndim(x) == 0:
        return float(out[0])
    return np.asarray(out).reshape(np.shape(x))


def periodized(k: Kernel, T: float, x, method: str = "auto"):
    """``omega_p(x; T)``."""
    return PeriodizedKernel(k, T, method).omega_p(x)


def periodized_antiderivative(k: Kernel, T: float, x, method: str = "auto"):
    """``W_p(x; T)``."""
    return PeriodizedKernel(k, T, method).W_p(x)


_FIELDS = {
    "exponential": (Exponential, ("S", "s")),
    "wizard_hat": (WizardHat, ("S1", "s1", "S2", "s2")),
    "oscillatory": (OscillatoryDecay, ("b",)),
}


def kernel_from_config(cfg: Mapping) -> Kernel:
    """Build a kernel from ``{"type": ..., <params>}``.

    Raises :class:`InvalidInputError` for unknown types or missing/extra
    fields and :class:`AdmissibilityError` for inadmissible parameters.
    """
    if not isinstance(cfg, Mapping):
        raise InvalidInputError("kernel config must be a JSON object")
    kind = cfg.get("type")
    if kind not in _FIELDS:
        raise InvalidInputError(f"unknown kernel type {kind!r}; expected one of {sorted(_FIELDS)}")
    cls, names = _FIELDS[kind]
    extra = set(cfg) - set(names) - {"type"}
    missing = [n for n in names if n not in cfg]
    if missing or extra:
        raise InvalidInputError(f"{kind} kernel: missing {missing}, unexpected {sorted(extra)}")
    try:
        params = [float(cfg[n]) for n in names]
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{kind} kernel parameters must be numbers") from exc
    if not all(math.isfinite(p) for p in params):
        raise InvalidInputError(f"{kind} kernel parameters must be finite")
    return cls(*params)


def load_kernel(path: str | Path) -> Kernel:
    try:
        cfg = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON ({exc})") from exc
    return kernel_from_config(cfg)
