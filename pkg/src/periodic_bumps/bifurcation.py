"""Period sweeps and critical periods.

A sweep solves for all candidates on a uniform grid of periods and records the
spectral bounds of each accepted regular candidate. Critical periods are
located by bisection on an event indicator:

* ``fold``: the number of candidates changes (a tangent root splits in two);
* ``stability``: the selected branch's max eigenvalue crosses ``1 + stab_tol``;
* ``lambda2_unity``: the minimum of the upper branch drops below 1 (the
  value 1 itself is pinned at theta = 0 by the translation mode);
* ``gap_closure``: the two branch ranges touch. Sorted branches meet only at
  a conical degeneracy, so the gap is V-shaped in T and this event is found
  by golden-section minimisation rather than a sign change.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import InvalidBracketError, InvalidInputError, NumericalError
from .existence import BumpSolution, find_candidates, verify
from .kernel import Kernel, PeriodizedKernel
from .numerics import F_TOL, GRID_N, Interval, bisect, golden_section
from .spectrum import N_THETA, STAB_TOL, spectrum_intervals

Event = Literal["fold", "stability", "lambda2_unity", "gap_closure"]
EVENTS = ("fold", "stability", "lambda2_unity", "gap_closure")
T_TOL = 1e-4
GAP_TOL = 1e-6


@dataclass
class CandidateRecord:
    a: float
    tangent: bool
    regular: bool
    accepted: bool
    branch: int = -1
    min_l1: float = math.nan
    max_l1: float = math.nan
    min_l2: float = math.nan
    max_l2: float = math.nan
    verdict: str | None = None


@dataclass
class SweepRecord:
    T: float
    candidates: list[CandidateRecord] = field(default_factory=list)
    error: str | None = None


@dataclass
class CriticalPeriods:
    T1: float | None = None
    T2: float | None = None
    extra_events: list[tuple[float, str]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"T1": self.T1, "T2": self.T2,
                "extra_events": [{"T": t, "description": d} for t, d in self.extra_events]}


def _record(kernel: Kernel, h: float, T: float, n_theta: int) -> SweepRecord:
    rec = SweepRecord(T)
    try:
        pk = PeriodizedKernel(kernel, T)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            roots = find_candidates(pk, h)
        for a, mult in roots:
            sol = BumpSolution(pk, h, a, mult == "tangent")
            rep = verify(sol)
            cand = CandidateRecord(a, mult == "tangent", rep.is_regular, rep.accepted)
            if rep.accepted:
                spec = spectrum_intervals(sol, n_theta)
                cand.min_l1, cand.max_l1 = spec.extrema["min_l1"], spec.extrema["max_l1"]
                cand.min_l2, cand.max_l2 = spec.extrema["min_l2"], spec.extrema["max_l2"]
                cand.verdict = spec.verdict
            rec.candidates.append(cand)
    except Exception as exc:  # record and keep sweeping
        rec.error = f"{type(exc).__name__}: {exc}"
    return rec


def track_branches(records: list[SweepRecord]) -> list[SweepRecord]:
    """Assign persistent branch ids by nearest-a matching between neighbouring records."""
    next_id = 0
    prev: list[tuple[int, float]] = []
    for rec in records:
        if rec.error is not None:
            continue
        pairs = sorted(
            (abs(c.a - pa), ci, pi)
            for ci, c in enumerate(rec.candidates)
            for pi, (_, pa) in enumerate(prev)
        )
        used_c, used_p = set(), set()
        for _, ci, pi in pairs:
            if ci in used_c or pi in used_p:
                continue
            rec.candidates[ci].branch = prev[pi][0]
            used_c.add(ci)
            used_p.add(pi)
        for ci, c in enumerate(rec.candidates):
            if ci not in used_c:
                c.branch = next_id
                next_id += 1
        next_id = max([next_id] + [c.branch + 1 for c in rec.candidates])
        prev = [(c.branch, c.a) for c in rec.candidates]
    return records


def period_grid(T_lo: float, T_hi: float, n_T: int) -> np.ndarray:
    if not (0 < T_lo <= T_hi and math.isfinite(T_hi)):
        raise InvalidInputError(f"need 0 < T_lo <= T_hi, got {T_lo}, {T_hi}")
    if T_lo == T_hi:
        return np.array([T_lo])
    if n_T < 2:
        raise InvalidInputError(f"n_T must be >= 2, got {n_T}")
    return np.linspace(T_lo, T_hi, n_T)


def sweep(kernel: Kernel, h: float, T_lo: float, T_hi: float, n_T: int,
          n_theta: int = N_THETA) -> list[SweepRecord]:
    """One :class:`SweepRecord` per period on the uniform grid, branches tracked."""
    return track_branches([_record(kernel, h, float(T), n_theta) for T in period_grid(T_lo, T_hi, n_T)])


# ---------------------------------------------------------------------------
# event indicators
# ---------------------------------------------------------------------------


def _count(kernel: Kernel, h: float, T: float) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return len(find_candidates(PeriodizedKernel(kernel, T), h))


def _branch_spectrum(kernel: Kernel, h: float, T: float, branch: int, n_theta: int):
    pk = PeriodizedKernel(kernel, T)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        roots = find_candidates(pk, h)
    if len(roots) <= branch:
        raise InvalidBracketError(f"branch {branch} does not exist at T={T:g} ({len(roots)} candidates)")
    return spectrum_intervals(BumpSolution(pk, h, roots.roots[branch]), n_theta)


def _indicator(kernel, h, event, branch, n_theta, stab_tol):
    def value(T):
        s = _branch_spectrum(kernel, h, T, branch, n_theta)
        if event == "stability":
            return s.max_lambda - 1.0 - stab_tol
        if event == "lambda2_unity":
            return s.extrema["min_l2"] - (1.0 - stab_tol)
        return s.extrema["min_l2"] - s.extrema["max_l1"]

    return value


def _polish_fold(kernel: Kernel, h: float, lo: float, hi: float, c_lo: int, c_hi: int) -> float:
    """Solve for the exact tangency inside a count-change bracket ``[lo, hi]``."""
    T_more = hi if c_hi > c_lo else lo
    pk_more = PeriodizedKernel(kernel, T_more)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        found = find_candidates(pk_more, h)
    f = lambda a: pk_more.W_p(2.0 * a) - h  # noqa: E731
    if found.tangent:
        # bracket so tight that the pair is already merged into a tangent root
        r1 = r2 = found.tangent[0]
        pad = 1e-3 + 8.0 * T_more / GRID_N
        d = 1e-4
        curv = f(r1 + d) - 2.0 * f(r1) + f(r1 - d)
        sigma = -math.copysign(1.0, curv)
    elif len(found) >= 2:
        gaps = np.diff(found.roots)
        i = int(np.argmin(gaps))
        r1, r2 = found.roots[i], found.roots[i + 1]
        pad = gaps[i] + 1e-3
        # f keeps this sign between the pair and has an extremum there
        sigma = math.copysign(1.0, f(0.5 * (r1 + r2)))
    else:
        raise NumericalError("fold bracket has no root pair to polish")

    def g(T):
        pk = PeriodizedKernel(kernel, T)
        lo_a, hi_a = max(r1 - pad, 1e-12), min(r2 + pad, T / 2.0)
        _, val = golden_section(lambda a: sigma * (pk.W_p(2.0 * a) - h), lo_a, hi_a, maximize=True,
                                x_tol=1e-14)
        return val

    g_lo, g_hi = g(lo), g(hi)
    # a tangent flag only means |f| <= f_tol, so a tight count bracket may sit
    # entirely on one side of the exact tangency: widen it until g changes sign
    mid, w = 0.5 * (lo + hi), max(hi - lo, 1e-9)
    for _ in range(20):
        if g_lo * g_hi <= 0:
            break
        lo, hi, w = max(lo - w, 0.5 * lo), hi + w, 2.0 * w
        g_lo, g_hi = g(lo), g(hi)
    else:
        return mid
    return bisect(g, lo, hi, x_tol=1e-14, f_lo=g_lo, f_hi=g_hi)


def fold_witness(kernel: Kernel, h: float, T: float) -> list[float]:
    """Tangent-flagged candidates at period ``T``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return find_candidates(PeriodizedKernel(kernel, T), h).tangent


def locate_critical(kernel: Kernel, h: float, bracket: Interval | tuple[float, float], event: Event,
                    tol: float = T_TOL, branch: int = 1, n_theta: int = N_THETA,
                    stab_tol: float = STAB_TOL) -> float:
    """Period at which ``event`` happens inside ``bracket``, to within ``tol``.

    ``branch`` indexes candidates in ascending ``a`` (0 = narrowest bump) and
    is ignored for folds. Fold periods are polished onto the exact tangency so
    that a tangent root is reported there.
    """
    if not isinstance(bracket, Interval):
        bracket = Interval(*bracket)
    if event not in EVENTS:
        raise InvalidInputError(f"unknown event {event!r}; expected one of {EVENTS}")
    lo, hi = bracket.lo, bracket.hi
    if not 0 < lo < hi:
        raise InvalidBracketError(f"invalid bracket [{lo}, {hi}]")

    if event == "fold":
        c_lo, c_hi = _count(kernel, h, lo), _count(kernel, h, hi)
        if c_lo == c_hi:
            raise InvalidBracketError(f"candidate count {c_lo} identical at both ends of [{lo}, {hi}]")
        c_hi0 = c_hi
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            c = _count(kernel, h, mid)
            if c == c_lo:
                lo = mid
            else:
                hi, c_hi = mid, c
        T_star = _polish_fold(kernel, h, lo, hi, c_lo, c_hi if c_hi != c_lo else c_hi0)
        if not fold_witness(kernel, h, T_star):
            warnings.warn(f"no tangent root detected at polished fold T={T_star:.12g}", RuntimeWarning,
                          stacklevel=2)
        return T_star

    value = _indicator(kernel, h, event, branch, n_theta, stab_tol)
    v_lo, v_hi = value(lo), value(hi)
    if event == "gap_closure" and (v_lo > 0) == (v_hi > 0):
        T_min, gap = golden_section(value, lo, hi, x_tol=tol)
        if gap > GAP_TOL:
            raise InvalidBracketError(f"spectral gap stays above {gap:.3g} on [{lo}, {hi}]")
        return T_min
    if (v_lo > 0) == (v_hi > 0):
        raise InvalidBracketError(f"{event} indicator has the same sign at both ends of [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        v = value(mid)
        if (v > 0) == (v_lo > 0):
            lo, v_lo = mid, v
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_periods(kernel: Kernel, h: float, T_lo: float, T_hi: float, n_T: int = 56,
                     branch: int = 1, tol: float = T_TOL, n_theta: int = N_THETA) -> CriticalPeriods:
    """Scan ``[T_lo, T_hi]`` for events and refine each by :func:`locate_critical`.

    ``T1`` is the first fold, ``T2`` the first stability change of ``branch``;
    later folds, further stability changes, unit crossings of ``min lambda2``
    and gap closures go to ``extra_events``.
    """
    records = [_record(kernel, h, float(T), n_theta) for T in period_grid(T_lo, T_hi, n_T)]
    out = CriticalPeriods()
    for prev, cur in zip(records, records[1:]):
        if prev.error or cur.error:
            continue
        span = (prev.T, cur.T)
        if len(prev.candidates) != len(cur.candidates):
            T = locate_critical(kernel, h, span, "fold", tol)
            if out.T1 is None:
                out.T1 = T
            else:
                out.extra_events.append((T, "fold: candidate count changes"))
            continue
        if len(cur.candidates) <= branch:
            continue
        p, c = prev.candidates[branch], cur.candidates[branch]
        if p.verdict is None or c.verdict is None:
            continue
        if p.verdict != c.verdict:
            T = locate_critical(kernel, h, span, "stability", tol, branch, n_theta)
            if out.T2 is None:
                out.T2 = T
            else:
                out.extra_events.append((T, f"stability change of branch {branch}"))
        unity = 1.0 - STAB_TOL
        if (p.min_l2 >= unity) != (c.min_l2 >= unity):
            T = locate_critical(kernel, h, span, "lambda2_unity", tol, branch, n_theta)
            out.extra_events.append((T, f"min lambda2 of branch {branch} drops below 1 (no bifurcation)"))
        if (p.min_l2 > p.max_l1) != (c.min_l2 > c.max_l1):
            T = locate_critical(kernel, h, span, "gap_closure", tol, branch, n_theta)
            out.extra_events.append((T, f"spectral gap of branch {branch} closes"))
    out.extra_events.extend(_gap_touches(kernel, h, records, branch, tol, n_theta))
    out.extra_events.sort()
    return out


def _gap(c: CandidateRecord) -> float:
    return c.min_l2 - c.max_l1


def _gap_touches(kernel, h, records, branch, tol, n_theta):
    """Interior local minima of the positive gap that reach zero."""
    found = []
    for r0, r1, r2 in zip(records, records[1:], records[2:]):
        if any(r.error or len(r.candidates) <= branch for r in (r0, r1, r2)):
            continue
        g = [_gap(r.candidates[branch]) for r in (r0, r1, r2)]
        if any(math.isnan(v) for v in g) or min(g) <= 0:
            continue
        if g[1] <= g[0] and g[1] <= g[2]:
            try:
                T = locate_critical(kernel, h, (r0.T, r2.T), "gap_closure", tol, branch, n_theta)
            except InvalidBracketError:
                continue
            found.append((T, f"spectral gap of branch {branch} closes"))
    return found
