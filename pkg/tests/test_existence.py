import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from periodic_bumps import (
    Exponential,
    OscillatoryDecay,
    PeriodizedKernel,
    WizardHat,
    derivative_at_a,
    eval_solution,
    find_candidates,
    solutions,
    solve,
    verify,
)
from periodic_bumps.errors import InvalidInputError
from periodic_bumps.existence import BumpSolution
from periodic_bumps.numerics import X_TOL

from .oracles import direct_omega_p

WH = WizardHat(4.0, 2.0, 1.5, 1.0)


def exp_W_p_direct(S, s, T, x, K=80):
    """Term-wise primitive of the lattice sum of S exp(-s|x|)."""
    k = np.arange(-K, K + 1) * T
    prim = lambda y: np.sign(y) * (1.0 - np.exp(-s * np.abs(y))) / s  # noqa: E731
    return S * float(np.sum(prim(x - k) - prim(-k)))


def test_exponential_root_matches_brentq():
    S, s, T, h = 0.5, 1.0, 4.0, 0.4
    roots = find_candidates(PeriodizedKernel(Exponential(S, s), T), h)
    ref = optimize.brentq(lambda a: exp_W_p_direct(S, s, T, 2 * a) - h, 1e-9, T / 2 - 1e-9, xtol=1e-14)
    assert len(roots) == 1
    assert roots.roots[0] == pytest.approx(ref, abs=1e-9)


@given(st.floats(0.2, 2.0), st.floats(0.3, 3.0), st.floats(0.5, 15.0), st.floats(0.05, 0.95))
@settings(max_examples=50, deadline=None)
def test_exponential_unique_root_property(S, s, T, frac):
    # W_p(2a) is increasing on (0, T/2) for a positive kernel, so exactly one
    # root exists whenever 0 < h < W_p(T) = h0/2
    k = Exponential(S, s)
    pk = PeriodizedKernel(k, T)
    h = frac * pk.h0 / 2.0
    rl = find_candidates(pk, h)
    assert len(rl) == 1
    # the residual scales with the slope, so check the root is bracketed to x_tol
    a = rl.roots[0]
    assert pk.W_p(2 * (a - X_TOL)) <= h <= pk.W_p(2 * (a + X_TOL))


@pytest.mark.parametrize("T, n", [(1.5, 1), (3.2, 3), (7.0, 3)])
def test_roots_solve_threshold_equation(T, n):
    pk = PeriodizedKernel(WH, T)
    rl = find_candidates(pk, 0.4)
    assert len(rl) == n
    assert list(rl.roots) == sorted(rl.roots)
    for a in rl.roots:
        assert 0 < a < T / 2
        assert abs(pk.W_p(2 * a) - 0.4) <= 1e-9


def test_candidates_found_against_dense_scan():
    # independent count: sign changes on a fine grid of the direct-sum antiderivative
    T, h = 3.5, 0.4
    a = np.linspace(1e-6, T / 2 - 1e-6, 20001)
    pk = PeriodizedKernel(WH, T, "series")
    g = pk.W_p(2 * a) - h
    assert len(find_candidates(PeriodizedKernel(WH, T), h)) == int(np.sum(np.diff(np.sign(g)) != 0))


def test_solution_profile_identity(wh_sols_32):
    sol = wh_sols_32[1]
    xs = np.linspace(-3.0, 5.0, 17)
    u = eval_solution(sol, xs)
    for x, ux in zip(xs, u):
        ref = integrate.quad(lambda y: float(direct_omega_p(WH, sol.T, x - y)), -sol.a, sol.a,
                             points=[x - k * sol.T for k in range(-3, 4) if -sol.a < x - k * sol.T < sol.a] or None,
                             epsabs=1e-13, limit=200)[0]
        assert ux == pytest.approx(ref, abs=1e-8)


def test_solution_even_and_periodic(wh_sols_32):
    for sol in wh_sols_32:
        xs = np.linspace(0, sol.T, 33)
        assert np.allclose(sol(xs), sol(-xs), atol=1e-12)
        assert np.allclose(sol(xs), sol(xs + sol.T), atol=1e-12)
        assert sol(sol.a) == pytest.approx(0.4, abs=1e-9)


def test_regularity_matches_finite_difference(wh_sols_32):
    for sol in wh_sols_32:
        eps = 1e-7  # u_p'' jumps at x = a, so the central difference is only O(eps)
        du = (sol(sol.a + eps) - sol(sol.a - eps)) / (2 * eps)
        assert -du == pytest.approx(derivative_at_a(sol), abs=1e-6)
        assert sol.is_regular


def test_verify_accepts_wizard_hat(wh_sols_32):
    for sol in wh_sols_32:
        rep = verify(sol)
        assert rep.accepted
        assert rep.worst_margin > 0
        assert rep.lipschitz > 0


def test_verify_rejects_non_solution():
    # a point that is not a root fails the threshold condition
    pk = PeriodizedKernel(WH, 3.2)
    rep = verify(BumpSolution(pk, 0.4, 0.5))
    assert not rep.condition1 and not rep.accepted


def test_oscillatory_candidates_rejected_by_sign_conditions():
    # with a strongly oscillating kernel some roots exist but fail the sign tests
    pk = PeriodizedKernel(OscillatoryDecay(0.15), 20.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sols = solutions(pk, 0.1)
    reports = [verify(s) for s in sols]
    assert len(sols) >= 2
    assert any(r.accepted for r in reports) and not all(r.accepted for r in reports)


def test_tangent_root_flagged():
    # at the fold period the middle pair of roots merges
    pk = PeriodizedKernel(WH, 2.4996811373)
    rl = find_candidates(pk, 0.4)
    assert rl.tangent and rl.tangent[0] == pytest.approx(0.89086, abs=1e-4)


def test_threshold_above_mass_gives_no_exponential_root():
    pk = PeriodizedKernel(Exponential(0.5, 1.0), 4.0)
    with pytest.warns(RuntimeWarning):
        assert len(find_candidates(pk, 1.5)) == 0


def test_solve_pairs_and_errors():
    out = solve(Exponential(0.5, 1.0), 4.0, 0.4)
    assert len(out) == 1 and out[0][1].accepted
    with pytest.raises(InvalidInputError):
        find_candidates(PeriodizedKernel(WH, 3.0), float("nan"))
    with pytest.raises(InvalidInputError):
        verify(out[0][0], grid_n=10)
