import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from periodic_bumps.errors import ContractViolation, InvalidBracketError, InvalidInputError, NumericalError
from periodic_bumps.numerics import (
    Interval,
    bisect,
    eig_dense,
    eig_hermitian_2x2,
    find_roots,
    golden_section,
    multiset_distance,
)


def test_interval_validation():
    assert Interval(0.0, 1.0).width == 1.0
    assert 0.5 in Interval(0.0, 1.0)
    with pytest.raises(InvalidInputError):
        Interval(1.0, 0.0)
    with pytest.raises(InvalidInputError):
        Interval(0.0, math.inf)


def test_bisect_sqrt2():
    r = bisect(lambda x: x * x - 2.0, 0.0, 2.0, x_tol=1e-13)
    assert abs(r - math.sqrt(2.0)) < 1e-12


def test_bisect_requires_bracket():
    with pytest.raises(InvalidBracketError):
        bisect(lambda x: x * x + 1.0, -1.0, 1.0)


def test_bisect_rejects_nan():
    with pytest.raises(NumericalError):
        bisect(lambda x: math.nan, 0.0, 1.0)


@given(st.floats(-5.0, 5.0), st.floats(0.1, 3.0))
@settings(max_examples=60, deadline=None)
def test_bisect_linear(root, width):
    r = bisect(lambda x: x - root, root - width, root + 0.7 * width, x_tol=1e-12)
    assert abs(r - root) <= 1e-11


def test_golden_section_parabola():
    x, fx = golden_section(lambda t: (t - 0.3) ** 2 + 1.0, -1.0, 2.0, x_tol=1e-10)
    # a smooth minimum is only resolvable to ~sqrt(eps)
    assert abs(x - 0.3) < 1e-7 and abs(fx - 1.0) < 1e-14
    x, fx = golden_section(lambda t: -((t - 0.3) ** 2), -1.0, 2.0, maximize=True, x_tol=1e-10)
    assert abs(x - 0.3) < 1e-7


def test_find_roots_simple_and_tangent():
    # simple roots at 1 and 3, double root at 2
    f = lambda x: (x - 1.0) * (x - 2.0) ** 2 * (x - 3.0)  # noqa: E731
    rl = find_roots(f, Interval(0.0, 4.0), grid_n=400)
    assert len(rl) == 3
    assert np.allclose(rl.roots, [1.0, 2.0, 3.0], atol=1e-4)
    assert rl.multiplicity_flags == ["simple", "tangent", "simple"]
    assert rl.tangent == [rl.roots[1]]


def test_find_roots_sorted_unique_sin():
    rl = find_roots(np.sin, Interval(0.5, 20.0), grid_n=1000, vectorized=True)
    expected = np.pi * np.arange(1, 7)
    assert np.allclose(rl.roots, expected, atol=1e-9)
    assert all(m == "simple" for m in rl.multiplicity_flags)


def test_find_roots_none():
    assert len(find_roots(lambda x: x * x + 1.0, Interval(-2.0, 2.0), grid_n=64)) == 0


def _random_hermitian(rng):
    a, d = rng.normal(size=2)
    b = complex(*rng.normal(size=2))
    return np.array([[a, np.conj(b)], [b, d]])


def test_eig_hermitian_matches_lapack(rng):
    for _ in range(200):
        m = _random_hermitian(rng)
        l1, l2, w1, w2 = eig_hermitian_2x2(m)
        ref = np.linalg.eigvalsh(m)
        assert l1 <= l2
        assert np.allclose([l1, l2], ref, atol=1e-13)
        for lam, w in ((l1, w1), (l2, w2)):
            assert abs(np.linalg.norm(w) - 1.0) < 1e-13
            assert np.linalg.norm(m @ w - lam * w) < 1e-12


def test_eig_hermitian_diagonal_and_degenerate():
    l1, l2, w1, w2 = eig_hermitian_2x2(np.diag([2.0, -1.0]))
    assert (l1, l2) == (-1.0, 2.0)
    l1, l2, w1, w2 = eig_hermitian_2x2(np.eye(2) * 3.0)
    assert l1 == l2 == 3.0
    assert abs(np.vdot(w1, w2)) < 1e-15


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(ContractViolation):
        eig_hermitian_2x2(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_eig_dense_and_multiset_distance(rng):
    m = rng.normal(size=(6, 6))
    ev = eig_dense(m)
    assert np.allclose(np.sort_complex(ev), np.sort_complex(np.linalg.eigvals(m)))
    assert multiset_distance([1.0, 2.0, 3.0], [3.0, 1.0, 2.5]) == pytest.approx(0.5)
