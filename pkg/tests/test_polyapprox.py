import numpy as np
import pytest

from _oracles import min_norm_on_simplex
from multical import polyapprox
from multical.errors import DegreeBudgetExceeded
from multical.polyapprox import (
    UnivariatePoly,
    chebyshev_t,
    coeff_abs_sum,
    composed_norm_bound,
    jackson_approx,
    loose_norm_bound,
    tanh_approx,
    tanh_degree_budget,
)

FRESH = np.random.default_rng(99).uniform(-1, 1, 20000)


def _chebyshev_by_recurrence(n):
    """Monomial coefficients of T_n from T_{n+1} = 2t T_n - T_{n-1}."""
    prev, cur = np.array([1.0]), np.array([0.0, 1.0])
    if n == 0:
        return prev
    for _ in range(n - 1):
        nxt = np.zeros(len(cur) + 1)
        nxt[1:] = 2 * cur
        nxt[:len(prev)] -= prev
        prev, cur = cur, nxt
    return cur


def test_identity_is_rescaled():
    p, cert = jackson_approx(lambda t: t, 0.1)
    assert np.allclose(p.coeffs[:2], [0, 1 / 1.05], atol=1e-12)
    assert np.allclose(p.coeffs[2:], 0, atol=1e-12)
    assert cert.ok and cert.measured_sup_error <= 0.1


def test_abs_value():
    p, cert = jackson_approx(np.abs, 0.1)
    assert p.degree <= 640
    assert cert.ok
    assert np.max(np.abs(p(FRESH) - np.abs(FRESH))) <= 0.1


def test_zero_function():
    p, cert = jackson_approx(lambda t: 0 * t, 0.1)
    assert np.all(p.coeffs == 0) and cert.measured_sup_error == 0


def test_jackson_rejects_steep_input():
    with pytest.raises(ValueError):
        jackson_approx(lambda t: np.clip(5 * t, -1, 1), 0.1)
    with pytest.raises(ValueError):
        jackson_approx(lambda t: t, 0.6)


def test_degree_budget_guard():
    # a jump cannot be matched to eps/2 at any modest degree
    grid = polyapprox.certification_grid()
    with pytest.raises(DegreeBudgetExceeded):
        polyapprox._interpolate(np.sign, 0.1, 64, grid, np.sign(grid))


@pytest.mark.parametrize("L, b", [(1.0, 0.0), (1.0, 50.0), (2.0, 0.3), (4.0, -1.0)])
def test_tanh_certificates(L, b):
    p, cert = tanh_approx(L, b, 0.1)
    assert cert.ok
    assert p.degree <= tanh_degree_budget(L, 0.1)
    assert np.max(np.abs(p(FRESH) - np.tanh(L * FRESH + b))) <= 0.1
    assert np.max(np.abs(p(FRESH))) <= 1 + 1e-12


def test_tanh_near_constant_has_small_degree():
    p, _ = tanh_approx(1.0, 50.0, 0.1)
    assert p.degree <= 1


def test_tanh_odd_for_zero_bias():
    p, _ = tanh_approx(2.0, 0.0, 0.05)
    assert np.all(np.abs(p.coeffs[0::2]) <= 1e-9)


def test_coeff_abs_sum_examples():
    assert coeff_abs_sum(UnivariatePoly([0.0, 1.0])) == 1
    assert coeff_abs_sum(chebyshev_t(3)) == 7
    t8 = _chebyshev_by_recurrence(8)
    assert np.allclose(chebyshev_t(8).coeffs, t8)
    assert coeff_abs_sum(chebyshev_t(8)) == np.abs(t8).sum() == 577 <= 4**8


def test_composed_norm_examples():
    assert composed_norm_bound(UnivariatePoly([0.0, 1.0]), [1.0, 0.0]) == pytest.approx(1.0)
    assert composed_norm_bound(UnivariatePoly([0.0]), [1.0, 0.0]) == 0.0
    a = np.array([1.0, 1.0]) / np.sqrt(2)
    t2 = chebyshev_t(2)
    exact, natural = min_norm_on_simplex(t2.coeffs, a, 2, 2)
    assert composed_norm_bound(t2, a) >= exact - 1e-9
    assert composed_norm_bound(t2, a) == pytest.approx(natural)
    assert loose_norm_bound(t2, a) >= composed_norm_bound(t2, a)
