import math

import numpy as np
import pytest

from _oracles import smooth_scalar_lp
from multical.data import aggregate
from multical.errors import BadPrior, InvalidMagnitude
from multical.measures import (
    classwise_ce,
    confidence_ce,
    decision_ce_bruteforce,
    ece_canonical,
    fsce_exact,
    psce_oracle,
    ssce_m,
    subset_smooth_ce,
    toplabel_ce,
)
from multical.synth import Prior, gen_calibrated, gen_sigmoid_violation, gen_subset_violation

ALL = [classwise_ce, confidence_ce, toplabel_ce, ece_canonical, fsce_exact,
       decision_ce_bruteforce, lambda e: ssce_m(e, 2), lambda e: psce_oracle(e, 2)]


@pytest.mark.parametrize("measure", ALL)
def test_stratified_fixed_point_is_exactly_calibrated(measure):
    emp = gen_calibrated(Prior.fixed_points([[0.5, 0.5]]), 10, stratified=True)
    assert measure(emp).value == pytest.approx(0.0, abs=1e-12)


def test_exact_population_is_calibrated():
    emp = gen_calibrated(Prior.fixed_points([[0.2, 0.3, 0.5], [0.6, 0.4, 0.0]]), 0, exact=True)
    assert fsce_exact(emp).value <= 1e-9
    assert ece_canonical(emp).value <= 1e-9


def test_dirichlet_noise_floor():
    emp = gen_calibrated(Prior.dirichlet([1, 1, 1]), 2000, seed=0)
    assert ssce_m(emp, 2).value <= 0.15


def test_generators_deterministic():
    a = gen_calibrated(Prior.dirichlet([1, 2, 3]), 50, seed=4)
    b = gen_calibrated(Prior.dirichlet([1, 2, 3]), 50, seed=4)
    assert np.array_equal(a.V, b.V) and np.array_equal(a.labels, b.labels)
    s1, _ = gen_subset_violation(3, [0], 0.3, n=40, seed=1)
    s2, _ = gen_subset_violation(3, [0], 0.3, n=40, seed=1)
    assert np.array_equal(s1.labels, s2.labels)


def test_uniform_vertices():
    emp = gen_calibrated(Prior.uniform_vertices(3), 30, seed=0)
    assert ece_canonical(emp).value == 0


def test_bad_priors():
    with pytest.raises(BadPrior):
        Prior.dirichlet([1.0, -1.0])
    with pytest.raises(BadPrior):
        Prior.fixed_points([[0.5, 0.6]])
    with pytest.raises(BadPrior):
        gen_calibrated("dirichlet", 10)
    with pytest.raises(BadPrior):
        gen_calibrated(Prior.dirichlet([1, 1]), 10, exact=True)


def test_subset_zero_magnitude():
    emp, alpha = gen_subset_violation(3, [0, 1], 0.0, exact=True)
    assert alpha == 0 and fsce_exact(emp).value <= 1e-9


def test_subset_certified_matches_measure_and_lp():
    emp, alpha = gen_subset_violation(3, [1, 2], 0.2, exact=True)
    assert alpha == pytest.approx(0.1)
    assert subset_smooth_ce(emp, [1, 2]).value == pytest.approx(alpha, abs=1e-9)
    U, R, _ = aggregate(emp)
    assert smooth_scalar_lp(U[:, [1, 2]].sum(axis=1), R[:, [1, 2]].sum(axis=1)) == pytest.approx(alpha, abs=1e-9)
    for m in (2, 3):
        assert ssce_m(emp, m).value >= alpha - 1e-9


@pytest.mark.parametrize("gap", [0.4, 1.0])
def test_subset_gap_parameter(gap):
    emp, alpha = gen_subset_violation(4, [0], 0.3, gap=gap, exact=True)
    assert alpha == pytest.approx(0.3 * gap / 2)
    assert subset_smooth_ce(emp, [0]).value == pytest.approx(alpha, abs=1e-9)


def test_subset_invalid_magnitude():
    with pytest.raises(InvalidMagnitude):
        gen_subset_violation(3, [0], 1.5)


def test_sigmoid_zero_and_closed_form():
    emp, alpha = gen_sigmoid_violation(3, [1, -1, 0], 0.5, 2.0, 0.0, exact=True)
    assert alpha == 0 and fsce_exact(emp).value <= 1e-9
    support = np.array([[0.5, 0.5, 0.0], [0.25, 0.25, 0.5]])
    a, b, L, gamma = np.array([1.0, 0.0, -1.0]), 0.2, 2.0, 0.2
    emp, alpha = gen_sigmoid_violation(3, a, b, L, gamma, support=support, exact=True)
    g1, g2 = math.tanh(2 * 0.5 + 0.2), math.tanh(2 * -0.25 + 0.2)
    assert alpha == pytest.approx(2 * gamma * (g1**2 + g2**2) / 2, abs=1e-12)
    # the planted weight g(v)(e_0 - e_1) attains exactly the certified value
    g = np.tanh(L * (emp.V @ a) + b)
    W = np.zeros_like(emp.V)
    W[:, 0], W[:, 1] = g, -g
    assert emp.correlation(W) == pytest.approx(alpha, abs=1e-12)


def test_sigmoid_invalid_magnitude():
    with pytest.raises(InvalidMagnitude):
        gen_sigmoid_violation(3, [1, 0, 0], 3.0, 2.0, 0.9)
