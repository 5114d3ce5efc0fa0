import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from openergodic.dynamics.systems import FiniteSystem, Observable
from openergodic.engine.core.report import worst
from openergodic.engine.flux.averaging import AverageSpec, signal_avg
from openergodic.engine.flux.maximal import (MaximalOperator, bilinear_holder_check, bilinear_maximal,
                                             bilinear_maximal_check, empirical_constant, ensemble_constants,
                                             hl_window_max, hopf_weak_type, poly_maximal, poly_maximal_check,
                                             prime_poly_maximal, shift_maximal, shift_maximal_check, system_maximal)
from openergodic.processing.arith import IntPolynomial, from_monomial, lacunary, sieve
from openergodic.processing.signal_core import Signal, random_signal
from openergodic.utils.errors import DomainError, PreconditionError


@given(st.lists(st.floats(0, 100), min_size=0, max_size=40), st.floats(1.05, 6.0))
@settings(max_examples=200)
def test_hl_window_inequality(a, r):
    report = hl_window_max(a, r)
    assert report.passed
    assert report.constant_used == pytest.approx(2 * (r / (r - 1)) ** r)


def test_hl_window_rejects_bad_input():
    with pytest.raises(DomainError):
        hl_window_max([1.0, -0.5], 2.0)
    with pytest.raises(DomainError):
        hl_window_max([1.0], 1.0)


def test_shift_maximal_of_a_delta():
    M = shift_maximal(Signal.delta(0), 5)
    assert M.offset == -5
    assert np.allclose(M.values, [1 / 5, 1 / 4, 1 / 3, 1 / 2, 1])


def test_shift_maximal_matches_brute_force(rng):
    s = random_signal(rng, 10, offset=-2)
    index = lacunary(2.0, 8)
    M = shift_maximal(s, 8, index)
    for x in range(M.offset, M.last + 1):
        expected = max(abs(signal_avg(s, x, N)) for N in index)
        assert M.at(x).real == pytest.approx(expected, abs=1e-12)


@given(st.integers(0, 2 ** 16), st.sampled_from([1.5, 2.0, 3.0, math.inf]))
@settings(max_examples=50)
def test_shift_maximal_inequality(seed, r):
    s = random_signal(np.random.default_rng(seed), 32)
    assert shift_maximal_check(s, r, 64).passed


def test_poly_and_prime_maximal(rng):
    s = random_signal(rng, 20)
    Q = from_monomial([0, 0, 1])
    assert poly_maximal(s, Q, 4).last == 19 - 1
    with pytest.raises(DomainError):
        poly_maximal(s, IntPolynomial((3,)), 4)
    table = sieve(50)
    M = prime_poly_maximal(s, IntPolynomial.identity(), 40, table)
    assert np.all(M.values.real >= 0)
    with pytest.raises(PreconditionError):
        prime_poly_maximal(s, IntPolynomial.identity(), 60, table)


@given(st.integers(0, 2 ** 16), st.sampled_from([1.0, 2.0, 4.0, math.inf]))
@settings(max_examples=50)
def test_bilinear_holder_bound(seed, r):
    rng = np.random.default_rng(seed)
    f, g = random_signal(rng, 16, offset=-8), random_signal(rng, 16)
    assert bilinear_holder_check(f, g, from_monomial([0, 0, 1]), 12, r).passed


def test_bilinear_maximal_check_modes(rng):
    f, g = random_signal(rng, 16), random_signal(rng, 16, offset=4)
    P = IntPolynomial.identity()
    empirical = bilinear_maximal_check(f, g, P, 8, 2.0)
    assert empirical.passed and empirical.params['ratio'] > 0
    bound = bilinear_maximal_check(f, g, P, 8, 2.0, constant=2 * empirical.params['ratio'])
    assert bound.passed
    assert np.all(bilinear_maximal(f, Signal.zeros(0), P, 8).values == 0)


def test_hopf_weak_type_on_random_systems(rng):
    for m in (1, 5, 12):
        system = FiniteSystem.random(m, rng)
        f = Observable.random(m, rng, nonnegative=True)
        for lam in (0.1, 0.5, 0.9):
            report = hopf_weak_type(system, f, lam)
            assert report.passed
            assert report.params["N_max"] == 4 * m
    with pytest.raises(DomainError):
        hopf_weak_type(FiniteSystem.cyclic(3), Observable.constant(3, 1.0), 0.0)


def test_system_maximal_of_a_constant(split_system):
    assert np.allclose(system_maximal(split_system, Observable.constant(7, -3.0), 10), 3.0)


def test_ensemble_constants_keep_order(rng):
    signals = [random_signal(rng, n) for n in (4, 9, 16)] + [Signal.zeros(3)]
    operator = MaximalOperator(10, AverageSpec())
    serial = ensemble_constants(signals, operator, 2.0)
    threaded = ensemble_constants(signals, operator, 2.0, n_jobs=2)
    assert serial == threaded
    assert serial[-1] == 0.0


def test_hopf_on_the_two_point_swap():
    swap, f = FiniteSystem([1, 0]), Observable([1.0, 0.0])
    assert np.allclose(system_maximal(swap, f, 8), [0.5, 1.0])
    report = hopf_weak_type(swap, f, 0.6)
    assert report.lhs == pytest.approx(0.3)
    assert report.rhs == pytest.approx(0.5)
    assert report.passed
    assert report.params["stabilization"] <= 1e-12


def test_hopf_fails_when_the_horizon_has_not_stabilized():
    swap, f = FiniteSystem([1, 0]), Observable([1.0, 0.0])
    # N <= 1 misses A_2 f(0) = 1/2
    report = hopf_weak_type(swap, f, 0.6, horizon=1)
    assert report.lhs <= report.rhs
    assert report.params["stabilization"] == pytest.approx(0.5)
    assert not report.passed
    precomputed = hopf_weak_type(swap, f, 0.6, maximal=system_maximal(swap, f, 1), horizon=1)
    assert not precomputed.passed
    assert worst("hopf", [hopf_weak_type(swap, f, 0.6), report]).params["violations"] == 1
    assert not worst("hopf", [hopf_weak_type(swap, f, 0.6), report]).passed


def test_maximal_values_grow_with_the_horizon(rng, split_system):
    s = random_signal(rng, 12, offset=-3)
    short, long = shift_maximal(s, 6), shift_maximal(s, 24)
    for x in range(short.offset, short.last + 1):
        assert long.at(x).real >= short.at(x).real - 1e-12
    f = Observable.random(7, rng)
    assert np.all(system_maximal(split_system, f, 20) >= system_maximal(split_system, f, 10) - 1e-12)


def test_linear_polynomial_maximal_is_the_shift_maximal(rng):
    s = random_signal(rng, 15, offset=4)
    shift, poly = shift_maximal(s, 12), poly_maximal(s, from_monomial([0, 1]), 12)
    assert poly.offset == shift.offset
    assert np.array_equal(poly.values, shift.values)


def test_bilinear_maximal_of_opposite_deltas():
    M = bilinear_maximal(Signal.delta(1), Signal.delta(-1), IntPolynomial.identity(), 6)
    assert M.at(0).real == pytest.approx(1.0)
    assert all(M.at(x) == 0 for x in range(M.offset, M.last + 1) if x != 0)


def test_polynomial_maximal_reports_the_empirical_constant(rng):
    s = random_signal(rng, 20)
    Q = from_monomial([0, 0, 1])
    report = poly_maximal_check(s, Q, 2.0, 16)
    assert report.passed
    assert report.params["C_emp"] == pytest.approx(empirical_constant(poly_maximal(s, Q, 16), s, 2.0))
    assert set(shift_maximal_check(s, 2.0, 16).params) <= set(report.params)
    prime = poly_maximal_check(s, IntPolynomial.identity(), 2.0, 20, sieve(20))
    assert prime.name == "prime_maximal" and prime.params["C_emp"] > 0
