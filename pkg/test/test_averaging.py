import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from openergodic.dynamics.systems import FiniteSystem, Observable, coboundary
from openergodic.engine.flux.averaging import (AverageSpec, SignalAverage, bilinear_avg, bilinear_periodic_limit,
                                               bilinear_signal_avg, birkhoff, cesaro_kernel, iter_signal_rows,
                                               iter_system_rows, prime_avg, prime_bilinear_avg, signal_avg,
                                               signal_window, system_average_table)
from openergodic.processing.arith import IntPolynomial, from_monomial, sieve
from openergodic.processing.signal_core import Signal, convolve, random_signal
from openergodic.utils.errors import DomainError, PreconditionError


def test_constant_observable_averages_to_itself(split_system):
    f = Observable.constant(7, 2 - 1j)
    assert birkhoff(split_system, f, 4, 13) == pytest.approx(2 - 1j)


def test_ergodic_average_over_full_periods(cyclic7, observable7):
    assert birkhoff(cyclic7, observable7, 3, 21) == pytest.approx(observable7.mean(), abs=1e-12)


@given(st.integers(1, 10), st.integers(0, 2 ** 16), st.integers(1, 300))
@settings(max_examples=100)
def test_coboundary_averages_telescope(m, seed, N):
    rng = np.random.default_rng(seed)
    system = FiniteSystem.random(m, rng)
    g = Observable.random(m, rng)
    x = int(rng.integers(m))
    expected = (g.values[system.orbit_points(x, 1)] - g.values[system.orbit_points(x, N + 1)]) / N
    assert abs(birkhoff(system, coboundary(system, g), x, N) - expected) <= 1e-12 * max(1.0, g.max_abs())


def test_bilinear_along_identity_is_birkhoff_of_product(split_system, rng):
    f, g = Observable.random(7, rng), Observable.random(7, rng)
    P = IntPolynomial.identity()
    assert bilinear_avg(split_system, f, g, 1, 17, P, P) == pytest.approx(birkhoff(split_system, f * g, 1, 17))


def test_prime_average(cyclic7, observable7):
    table = sieve(100)
    Q = IntPolynomial.identity()
    expected = np.mean(observable7.values[[(0 + p) % 7 for p in (2, 3, 5, 7)]])
    assert prime_avg(cyclic7, observable7, 0, 10, Q, table) == pytest.approx(expected)
    with pytest.raises(DomainError):
        prime_avg(cyclic7, observable7, 0, 1, Q, table)
    with pytest.raises(PreconditionError):
        prime_avg(cyclic7, observable7, 0, 200, Q, table)


def test_system_rows_match_pointwise_averages(split_system, rng):
    f = Observable.random(7, rng)
    rows = dict(iter_system_rows(split_system, f, AverageSpec(), [12, 1, 5, 5]))
    assert sorted(rows) == [1, 5, 12]
    for N, row in rows.items():
        expected = [birkhoff(split_system, f, x, N) for x in range(7)]
        assert np.allclose(row, expected, atol=1e-12)


def test_unit_weights_match_the_plain_average(cyclic7, observable7):
    plain = system_average_table(cyclic7, observable7, AverageSpec(), [3, 8])
    weighted = system_average_table(cyclic7, observable7, AverageSpec(weights=np.ones(8)), [3, 8])
    assert np.allclose(plain, weighted, atol=1e-12)
    with pytest.raises(PreconditionError):
        system_average_table(cyclic7, observable7, AverageSpec(weights=np.ones(4)), [8])


def test_bilinear_limit_is_reached_on_whole_periods(split_system, rng):
    f, g = Observable.random(7, rng), Observable.random(7, rng)
    P, Q = IntPolynomial.identity(), from_monomial([0, 0, 1])
    for x in (0, 4):
        limit, period = bilinear_periodic_limit(split_system, f, g, x, P, Q)
        assert period == 2 * int(split_system.period(x))
        assert bilinear_avg(split_system, f, g, x, 5 * period, P, Q) == pytest.approx(limit, abs=1e-12)


def test_spec_validation():
    with pytest.raises(DomainError):
        AverageSpec(kind='trilinear')
    with pytest.raises(DomainError):
        AverageSpec(kind='bilinear')
    with pytest.raises(DomainError):
        AverageSpec(index='lacunary', rho=1.0)
    assert AverageSpec().is_shift
    assert not AverageSpec(P=from_monomial([0, 0, 1])).is_shift


def test_signal_average_is_a_convolution(rng):
    s = random_signal(rng, 30, offset=-7)
    N = 6
    smoothed = convolve(s, cesaro_kernel(N))
    for x in range(-14, 24, 5):
        assert signal_avg(s, x, N) == pytest.approx(smoothed.at(x), abs=1e-12)


def test_shift_fast_path_agrees_with_generic_rows(rng):
    s = random_signal(rng, 25, offset=3)
    fast, generic = AverageSpec(), AverageSpec(weights=np.ones(16))
    x_start, width = signal_window(s, fast, 16)
    assert (x_start, width) == (3 - 16, 25 + 15)
    fast_rows = dict(iter_signal_rows(s, fast, x_start, width, [1, 4, 16]))
    generic_rows = dict(iter_signal_rows(s, generic, x_start, width, [1, 4, 16]))
    for N in (1, 4, 16):
        assert np.allclose(fast_rows[N], generic_rows[N], atol=1e-12)


def test_signal_average_node_on_a_delta():
    out = SignalAverage(4)(Signal.delta(0))
    assert out.offset == -4
    assert np.allclose(out.values, 0.25)


def test_bilinear_signal_rows_agree_with_pointwise(rng):
    f, g = random_signal(rng, 12, offset=-3), random_signal(rng, 9, offset=2)
    P = from_monomial([0, 0, 1])
    spec = AverageSpec(kind='bilinear', P=P, Q=-P)
    x_start, width = signal_window(f, spec, 5, g=g)
    (_, row), = iter_signal_rows(f, spec, x_start, width, [5], g=g)
    for i in range(width):
        assert row[i] == pytest.approx(bilinear_signal_avg(f, g, x_start + i, 5, P), abs=1e-12)


def test_prime_bilinear_along_identity(cyclic7, rng):
    f, g = Observable.random(7, rng), Observable.random(7, rng)
    table = sieve(50)
    P = IntPolynomial.identity()
    assert prime_bilinear_avg(cyclic7, f, g, 2, 50, P, P, table) == \
        pytest.approx(prime_avg(cyclic7, f * g, 2, 50, P, table))
