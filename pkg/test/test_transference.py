import numpy as np
import pytest

from openergodic.dynamics.systems import FiniteSystem, Observable
from openergodic.engine.flux.averaging import AverageSpec
from openergodic.engine.flux.maximal import bilinear_maximal
from openergodic.engine.flux.transference import (cauchy_schwarz_residual, correction_factor,
                                                  measure_bilinear_constant, measure_weak_constant,
                                                  system_bilinear_maximal, transfer_bilinear_check,
                                                  transfer_weak_type_check, truncated_orbit_pairs,
                                                  weighted_transfer)
from openergodic.processing.arith import IntPolynomial
from openergodic.utils.errors import DomainError, PreconditionError

N_BAR = 4
J = 32


@pytest.fixture
def setup(rng):
    system = FiniteSystem.random(9, rng)
    f, g = Observable.random(9, rng), Observable.random(9, rng)
    return system, f, g, truncated_orbit_pairs(system, f, g, J)


def test_correction_factor():
    assert correction_factor(64, 8) == pytest.approx(129 / 113)
    assert correction_factor(512, 8) < correction_factor(64, 8)
    assert correction_factor(10 ** 6, 8) == pytest.approx(1.0, abs=1e-4)
    assert correction_factor(64, 8, 'literal') == pytest.approx(129 / 56)


def test_horizon_is_enforced(setup):
    system, f, g, _ = setup
    with pytest.raises(PreconditionError):
        transfer_bilinear_check(system, f, g, 31, N_BAR, 1.0)
    with pytest.raises(DomainError):
        transfer_bilinear_check(system, f, g, J, 0, 1.0)


def test_system_side_agrees_with_orbit_side(setup):
    system, f, g, pairs = setup
    maximal = system_bilinear_maximal(system, f, g, N_BAR)
    for x, (phi, psi) in enumerate(pairs):
        orbit_side = bilinear_maximal(phi, psi, IntPolynomial.identity(), N_BAR)
        assert maximal[x] == pytest.approx(orbit_side.at(0).real, abs=1e-12)


def test_zero_observables_transfer_trivially():
    system = FiniteSystem.cyclic(5)
    zero = Observable.constant(5, 0.0)
    report = transfer_bilinear_check(system, zero, zero, J, N_BAR, 1.0)
    assert report.lhs == 0.0 and report.passed


def test_measured_constants_transfer(setup):
    system, f, g, pairs = setup
    C_emp = measure_bilinear_constant(pairs, N_BAR)
    assert C_emp > 0
    report = transfer_bilinear_check(system, f, g, J, N_BAR, C_emp)
    assert report.passed
    assert report.params['cauchy_schwarz_residual'] <= 1e-9

    levels = (0.25, 1.0, 4.0)
    C_weak = measure_weak_constant(pairs, N_BAR, levels, n_jobs=2)
    for lam in levels:
        assert transfer_weak_type_check(system, f, g, lam, J, N_BAR, C_weak).passed
        assert transfer_weak_type_check(system, f, g, lam, J, N_BAR, C_weak, window='literal').passed


def test_serial_and_threaded_constants_agree(setup):
    _, _, _, pairs = setup
    assert measure_bilinear_constant(pairs, N_BAR) == measure_bilinear_constant(pairs, N_BAR, n_jobs=3)


def test_unit_weights_reduce_to_the_plain_check(setup):
    system, f, g, pairs = setup
    C_emp = measure_bilinear_constant(pairs, N_BAR)
    plain = transfer_bilinear_check(system, f, g, J, N_BAR, C_emp)
    weighted = transfer_bilinear_check(system, f, g, J, N_BAR, C_emp, weights=np.ones(N_BAR))
    assert weighted.lhs == plain.lhs


def test_modulated_weights(setup):
    system, f, g, pairs = setup
    weights = np.exp(1j * 0.7 * np.arange(1, N_BAR + 1))
    C_emp = measure_bilinear_constant(pairs, N_BAR, weights)
    C_weak = measure_weak_constant(pairs, N_BAR, [0.5], weights)
    identity = IntPolynomial.identity()
    spec = AverageSpec(kind='bilinear', P=identity, Q=-identity, weights=weights)
    reports = weighted_transfer(system, f, g, spec, J, N_BAR, C_emp, lams=[0.5], C_weak=C_weak)
    assert [r.name for r in reports] == ['transfer_bilinear', 'transfer_weak_type']
    assert all(r.passed for r in reports)
    assert reports[0].params['weighted']


def test_weighted_transfer_preconditions(setup):
    system, f, g, pairs = setup
    with pytest.raises(PreconditionError):
        weighted_transfer(system, f, g, AverageSpec(), J, N_BAR, 1.0)
    identity = IntPolynomial.identity()
    spec = AverageSpec(kind='bilinear', P=identity, Q=-identity)
    with pytest.raises(PreconditionError):
        weighted_transfer(system, f, g, spec, J, N_BAR, 1.0, lams=[1.0])
    with pytest.raises(PreconditionError):
        measure_bilinear_constant(pairs, N_BAR, weights=np.ones(2))
    with pytest.raises(DomainError):
        measure_weak_constant(pairs, N_BAR, [0.0])


def test_cauchy_schwarz_residual(split_system, rng):
    f, g = Observable.random(7, rng), Observable.random(7, rng)
    assert cauchy_schwarz_residual(split_system, f, g, 20) <= 1e-9
