import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from openergodic.dynamics.systems import (FiniteSystem, Observable, RotationOrbit, coboundary, invariant_split,
                                          orbit_values, rotation_samples)
from openergodic.utils.errors import DomainError


@pytest.mark.parametrize("mapping", [[0, 0, 1], [1, 2, 3], []])
def test_non_permutations_are_rejected(mapping):
    with pytest.raises(DomainError):
        FiniteSystem(mapping)


def test_cycle_structure(split_system):
    assert not split_system.is_ergodic()
    assert sorted(len(c) for c in split_system.cycles()) == [3, 4]
    assert split_system.cycle_period_lcm() == 12
    assert split_system.period([0, 5]).tolist() == [3, 4]
    assert FiniteSystem.cyclic(5).is_ergodic()
    assert len(FiniteSystem.cyclic(6, 2).cycles()) == 2


@given(st.integers(1, 12), st.integers(0, 2 ** 16), st.integers(-40, 40))
@settings(max_examples=100)
def test_orbit_points_iterate_the_map(m, seed, n):
    system = FiniteSystem.random(m, seed)
    x = seed % m
    y = x
    step = system.mapping if n >= 0 else system.inverse().mapping
    for _ in range(abs(n)):
        y = step[y]
    assert system.orbit_points(x, n) == y


def test_composition_preserves_the_mean(split_system, rng):
    f = Observable.random(7, rng)
    assert f.compose(split_system, 5).mean() == pytest.approx(f.mean(), abs=1e-12)
    assert coboundary(split_system, f).mean() == pytest.approx(0, abs=1e-12)


def test_invariant_split(split_system, rng):
    f = Observable.random(7, rng)
    expectation, rest = invariant_split(split_system, f)
    for cycle in split_system.cycles():
        assert np.allclose(expectation.values[cycle], f.values[cycle].mean())
        assert abs(rest.values[cycle].sum()) < 1e-12


def test_observable_norms():
    f = Observable([3.0, -4.0])
    assert f.norm(1) == pytest.approx(3.5)
    assert f.norm(2) == pytest.approx(np.sqrt(12.5))
    assert f.max_abs() == 4.0
    assert not f.is_nonnegative()
    with pytest.raises(DomainError):
        Observable([1.0, np.nan])


def test_orbit_values_window(cyclic7, observable7):
    phi = orbit_values(cyclic7, observable7, 2, 10)
    assert phi.offset == -10 and len(phi) == 21
    for n in (-10, -3, 0, 9):
        assert phi.at(n) == observable7.values[(2 + n) % 7]
    with pytest.raises(DomainError):
        orbit_values(cyclic7, observable7, 7, 1)


def test_rotation_samples():
    orbit = RotationOrbit(alpha=np.sqrt(2) - 1, start=0.25, length=5)
    s = rotation_samples(orbit, 0)
    assert np.allclose(s.values, 1.0)
    assert np.all(np.abs(np.abs(rotation_samples(orbit, 3).values) - 1) < 1e-12)
    with pytest.raises(DomainError):
        RotationOrbit(alpha=0.1, start=1.0)
