import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from openergodic.processing.signal_core import (Signal, TorusGrid, convolve, dft, dft_at, modulate, norm,
                                                parseval_residual, random_signal, shift)
from openergodic.utils.errors import PreconditionError


def test_window_zero_fills_outside_support():
    s = Signal(3, [1, 2, 3])
    assert np.array_equal(s.window(1, 6), [0, 0, 1, 2, 3, 0])
    assert s.at(2) == 0 and s.at(4) == 2
    assert np.array_equal(s.take([[3, 10], [-1, 5]]), [[1, 0], [0, 3]])


def test_empty_signal_helpers():
    s = Signal.zeros(0, offset=5)
    assert len(s) == 0 and s.last == 4 and s.is_zero
    assert norm(s, 2) == 0.0
    assert s.equals(Signal.zeros(3))


@given(st.integers(-50, 50), st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]), st.integers(0, 2 ** 16))
@settings(max_examples=100)
def test_shift_is_an_isometry(k, r, seed):
    s = random_signal(np.random.default_rng(seed), 17, offset=-4)
    assert norm(shift(s, k), r) == norm(s, r)
    assert shift(s, k).at(k) == s.at(0)


@given(st.integers(1, 40), st.integers(-20, 20), st.integers(0, 2 ** 16))
@settings(max_examples=100)
def test_parseval_on_minimal_grid(length, offset, seed):
    s = random_signal(np.random.default_rng(seed), length, offset=offset)
    energy = norm(s, 2) ** 2
    assert parseval_residual(s, TorusGrid(2 * length)) <= 1e-10 * max(1.0, energy)


def test_dft_matches_direct_sum(rng):
    s = random_signal(rng, 23, offset=-11)
    grid = dft(s, TorusGrid(64))
    assert np.allclose(grid.samples, dft_at(s, grid.nodes), atol=1e-10)


def test_dft_folds_long_signals_when_not_strict(rng):
    s = random_signal(rng, 50, offset=3)
    grid = dft(s, TorusGrid(16), strict=False)
    assert np.allclose(grid.samples, dft_at(s, grid.nodes), atol=1e-9)
    with pytest.raises(PreconditionError):
        dft(s, TorusGrid(16))


def test_grid_nodes_are_symmetric():
    nodes = TorusGrid(1024).nodes
    assert nodes[0] == -math.pi
    assert np.array_equal(nodes[1:], -nodes[1:][::-1])


def test_quadrature_integrates_trig_polynomials():
    grid = TorusGrid(32)
    values = np.cos(3 * grid.nodes) ** 2
    assert grid.quadrature(values) == pytest.approx(math.pi, abs=1e-12)


def test_modulate_shifts_the_transform(rng):
    s = random_signal(rng, 9, offset=-2)
    theta, phi = 0.7, -1.3
    assert np.allclose(dft_at(modulate(s, theta), phi), dft_at(s, phi - theta), atol=1e-12)


def test_convolve_matches_numpy(rng):
    a = random_signal(rng, 13, offset=-5)
    b = random_signal(rng, 7, offset=2)
    c = convolve(a, b)
    assert c.offset == -3
    assert np.allclose(c.values, np.convolve(a.values, b.values), atol=1e-10)
    assert convolve(a, Signal.delta(4)).equals(shift(a, 4), atol=1e-12)
