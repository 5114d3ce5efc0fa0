import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from openergodic.processing.arith import (IntPolynomial, from_monomial, lacunary, parse_polynomial, poly_eval,
                                          poly_values, sieve)
from openergodic.utils.errors import DomainError, RangeError


def test_binomial_basis_values():
    # n(n-1)/2 + 3n + 1
    P = IntPolynomial((1, 3, 1))
    assert [P(n) for n in (-2, 0, 1, 4)] == [-2, 1, 4, 19]
    assert str(P) == "binom:[1,3,1]"
    assert IntPolynomial.linear(2, 5).linear_shift() is None
    assert IntPolynomial.linear(1, 5).linear_shift() == 5


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=5), st.integers(-1000, 1000))
@settings(max_examples=200)
def test_from_monomial_agrees_with_power_sum(a, n):
    expected = sum(c * n ** k for k, c in enumerate(a))
    assert poly_eval(from_monomial(a), n) == expected


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=4))
@settings(max_examples=100)
def test_poly_values_agrees_with_scalar_eval(coeffs):
    P = IntPolynomial(tuple(coeffs))
    ns = np.arange(-300, 301)
    assert poly_values(P, ns).tolist() == [poly_eval(P, n) for n in ns.tolist()]


def test_overflow_is_reported():
    P = IntPolynomial((0, 2 ** 62))
    with pytest.raises(RangeError):
        poly_eval(P, 4)
    with pytest.raises(RangeError):
        poly_values(P, [1, 2, 4])


@pytest.mark.parametrize("text", ["mono:[0,1", "poly:[1]", "binom:[]", "mono:[1.5]", "binom"])
def test_parse_polynomial_rejects(text):
    with pytest.raises(DomainError):
        parse_polynomial(text)


def test_parse_polynomial_forms():
    assert parse_polynomial("binom:[0,1]")(7) == 7
    assert parse_polynomial("mono:[0,0,1]")(-6) == 36


def test_sieve_counts():
    table = sieve(1000)
    assert table.count(100) == 25
    assert table.count(1000) == 168
    assert table.count(1) == 0
    assert table.upto(12).tolist() == [2, 3, 5, 7, 11]
    with pytest.raises(DomainError):
        table.count(1001)
    with pytest.raises(DomainError):
        sieve(1)


def test_lacunary_members():
    assert list(lacunary(2.0, 100)) == [2, 4, 8, 16, 32, 64]
    assert list(lacunary(1.5, 20)) == [1, 2, 3, 5, 7, 11, 17]
    S = lacunary(2.0, 100)
    assert 16 in S and 17 not in S
    assert S.between(5, 40).tolist() == [8, 16, 32]
    assert np.flatnonzero(S.mask(10)).tolist() == [1, 3, 7]
    with pytest.raises(DomainError):
        lacunary(1.0, 10)


@given(st.floats(1.01, 4.0))
@settings(max_examples=100)
def test_lacunary_consecutive_ratio(rho):
    members = lacunary(rho, 10 ** 6).members.astype(float)
    assert np.all(np.diff(members) > 0)
    assert np.all(members[1:] / members[:-1] <= 2.0 * rho)
