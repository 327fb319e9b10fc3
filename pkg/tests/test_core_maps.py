import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from banachic import ConjugatePair, DomainError, compose_exponent, conjugate_exponent, signed_power
from banachic.core_maps import signed_power_inverse_check

exponents = st.floats(min_value=1.05, max_value=8.0)
reals = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


@pytest.mark.parametrize("p, expected", [(2, 2), (3, 1.5), (1.25, 5)])
def test_conjugate_examples(p, expected):
    assert conjugate_exponent(p) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("p", [1.0, 0.5, -2.0, math.inf, math.nan])
def test_conjugate_domain(p):
    with pytest.raises(DomainError):
        conjugate_exponent(p)


@pytest.mark.parametrize("rho, q, expected", [(0, 1.5, 0), (-3, 2, -3), (2, 3, 4)])
def test_signed_power_examples(rho, q, expected):
    assert signed_power(rho, q) == expected


def test_signed_power_domain():
    with pytest.raises(DomainError):
        signed_power(1.0, 1.0)


@pytest.mark.parametrize("rho, p", [(5, 3), (-0.25, 1.5), (0, 4)])
def test_inverse_check_examples(rho, p):
    assert signed_power_inverse_check(rho, ConjugatePair(p)) == pytest.approx(rho, rel=8 * np.finfo(float).eps, abs=0)


def test_pair_rejects_inconsistent_conjugate():
    with pytest.raises(DomainError):
        ConjugatePair(3.0, 2.0)
    assert ConjugatePair(3.0, 1.5).p_star == 1.5


@given(reals, exponents)
def test_odd_exactly(rho, q):
    assert signed_power(-rho, q) == -signed_power(rho, q)


@given(reals, reals, exponents)
def test_monotone(r1, r2, q):
    lo, hi = min(r1, r2), max(r1, r2)
    assert signed_power(lo, q) <= signed_power(hi, q)


@given(st.floats(min_value=-10, max_value=10), exponents)
def test_roundtrip_property(rho, p):
    ps = conjugate_exponent(p)
    assert abs(signed_power(signed_power(rho, p), ps) - rho) <= 1e-12 * max(1.0, abs(rho))


@given(st.floats(min_value=1.1, max_value=6), st.floats(min_value=1.1, max_value=6),
       st.floats(min_value=-5, max_value=5).filter(lambda r: r == 0 or abs(r) > 1e-20))
def test_composition_rule(a, b, rho):
    lhs = signed_power(signed_power(rho, b), a)
    rhs = signed_power(rho, compose_exponent(a, b))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


def test_vectorized_roundtrip():
    rng = np.random.default_rng(0)
    rho = rng.uniform(-10, 10, 10_000)
    for p in (1.2, 1.5, 2.0, 3.0, 4.0):
        back = signed_power(signed_power(rho, p), conjugate_exponent(p))
        assert np.max(np.abs(back - rho) / np.maximum(1, np.abs(rho))) <= 1e-12


def test_identity_copy_for_q2():
    x = np.array([1.0, -2.0])
    y = signed_power(x, 2.0)
    y[0] = 99.0
    assert x[0] == 1.0
