import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from banachic import DomainError, IntegrandError, QuadratureRule, integrate
from banachic.quadrature import merge_breakpoints


def test_examples():
    rule = QuadratureRule.on_interval(1.0)
    assert integrate(rule, lambda t: np.ones_like(t)) == pytest.approx(2.0, abs=1e-15)
    assert integrate(rule.with_breakpoints([0.5]), lambda t: np.maximum(0.5 - t, 0)) == pytest.approx(1.125, abs=1e-14)
    assert integrate(rule.with_breakpoints([0.0]), lambda t: np.abs(t) ** 1.5) == pytest.approx(0.8, abs=1e-10)


@settings(max_examples=40)
@given(st.lists(st.floats(min_value=-3, max_value=3), min_size=1, max_size=32))
def test_polynomial_exactness(coeffs):
    # degree <= 31 = 2 * order - 1
    p = np.polynomial.Polynomial(coeffs)
    exact = p.integ()(1.0) - p.integ()(-1.0)
    got = integrate(QuadratureRule.on_interval(1.0, max_depth=0), p)
    assert abs(got - exact) <= 1e-13 * max(1.0, np.sum(np.abs(coeffs)))


@settings(max_examples=30)
@given(st.lists(st.floats(min_value=-0.99, max_value=0.99), max_size=5))
def test_extra_breakpoints_do_not_matter(extra):
    rule = QuadratureRule.on_interval(1.0, [0.2])
    f = lambda t: np.abs(t - 0.2) ** 1.5 + np.cos(3 * t)
    base = integrate(rule, f)
    assert abs(integrate(rule.with_breakpoints(extra), f) - base) <= 2 * rule.tol * (1 + abs(base))


def test_vector_valued():
    rule = QuadratureRule.on_interval(1.0)
    out = integrate(rule, lambda t: np.stack([t ** 2, np.ones_like(t)]))
    np.testing.assert_allclose(out, [2 / 3, 2.0], atol=1e-15)


def test_nonfinite_integrand_reports_location():
    with pytest.raises(IntegrandError) as info:
        integrate(QuadratureRule.on_interval(1.0), lambda t: np.where(t > 0.5, np.nan, t))
    assert info.value.location is not None


def test_max_depth_flagged():
    rule = QuadratureRule.on_interval(1.0, max_depth=1)
    _, info = integrate(rule, lambda t: np.abs(t - 0.1234) ** 0.3, full_output=True)
    assert not info.converged and len(info.unconverged_panels) > 0


def test_deterministic():
    rule = QuadratureRule.on_interval(1.0, [0.3])
    f = lambda t: np.abs(np.sin(7 * t)) ** 1.2
    assert integrate(rule, f) == integrate(rule, f)


def test_rule_validation():
    with pytest.raises(DomainError):
        QuadratureRule((0.0, 0.0))
    with pytest.raises(DomainError):
        QuadratureRule((-1.0, 1.0), order=1)


def test_merge_breakpoints():
    assert merge_breakpoints(-1, 1, [0.5, 2.0, -1.0, 0.5]) == (-1.0, 0.5, 1.0)
