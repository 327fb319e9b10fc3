import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from banachic import (DomainError, DualFunctional, PeanoKernel, ProblemSpace, QuadratureRule, integrate,
                      peano_eval, representation_check, sard_representer, truncated_power)
from banachic.functionals import default_nodes


def test_truncated_power_examples():
    assert truncated_power(2, 3) == 8
    assert truncated_power(-1, 2) == 0
    assert truncated_power(0.5, 0) == 1
    assert truncated_power(0.0, 0) == 0  # right-open indicator
    with pytest.raises(DomainError):
        truncated_power(1.0, -1)


def test_m1_examples():
    k = PeanoKernel(ProblemSpace.from_nodes(1.0, 1, 2.0, (0.0,)))
    assert peano_eval(k, 0.5, 0.25) == 1.0
    assert peano_eval(k, 0.5, -0.25) == 0.0


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_zero_at_nodes(m):
    space = ProblemSpace.from_nodes(1.0, m, 2.0, default_nodes(1.0, m))
    k = PeanoKernel(space)
    t = np.linspace(-0.99, 0.99, 101)
    for s in space.nodes:
        assert np.max(np.abs(k(s, t))) <= 1e-13


def test_outside_domain():
    k = PeanoKernel(ProblemSpace.from_nodes(1.0, 2, 2.0, (0.0, 0.5)))
    with pytest.raises(DomainError):
        peano_eval(k, 1.0, 0.0)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_closed_vs_subtraction(m):
    k = PeanoKernel(ProblemSpace.from_nodes(1.0, m, 2.0, default_nodes(1.0, m)))
    g = np.linspace(-0.97, 0.97, 30)
    S, T = np.meshgrid(g, g)
    assert np.max(np.abs(k.closed_form(S, T) - k.subtraction_form(S, T))) <= 1e-10


def test_representation_examples():
    for m in (1, 2, 3):
        space = ProblemSpace.from_nodes(1.0, m, 2.0, default_nodes(1.0, m))
        poly = np.polynomial.Polynomial(np.arange(1, m + 1, dtype=float))
        assert representation_check(space, poly, lambda t: np.zeros_like(t), 0.37) <= 1e-13
        x = lambda t: np.asarray(t) ** m / math.factorial(m)
        for s in (-0.8, 0.1, 0.6):
            assert representation_check(space, x, lambda t: np.ones_like(t), s) <= 1e-8
    space = ProblemSpace.from_nodes(1.0, 2, 2.0, (-0.5, 0.5))
    assert representation_check(space, np.sin, lambda t: -np.sin(t), 0.3) <= 1e-8


def test_representation_general_functionals():
    lams = [DualFunctional.from_terms([(0.5, -0.3), (0.5, 0.3)]), DualFunctional.from_terms([(1, 0.4), (-1, -0.4)])]
    space = ProblemSpace.build(1.0, 2, 2.0, lams)
    for s in np.linspace(-0.9, 0.9, 11):
        assert representation_check(space, np.exp, np.exp, float(s)) <= 1e-8


functional_st = st.lists(st.tuples(st.floats(min_value=-2, max_value=2), st.floats(min_value=-0.95, max_value=0.95)),
                         min_size=1, max_size=4)


@settings(max_examples=20, deadline=None)
@given(functional_st, st.sampled_from([1, 2, 3]))
def test_sard_contract(terms, m):
    space = ProblemSpace.from_nodes(1.0, m, 2.0, default_nodes(1.0, m))
    e = DualFunctional.from_terms(terms)
    G = sard_representer(space, e)
    x = lambda t: np.asarray(t, dtype=float) ** (m + 1)
    x_m = lambda t: math.factorial(m + 1) * np.asarray(t, dtype=float)
    rule = QuadratureRule.on_interval(1.0, G.breakpoints)
    lhs = integrate(rule, lambda t: G(t) * x_m(t))
    rhs = e(lambda t: x(t) - space.polynomial_part(x)(t))
    assert abs(lhs - rhs) <= 1e-8


def test_sard_examples():
    space = ProblemSpace.from_nodes(1.0, 1, 2.0, (0.0,))
    G = sard_representer(space, DualFunctional.dirac(0.5))
    t = np.array([-0.5, 0.1, 0.49, 0.51])
    np.testing.assert_array_equal(G(t), [0, 1, 1, 0])
    space2 = ProblemSpace.from_nodes(1.0, 2, 2.0, (-0.5, 0.5))
    assert np.all(sard_representer(space2, DualFunctional.dirac(0.5))(np.linspace(-0.9, 0.9, 7)) == 0)
    k = PeanoKernel(space2)
    G = sard_representer(space2, DualFunctional.from_terms([(1, 0.2), (-1, -0.7)]))
    t = np.linspace(-0.9, 0.9, 9)
    np.testing.assert_allclose(G(t), k(0.2, t) - k(-0.7, t), atol=1e-15)


def test_sard_continuity_m3():
    # C^{m-2} at breakpoints: continuous for m=2, C^1 for m=3
    for m in (2, 3):
        space = ProblemSpace.from_nodes(1.0, m, 2.0, default_nodes(1.0, m))
        G = sard_representer(space, DualFunctional.from_terms([(1.0, 0.3), (2.0, -0.2)]))
        for b in G.breakpoints:
            eps = 1e-7
            assert abs(G(b + eps) - G(b - eps)) <= 1e-5
            if m == 3:
                d_right = (G(b + 2 * eps) - G(b + eps)) / eps
                d_left = (G(b - eps) - G(b - 2 * eps)) / eps
                assert abs(d_right - d_left) <= 1e-4
