"""Peano kernel of the representation ``x = sum_k lambda_k(x) P_k + remainder``.

For ``x`` with ``m`` derivatives on ``(-a, a)``::

    x(s) = sum_k lambda_k(x) P_k(s) + integral Lambda_m(s, t) x^(m)(t) dt

with ``Lambda_m(s, t) = g_t(s) - sum_k lambda_k(g_t) P_k(s)`` and
``g_t(s) = (s - t)_+^(m-1) / (m-1)!``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import DomainError
from .functionals import DualFunctional, ProblemSpace, lagrange_basis
from .quadrature import QuadratureRule, integrate


def truncated_power(u, k: int):
    """``u**k`` for ``u > 0`` and 0 otherwise.

    For ``k == 0`` this is the indicator of ``u > 0``; the value at ``u == 0``
    is 0, so ``(s - t)_+^0`` as a function of ``t`` is right-open at ``s``.
    """
    if int(k) != k or k < 0:
        raise DomainError(f"truncated power order must be a nonnegative integer, got {k!r}")
    u = np.asarray(u, dtype=float)
    if k == 0:
        out = (u > 0).astype(float)
    else:
        out = np.where(u > 0, np.maximum(u, 0.0) ** int(k), 0.0)
    return float(out) if out.ndim == 0 else out


class PeanoKernel:
    """Evaluator for ``Lambda_m(s, t)`` over a :class:`ProblemSpace`.

    When all functionals are point evaluations the closed form with
    Lagrange polynomials of the nodes is used; otherwise the dual-basis
    projection is subtracted from the truncated power.
    """

    def __init__(self, space: ProblemSpace):
        self.space = space
        self.m = space.m
        self.nodes = space.nodes
        self._fact = float(math.factorial(self.m - 1))
        self._lagrange = lagrange_basis(self.nodes) if self.nodes is not None else None
        # flattened (functional index, weight, site) table for the general form
        self._lam_idx = np.array([k for k, lam in enumerate(space.lambdas) for _ in lam.sites], dtype=int)
        self._lam_w = np.array([w for lam in space.lambdas for w in lam.weights])
        self._lam_s = np.array([t for lam in space.lambdas for t in lam.sites])

    @property
    def breakpoints(self) -> tuple:
        return self.space.lambda_sites

    def _g(self, s, t):
        return truncated_power(np.subtract(s, t), self.m - 1) / self._fact

    def closed_form(self, s, t):
        if self._lagrange is None:
            raise DomainError("closed form needs point-evaluation functionals")
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        out = self._g(s, t)
        for node, L in zip(self.nodes, self._lagrange):
            out = out - self._g(node, t) * L(s)
        return out

    def subtraction_form(self, s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        out = self._g(s, t)
        P = self.space.dual_basis_values(s)
        for k in range(self.m):
            sel = self._lam_idx == k
            lam_g = sum(w * self._g(site, t) for w, site in zip(self._lam_w[sel], self._lam_s[sel]))
            out = out - lam_g * P[k]
        return out

    def __call__(self, s, t):
        out = self.closed_form(s, t) if self._lagrange is not None else self.subtraction_form(s, t)
        # left of s and of every functional site g_t is one polynomial, which
        # the projection reproduces: the kernel vanishes there identically
        out = np.where(np.asarray(t) < np.minimum(s, self._lam_s.min()), 0.0, out)
        return float(out) if np.ndim(out) == 0 else out

    def pair(self, e: DualFunctional, theta):
        """``<Lambda_m(., theta), e>`` for an array of ``theta``."""
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape)
        for w, site in zip(e.weights, e.sites):
            out = out + w * self(site, theta)
        return out

    def pair_many(self, functionals, theta) -> np.ndarray:
        """Matrix of shape ``(len(functionals), len(theta))``."""
        theta = np.asarray(theta, dtype=float)
        return np.stack([self.pair(e, theta) for e in functionals]) if functionals else np.empty((0, theta.size))


def _check_open(space, *vals):
    a = space.a
    for v in vals:
        v = np.asarray(v)
        if np.any(v <= -a) or np.any(v >= a):
            raise DomainError(f"arguments must lie in (-{a}, {a})")


def peano_eval(kernel: PeanoKernel, s, t):
    """Value of ``Lambda_m(s, t)`` (broadcasting over ``s`` and ``t``)."""
    _check_open(kernel.space, s, t)
    return kernel(s, t)


def remainder_integral(kernel: PeanoKernel, x_m: Callable, s: float, rule: QuadratureRule | None = None) -> float:
    """``integral Lambda_m(s, t) x^(m)(t) dt`` over ``(-a, a)``."""
    space = kernel.space
    if rule is None:
        rule = QuadratureRule.on_interval(space.a)
    rule = rule.with_breakpoints(list(kernel.breakpoints) + [s])
    return integrate(rule, lambda t: kernel(s, t) * x_m(t))


def representation_check(space: ProblemSpace, x: Callable, x_m: Callable, s: float,
                         rule: QuadratureRule | None = None, kernel: PeanoKernel | None = None) -> float:
    """Absolute residual of the representation formula at ``s``.

    ``x`` and its ``m``-th derivative ``x_m`` must both accept arrays.
    """
    _check_open(space, s)
    kernel = kernel or PeanoKernel(space)
    poly = space.polynomial_part(x)(s)
    rem = remainder_integral(kernel, x_m, s, rule)
    return abs(float(x(np.asarray(s))) - float(poly) - rem)


def sard_representer(space: ProblemSpace, e: DualFunctional, kernel: PeanoKernel | None = None) -> Callable:
    """Function ``G`` with ``integral G x^(m) = <x - sum_k lambda_k(x) P_k, e>``.

    ``G(t) = sum_j w_j Lambda_m(s_j, t)``.
    """
    e.check_inside(space.a)
    kernel = kernel or PeanoKernel(space)

    def G(t):
        out = kernel.pair(e, t)
        return float(out) if np.ndim(out) == 0 else out

    G.breakpoints = tuple(sorted(set(e.sites) | set(space.lambda_sites)))
    return G
