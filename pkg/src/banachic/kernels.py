"""Pairings with the banachic kernels ``R_p``, ``C_p`` and ``A_p = R_p + C_p``.

Kernels are nonlinear in their first argument and are only ever observed
through pairings ``<K e, f>`` with two Dirac-combination functionals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core_maps import compose_exponent, conjugate_exponent, signed_power
from .errors import ConfigurationError
from .functionals import DualFunctional, ProblemSpace, apply_functional
from .peano import PeanoKernel, _check_open
from .quadrature import QuadratureRule, integrate


@dataclass
class KernelContext:
    space: ProblemSpace
    quadrature: QuadratureRule = None
    peano: PeanoKernel = field(default=None, repr=False)

    def __post_init__(self):
        base = QuadratureRule.on_interval(self.space.a, self.space.lambda_sites)
        if self.quadrature is None:
            self.quadrature = base
        else:
            self.quadrature = self.quadrature.with_breakpoints(self.space.lambda_sites)
        if self.peano is None:
            self.peano = PeanoKernel(self.space)

    @property
    def p_star(self) -> float:
        return self.space.p_star

    def rule_for(self, *functionals) -> QuadratureRule:
        return self.quadrature.with_breakpoints(t for f in functionals for t in f.sites)

    def poly_pairings(self, e: DualFunctional) -> np.ndarray:
        """``<P_k, e>`` for ``k < m``."""
        return np.array([apply_functional(e, P) for P in self.space.dual_basis])


def kernel_Rp(ctx: KernelContext, e: DualFunctional, f: DualFunctional) -> float:
    """``sum_k alpha_{p*}(<P_k, e>) <P_k, f>``."""
    ce, cf = ctx.poly_pairings(e), ctx.poly_pairings(f)
    return float(np.dot(signed_power(ce, ctx.p_star), cf))


def kernel_Cp(ctx: KernelContext, e: DualFunctional, f: DualFunctional) -> float:
    """``integral <Lambda(., th), f> alpha_{p*}(<Lambda(., th), e>) dth``."""
    e.check_inside(ctx.space.a)
    f.check_inside(ctx.space.a)
    pe = ctx.peano

    def integrand(theta):
        return pe.pair(f, theta) * signed_power(pe.pair(e, theta), ctx.p_star)

    return integrate(ctx.rule_for(e, f), integrand)


def kernel_Ap(ctx: KernelContext, s: float, t: float) -> float:
    """``<A_p delta_s, delta_t>``."""
    _check_open(ctx.space, s, t)
    ds, dt = DualFunctional.dirac(s), DualFunctional.dirac(t)
    return kernel_Rp(ctx, ds, dt) + kernel_Cp(ctx, ds, dt)


def cp_diag(ctx: KernelContext, s: float) -> float:
    """``integral |d^m/dt^m C_2(t, s)|^{p*} dt``, the diagonal ``<C_p delta_s, delta_s>``."""
    _check_open(ctx.space, s)
    rule = ctx.rule_for(DualFunctional.dirac(s))
    return integrate(rule, lambda t: np.abs(ctx.peano(s, t)) ** ctx.p_star)


def cq_from_cp(ctx_p: KernelContext, ctx_q: KernelContext, s, t):
    """Both sides of the exponent-change identity for ``d^m/dt^m C(t, s)``.

    Returns ``(lhs, rhs)`` where ``lhs`` is the m-th t-derivative of
    ``C_q(t, s)``, i.e. ``alpha_{q*}(Lambda_m(s, t))``, and ``rhs`` is the
    p-context derivative ``alpha_{p*}(Lambda_m(s, t))`` pushed through
    ``alpha_{1 + (p-1)/(q-1)}``.
    """
    if not ctx_p.space.same_base(ctx_q.space):
        raise ConfigurationError("contexts differ in interval, order or functionals")
    _check_open(ctx_p.space, s, t)
    p, q = ctx_p.space.p, ctx_q.space.p
    lhs = signed_power(ctx_q.peano(s, t), ctx_q.p_star)
    rhs = signed_power(signed_power(ctx_p.peano(s, t), ctx_p.p_star), transfer_exponent(p, q))
    return lhs, rhs


def transfer_exponent(p: float, q: float) -> float:
    """Exponent ``1 + (p-1)/(q-1)`` taking ``C_p`` derivatives to ``C_q`` ones."""
    return 1.0 + (p - 1.0) / (q - 1.0)


def transfer_is_consistent(p: float, q: float) -> float:
    """Deviation of ``transfer(p, q)`` composed with ``alpha_{p*}`` from ``alpha_{q*}``."""
    return abs(compose_exponent(transfer_exponent(p, q), conjugate_exponent(p)) - conjugate_exponent(q))


def gram_matrix(ctx: KernelContext, functionals) -> np.ndarray:
    """``G[l, j] = <A_p e_l, e_j>`` (symmetric only for ``p = 2``)."""
    n = len(functionals)
    G = np.empty((n, n))
    for l, el in enumerate(functionals):
        for j, ej in enumerate(functionals):
            G[l, j] = kernel_Rp(ctx, el, ej) + kernel_Cp(ctx, el, ej)
    return G
