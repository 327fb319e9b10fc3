"""L^p interpolating splines by convex dual minimization.

Given constraints ``<x, e_l> = alpha_l`` the spline minimizes
``sum_k |lambda_k(x)|^p + integral |x^(m)|^p``.  Writing
``c(mu) = B mu`` with ``B[k, l] = <P_k, e_l>`` and
``v(theta) = sum_l mu_l <Lambda_m(., theta), e_l>``, the dual objective

    D(mu) = (1/p*) (sum_k |c_k|^p* + integral |v|^p*) - mu . alpha

is convex and its gradient is ``<sigma(mu), e_l> - alpha_l`` where

    sigma(mu)(t) = sum_k P_k(t) alpha_{p*}(c_k)
                   + integral Lambda_m(t, theta) alpha_{p*}(v(theta)) dtheta.

``solve`` minimizes ``D`` with a damped Newton method.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core_maps import signed_power
from .errors import ConvergenceError, DegeneracyError, DomainError
from .functionals import DualFunctional, ProblemSpace
from .peano import PeanoKernel
from .quadrature import QuadratureRule, integrate, merge_breakpoints

log = logging.getLogger(__name__)

GRAM_COND_LIMIT = 1e12


@dataclass(frozen=True)
class ConstraintSet:
    functionals: tuple
    targets: tuple

    def __post_init__(self):
        f = tuple(self.functionals)
        y = tuple(float(v) for v in self.targets)
        if len(f) == 0 or len(f) != len(y):
            raise DomainError(f"{len(f)} functionals but {len(y)} targets")
        if not np.all(np.isfinite(y)):
            raise DomainError("targets must be finite")
        object.__setattr__(self, "functionals", f)
        object.__setattr__(self, "targets", y)

    @classmethod
    def from_points(cls, sites: Sequence[float], targets: Sequence[float]) -> "ConstraintSet":
        return cls(tuple(DualFunctional.dirac(t) for t in sites), tuple(targets))

    @property
    def sites(self) -> tuple:
        """All sites in order of appearance (with repeats)."""
        return tuple(t for f in self.functionals for t in f.sites)

    @property
    def point_sites(self):
        sites = [f.point_site for f in self.functionals]
        return None if any(s is None for s in sites) else tuple(sites)

    def __len__(self):
        return len(self.targets)

    def negated(self) -> "ConstraintSet":
        return ConstraintSet(self.functionals, tuple(-y for y in self.targets))


@dataclass
class SolverOptions:
    tol: float = 1e-9
    max_iter: int = 200
    init: str = "gram"
    quad_tol: float = 1e-13
    quad_order: int = 16
    quad_max_depth: int = 40
    hessian_max_depth: int = 2
    armijo: float = 1e-4
    max_newton_failures: int = 3
    max_stalled: int = 15


class DualProblem:
    """Discretization-free evaluator of the dual objective and its derivatives."""

    def __init__(self, space: ProblemSpace, cons: ConstraintSet, options: SolverOptions | None = None):
        for f in cons.functionals:
            f.check_inside(space.a)
        self.space = space
        self.cons = cons
        self.opts = options or SolverOptions()
        self.peano = PeanoKernel(space)
        self.p_star = space.p_star
        self.alpha = np.asarray(cons.targets)
        n = len(cons)
        # every constraint site flattened, with a weight matrix back to functionals
        self.sites = np.array(cons.sites)
        self.W = np.zeros((n, self.sites.size))
        col = 0
        for l, f in enumerate(cons.functionals):
            for w in f.weights:
                self.W[l, col] = w
                col += 1
        self.B = self.W @ space.dual_basis_values(self.sites).T  # (n, m): <P_k, e_l>
        self.B = self.B.T  # (m, n)
        self.base_breakpoints = merge_breakpoints(-space.a, space.a, list(space.lambda_sites) + list(self.sites))

    @property
    def n(self) -> int:
        return len(self.alpha)

    def rule(self, extra=(), max_depth=None) -> QuadratureRule:
        o = self.opts
        return QuadratureRule(
            merge_breakpoints(-self.space.a, self.space.a, list(self.base_breakpoints) + list(extra)),
            order=o.quad_order, tol=o.quad_tol,
            max_depth=o.quad_max_depth if max_depth is None else max_depth,
        )

    def phi(self, theta) -> np.ndarray:
        """``<Lambda_m(., theta), e_l>`` as an ``(n, len(theta))`` array."""
        theta = np.asarray(theta, dtype=float)
        return self.W @ self.peano(self.sites[:, None], theta[None, :])

    def v(self, mu, theta):
        return np.asarray(mu) @ self.phi(theta)

    def sign_changes(self, mu) -> list:
        """Zeros of ``v_mu`` inside the panels of the base breakpoints.

        ``v_mu`` is a polynomial of degree < m on each such panel, so it is
        recovered exactly from ``m`` samples.
        """
        m = self.space.m
        if m == 1:
            return []
        bp = np.asarray(self.base_breakpoints)
        lo, hi = bp[:-1], bp[1:]
        u = 0.5 - 0.5 * np.cos(np.pi * (np.arange(m) + 0.5) / m)  # Chebyshev points in (0, 1)
        theta = (lo[:, None] + (hi - lo)[:, None] * u[None, :]).ravel()
        vals = self.v(mu, theta).reshape(lo.size, m)
        scale = np.max(np.abs(vals)) if vals.size else 0.0
        if scale == 0.0:
            return []
        V = np.vander(u, m, increasing=True)
        zeros = []
        for i in range(lo.size):
            if np.max(np.abs(vals[i])) <= 1e-12 * scale:
                continue
            coef = np.linalg.solve(V, vals[i])
            nz = np.flatnonzero(np.abs(coef) > 1e-14 * np.max(np.abs(coef)))
            coef = coef[: nz[-1] + 1]
            if coef.size < 2:
                continue
            for r in np.polynomial.polynomial.polyroots(coef):
                if abs(r.imag) <= 1e-12 and 0.0 < r.real < 1.0:
                    zeros.append(float(lo[i] + (hi[i] - lo[i]) * r.real))
        return sorted(zeros)

    def value_and_grad(self, mu):
        mu = np.asarray(mu, dtype=float)
        ps = self.p_star
        c = self.B @ mu
        rule = self.rule(self.sign_changes(mu))

        def integrand(theta):
            ph = self.phi(theta)
            v = mu @ ph
            return np.vstack([np.abs(v) ** ps, signed_power(v, ps) * ph])

        res = integrate(rule, integrand)
        value = (np.sum(np.abs(c) ** ps) + res[0]) / ps - mu @ self.alpha
        grad = self.B.T @ signed_power(c, ps) + res[1:] - self.alpha
        return float(value), np.asarray(grad)

    def value(self, mu) -> float:
        return self.value_and_grad(mu)[0]

    def hessian(self, mu) -> np.ndarray:
        mu = np.asarray(mu, dtype=float)
        ps = self.p_star
        n = self.n
        c = self.B @ mu
        cmax = np.max(np.abs(c)) if c.size else 0.0
        wc = _weight(c, ps, cmax)
        zeros = self.sign_changes(mu)
        rule = self.rule(zeros, max_depth=self.opts.hessian_max_depth)
        vmax = np.max(np.abs(self.v(mu, np.asarray(rule.breakpoints)))) if n else 0.0
        vmax = max(vmax, cmax)

        def integrand(theta):
            ph = self.phi(theta)
            w = _weight(mu @ ph, ps, vmax)
            return (ph[:, None, :] * ph[None, :, :] * w).reshape(n * n, -1)

        H_int = integrate(rule, integrand).reshape(n, n)
        H = (ps - 1.0) * ((self.B.T * wc) @ self.B + H_int)
        return 0.5 * (H + H.T)

    def gram(self) -> np.ndarray:
        """The ``p = 2`` Gram matrix ``<A_2 e_l, e_j>``."""
        n = self.n

        def integrand(theta):
            ph = self.phi(theta)
            return (ph[:, None, :] * ph[None, :, :]).reshape(n * n, -1)

        G = self.B.T @ self.B + integrate(self.rule(), integrand).reshape(n, n)
        return 0.5 * (G + G.T)

    def sigma_parts(self, mu):
        """``(poly_coeffs, w)`` with ``sigma = sum_k poly_coeffs[k] P_k + int Lambda(., th) w(th)``."""
        mu = np.asarray(mu, dtype=float)
        ps = self.p_star
        coeffs = signed_power(self.B @ mu, ps)

        def w(theta):
            return signed_power(self.v(mu, theta), ps)

        return np.atleast_1d(coeffs), w


def _weight(v, ps, scale):
    """``|v|**(p*-2)`` with ``|v|`` floored relative to ``scale``."""
    a = np.abs(v)
    if ps < 2.0:
        floor = max(1e-10 * scale, np.finfo(float).tiny ** 0.25)
        a = np.maximum(a, floor)
    return a ** (ps - 2.0)


@dataclass
class SplineSolution:
    mu: np.ndarray
    space: ProblemSpace
    constraints: ConstraintSet
    iterations: int = 0
    residual: float = float("nan")
    objective: float = float("nan")
    converged: bool = True
    options: SolverOptions = field(default_factory=SolverOptions, repr=False)
    _problem: DualProblem = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        if self._problem is None:
            self._problem = DualProblem(self.space, self.constraints, self.options)

    @classmethod
    def from_coefficients(cls, space: ProblemSpace, functionals, mu, options=None) -> "SplineSolution":
        """Spline for given dual coefficients; targets are the realized pairings."""
        options = options or SolverOptions()
        provisional = ConstraintSet(tuple(functionals), tuple(0.0 for _ in functionals))
        problem = DualProblem(space, provisional, options)
        value, grad = problem.value_and_grad(mu)
        cons = ConstraintSet(tuple(functionals), tuple(grad))
        return cls(np.asarray(mu, dtype=float), space, cons, 0, 0.0,
                   float(value + np.dot(mu, grad)), True, options)

    @property
    def p(self) -> float:
        return self.space.p

    def __call__(self, t):
        return spline_eval(self, t)


def dual_objective(space: ProblemSpace, cons: ConstraintSet, mu) -> float:
    _check_len(cons, mu)
    return DualProblem(space, cons).value(mu)


def dual_gradient(space: ProblemSpace, cons: ConstraintSet, mu) -> np.ndarray:
    _check_len(cons, mu)
    return DualProblem(space, cons).value_and_grad(mu)[1]


def _check_len(cons, mu):
    if len(np.atleast_1d(mu)) != len(cons):
        raise DomainError(f"mu has length {len(np.atleast_1d(mu))}, expected {len(cons)}")


def gram_solution(problem: DualProblem):
    G = problem.gram()
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > GRAM_COND_LIMIT:
        raise DegeneracyError(f"constraints are dependent (Gram condition number {cond:.3g})")
    return np.linalg.solve(G, problem.alpha)


def _newton_direction(H, g, ps):
    n = len(g)
    eps = 1e-10 * max(np.trace(H), 1e-300) / n
    shift = eps if ps < 2.0 else 0.0
    for _ in range(12):
        try:
            L = np.linalg.cholesky(H + shift * np.eye(n))
        except np.linalg.LinAlgError:
            shift = max(shift * 100.0, eps)
            continue
        y = np.linalg.solve(L, -g)
        return np.linalg.solve(L.T, y)
    return -g


def solve(space: ProblemSpace, cons: ConstraintSet, options: SolverOptions | None = None, **kwargs) -> SplineSolution:
    """Dual coefficients of the L^p interpolating spline.

    Damped Newton with Armijo backtracking; switches to Barzilai-Borwein
    gradient steps after repeated Newton failures.  Raises
    :class:`ConvergenceError` (carrying the best ``mu``) if the gradient
    sup-norm does not reach ``tol`` within ``max_iter`` iterations.
    """
    opts = options or SolverOptions()
    for k, v in kwargs.items():
        setattr(opts, k, v)
    problem = DualProblem(space, cons, opts)
    ps = problem.p_star
    mu0 = gram_solution(problem)
    if opts.init == "zero":
        mu = np.zeros(problem.n)
    elif opts.init == "gram":
        mu = mu0
    else:
        raise DomainError(f"unknown init {opts.init!r}")

    D, g = problem.value_and_grad(mu)
    best = (np.max(np.abs(g)), mu.copy(), D)
    failures = 0
    stalled = 0
    use_bb = False
    prev = None
    it = 0
    while np.max(np.abs(g)) > opts.tol:
        if it >= opts.max_iter or stalled >= opts.max_stalled:
            reason = "stagnated" if stalled >= opts.max_stalled else "stopped"
            raise ConvergenceError(
                f"dual solve {reason} after {it} iterations with residual {best[0]:.3e}",
                best=best[1], residual=float(best[0]), iterations=it,
            )
        it += 1
        if use_bb:
            if prev is None:
                step = 1.0 / max(np.trace(problem.hessian(mu)), 1e-300)
            else:
                s, y = mu - prev[0], g - prev[1]
                sy = s @ y
                step = (s @ s) / sy if sy > 0 else 1.0 / max(np.trace(problem.hessian(mu)), 1e-300)
            d = -step * g
        else:
            d = _newton_direction(problem.hessian(mu), g, ps)
        slope = g @ d
        if slope >= 0:
            d, slope = -g, -(g @ g)
        gnorm = np.max(np.abs(g))
        t = 1.0
        accepted = False
        for _ in range(40):
            trial = mu + t * d
            Dt, gt = problem.value_and_grad(trial)
            armijo = Dt <= D + opts.armijo * t * slope
            flat = Dt <= D + 1e-14 * (1.0 + abs(D)) and np.max(np.abs(gt)) < gnorm
            if armijo or flat:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            failures += 1
            stalled += 1
            log.debug("line search failed at iteration %d (failures=%d)", it, failures)
            if failures >= opts.max_newton_failures:
                use_bb = True
            continue
        progress = Dt < D - 1e-13 * (1.0 + abs(D)) or np.max(np.abs(gt)) < 0.9 * best[0]
        prev = (mu, g)
        mu, D, g = trial, Dt, gt
        if progress:
            stalled = 0
        else:
            stalled += 1
        if np.max(np.abs(g)) < best[0]:
            best = (np.max(np.abs(g)), mu.copy(), D)
        log.debug("iter %d: D=%.16e |g|=%.3e t=%g", it, D, np.max(np.abs(g)), t)

    return SplineSolution(mu, space, cons, it, float(np.max(np.abs(g))), float(D), True, opts, problem)


def spline_eval(sol: SplineSolution, t):
    """Value of the spline at ``t`` (scalar or array)."""
    problem = sol._problem
    a = sol.space.a
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts <= -a) or np.any(ts >= a):
        raise DomainError(f"evaluation points must lie in (-{a}, {a})")
    coeffs, w = problem.sigma_parts(sol.mu)
    zeros = problem.sign_changes(sol.mu)
    P = sol.space.dual_basis_values(ts)
    out = coeffs @ P
    kern = problem.peano
    for i, ti in enumerate(ts):
        rule = problem.rule(zeros + [ti])
        out[i] += integrate(rule, lambda th: kern(ti, th) * w(th))
    return float(out[0]) if np.ndim(t) == 0 else out


def spline_pairing(sol: SplineSolution, e: DualFunctional) -> float:
    """``<sigma, e>``, evaluated through :func:`spline_eval`."""
    e.check_inside(sol.space.a)
    return float(np.dot(e.weights, spline_eval(sol, np.asarray(e.sites))))


def spline_deriv_m(sol: SplineSolution, t):
    """``sigma^(m)(t) = alpha_{p*}(sum_l mu_l <Lambda_m(., t), e_l>)`` (no quadrature)."""
    a = sol.space.a
    ts = np.asarray(t, dtype=float)
    if np.any(ts <= -a) or np.any(ts >= a):
        raise DomainError(f"evaluation points must lie in (-{a}, {a})")
    out = signed_power(sol._problem.v(sol.mu, np.atleast_1d(ts)), sol.space.p_star)
    return float(out[0]) if ts.ndim == 0 else out


def primal_objective(sol: SplineSolution) -> float:
    """``sum_k |lambda_k(sigma)|^p + integral |sigma^(m)|^p``."""
    problem = sol._problem
    ps = sol.space.p_star
    c = problem.B @ sol.mu
    rule = problem.rule(problem.sign_changes(sol.mu))
    return float(np.sum(np.abs(c) ** ps) + integrate(rule, lambda th: np.abs(problem.v(sol.mu, th)) ** ps))


def polynomial_values(sol: SplineSolution) -> np.ndarray:
    """``lambda_k(sigma)`` for each of the ``m`` functionals."""
    return np.atleast_1d(signed_power(sol._problem.B @ sol.mu, sol.space.p_star))
