"""Property suites run by ``banachic verify``.

Each suite returns a list of :class:`Check` records holding a measured
error and the tolerance it is held to.  Inputs are fixed (seeded RNG,
fixed grids), so the report is reproducible byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bsplines import BSplineSpec, bspline_as_spline, bspline_classical, prop9_suite
from .core_maps import conjugate_exponent, signed_power
from .functionals import DualFunctional, ProblemSpace, apply_functional, default_nodes
from .kernels import KernelContext, cp_diag, cq_from_cp, kernel_Cp
from .peano import PeanoKernel, representation_check
from .plaplace import TriangleGrid, residual as pde_residual, solve_kernel
from .quadrature import QuadratureRule, integrate
from .solver import ConstraintSet, DualProblem, SolverOptions, gram_solution, solve, spline_deriv_m

EXAMPLE_SITES = (-0.6, -0.1, 0.3, 0.7)
EXAMPLE_TARGETS = (0.5, -0.2, 0.4, 1.0)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    value: float
    tol: float
    passed: bool

    def as_dict(self) -> dict:
        return {"suite": self.suite, "name": self.name, "value": self.value, "tol": self.tol, "passed": self.passed}


def _check(suite, name, value, tol) -> Check:
    value = float(value)
    return Check(suite, name, value, float(tol), bool(value <= tol))


def cox_de_boor(knots, t):
    """Normalized B-spline ``N`` on ``knots`` by the Cox-de Boor recursion (right-open pieces)."""
    knots = np.asarray(knots, dtype=float)
    t = np.asarray(t, dtype=float)
    n = knots.size - 1
    N = [((knots[i] <= t) & (t < knots[i + 1])).astype(float) for i in range(n)]
    for k in range(1, n):
        N = [
            (t - knots[i]) / (knots[i + k] - knots[i]) * N[i]
            + (knots[i + k + 1] - t) / (knots[i + k + 1] - knots[i + 1]) * N[i + 1]
            for i in range(n - k)
        ]
    return N[0]


def suite_core_maps() -> list:
    rng = np.random.default_rng(12345)
    rho = rng.standard_normal(10_000) * 10.0 ** rng.uniform(-3, 3, 10_000)
    out = []
    for p in (1.2, 1.5, 2.0, 3.0, 4.0):
        ps = conjugate_exponent(p)
        err = np.max(np.abs(signed_power(signed_power(rho, p), ps) - rho) / np.maximum(1.0, np.abs(rho)))
        out.append(_check("core_maps", f"roundtrip p={p:g}", err, 1e-12))
        out.append(_check("core_maps", f"odd p={p:g}", np.max(np.abs(signed_power(-rho, p) + signed_power(rho, p))), 0.0))
        out.append(_check("core_maps", f"conjugate p={p:g}", abs(1 / p + 1 / ps - 1), 1e-14))
    return out


def _mixed_lambdas(m: int) -> list:
    base = default_nodes(1.0, m)
    lams = []
    for k, t in enumerate(base):
        if k % 2:
            lams.append(DualFunctional.from_terms([(0.5, t), (0.5, t + 0.1)]))
        else:
            lams.append(DualFunctional.dirac(t))
    return lams


def suite_functionals() -> list:
    out = []
    for m in (1, 2, 3, 4):
        for label, lams in (("points", [DualFunctional.dirac(t) for t in default_nodes(1.0, m)]),
                            ("mixed", _mixed_lambdas(m))):
            space = ProblemSpace.build(1.0, m, 2.0, lams)
            M = np.array([[apply_functional(lam, P) for P in space.dual_basis] for lam in space.lambdas])
            out.append(_check("functionals", f"dual basis m={m} {label}", np.max(np.abs(M - np.eye(m))), 1e-10))
    return out


def suite_quadrature() -> list:
    rule = QuadratureRule.on_interval(1.0)
    exact = integrate(rule, lambda t: t ** 30)
    out = [
        _check("quadrature", "degree 30 monomial", abs(exact - 2.0 / 31.0), 1e-14),
        _check("quadrature", "|t|^1.5", abs(integrate(rule.with_breakpoints([0.0]), lambda t: np.abs(t) ** 1.5) - 0.8), 1e-10),
        _check("quadrature", "kink at 0.5", abs(integrate(rule.with_breakpoints([0.5]), lambda t: np.maximum(0.5 - t, 0.0)) - 1.125), 1e-14),
    ]
    return out


def _test_functions(m: int):
    """``t^j / j!`` for ``j <= m + 2`` plus sin and exp, each with its m-th derivative."""
    fns = []
    for j in range(m + 3):
        fj = float(math.factorial(j))
        if j >= m:
            dm = lambda t, j=j: np.asarray(t, dtype=float) ** (j - m) / math.factorial(j - m)
        else:
            dm = lambda t: np.zeros_like(np.asarray(t, dtype=float))
        fns.append((f"t^{j}/{j}!", lambda t, j=j, fj=fj: np.asarray(t, dtype=float) ** j / fj, dm))
    shift = m * math.pi / 2
    fns.append(("sin", np.sin, lambda t: np.sin(np.asarray(t) + shift)))
    fns.append(("exp", np.exp, np.exp))
    return fns


def suite_peano(points: int = 50) -> list:
    out = []
    s_pts = np.linspace(-0.95, 0.95, points)
    for m in (1, 2, 3):
        space = ProblemSpace.from_nodes(1.0, m, 2.0, default_nodes(1.0, m))
        kern = PeanoKernel(space)
        worst = 0.0
        for _, x, x_m in _test_functions(m):
            for s in s_pts:
                worst = max(worst, representation_check(space, x, x_m, float(s), kernel=kern))
        out.append(_check("peano", f"representation m={m}", worst, 1e-8))
        g = np.linspace(-0.97, 0.97, 30)
        s, t = np.meshgrid(g, g)
        out.append(_check("peano", f"closed vs subtraction m={m}",
                          np.max(np.abs(kern.closed_form(s, t) - kern.subtraction_form(s, t))), 1e-10))
    return out


def suite_kernels() -> list:
    out = []
    pts = np.linspace(0.05, 0.95, 7)
    for p in (1.5, 2.0, 3.0):
        ctx = KernelContext(ProblemSpace.from_nodes(1.0, 1, p, (0.0,)))
        err = max(abs(kernel_Cp(ctx, DualFunctional.dirac(s), DualFunctional.dirac(t)) - min(s, t))
                  for s in pts for t in pts)
        out.append(_check("kernels", f"m=1 min(s,t) p={p:g}", err, 1e-9))
    for m in (1, 2):
        for p in (1.5, 3.0):
            ctx = KernelContext(ProblemSpace.from_nodes(1.0, m, p, default_nodes(1.0, m)))
            err = max(abs(cp_diag(ctx, s) - kernel_Cp(ctx, DualFunctional.dirac(s), DualFunctional.dirac(s)))
                      for s in (-0.7, -0.2, 0.35, 0.8))
            out.append(_check("kernels", f"diagonal m={m} p={p:g}", err, 1e-8))
    grid = np.linspace(-0.95, 0.95, 20)
    S, T = np.meshgrid(grid, grid)
    base = ProblemSpace.from_nodes(1.0, 2, 2.0, default_nodes(1.0, 2))
    for p, q in ((2.0, 3.0), (1.5, 4.0), (3.0, 1.5)):
        lhs, rhs = cq_from_cp(KernelContext(base.with_exponent(p)), KernelContext(base.with_exponent(q)), S, T)
        out.append(_check("kernels", f"transform p={p:g} q={q:g}", np.max(np.abs(lhs - rhs)), 1e-10))
    return out


def _fd_gradient_error(problem: DualProblem, mu) -> float:
    _, g = problem.value_and_grad(mu)
    err = 0.0
    for l in range(mu.size):
        step = 1e-6 * max(1.0, abs(mu[l]))
        e = np.zeros_like(mu)
        e[l] = step
        fd = (problem.value(mu + e) - problem.value(mu - e)) / (2 * step)
        err = max(err, abs(fd - g[l]) / max(1.0, abs(g[l])))
    return err


def suite_solver(with_oracle: bool = True) -> list:
    out = []
    cons = ConstraintSet.from_points(EXAMPLE_SITES, EXAMPLE_TARGETS)
    space2 = ProblemSpace.for_sites(1.0, 2, 2.0, EXAMPLE_SITES)
    sol = solve(space2, cons)
    direct = gram_solution(DualProblem(space2, cons, SolverOptions()))
    out.append(_check("solver", "p=2 Newton vs Gram solve", np.max(np.abs(sol.mu - direct)), 1e-9))
    out.append(_check("solver", "p=2 iterations", sol.iterations, 2))
    out.append(_check("solver", "p=2 residual", sol.residual, 1e-8))
    for p in (1.5, 3.0):
        space = space2.with_exponent(p)
        sol = solve(space, cons)
        out.append(_check("solver", f"p={p:g} residual", sol.residual, 1e-8))
        mu = sol.mu * 1.1 + 0.05
        out.append(_check("solver", f"p={p:g} gradient vs finite differences", _fd_gradient_error(sol._problem, mu), 1e-6))
        if with_oracle:
            from .oracle import brute_force_oracle
            from .solver import primal_objective, spline_eval

            orc = brute_force_oracle(space, cons, grid_n=2000)
            out.append(_check("solver", f"p={p:g} objective minus oracle", primal_objective(sol) - orc.objective, 1e-4))
            t = np.linspace(-0.95, 0.95, 39)
            out.append(_check("solver", f"p={p:g} curve vs oracle", np.max(np.abs(spline_eval(sol, t) - orc(t))), 1e-3))
    return out


def suite_bsplines() -> list:
    out = []
    for m in (1, 2, 3, 4):
        for h in (1.0, 0.5):
            for p in (1.5, 2.0, 3.0):
                spec = BSplineSpec.uniform(m, h, p)
                rep = prop9_suite(spec)
                tag = f"m={m} h={h:g} p={p:g}"
                out.append(_check("bsplines", f"integral {tag}", abs(rep.integral_p1 - 1.0), 1e-8))
                out.append(_check("bsplines", f"lattice {tag}", abs(rep.lattice_sum - 1.0 / h), 1e-10))
                dd = max(abs(l - r) / max(1.0, abs(r)) for l, r in rep.dd_pairs.values())
                out.append(_check("bsplines", f"divided difference {tag}", dd, 1e-8))
                out.append(_check("bsplines", f"sup within bound {tag}", max(rep.sup_value - rep.sup_bound, 0.0), 1e-12 * rep.sup_bound))
                lo, hi = spec.support
                outside = np.concatenate([np.linspace(lo - 2, lo, 50, endpoint=False), np.linspace(hi, hi + 2, 50)])
                out.append(_check("bsplines", f"zero outside support {tag}", np.max(np.abs(bspline_classical(spec, outside))), 0.0))
                if p == 2.0:
                    t = np.linspace(lo, hi, 202)[1:-1]
                    err = np.max(np.abs(bspline_classical(spec, t) - cox_de_boor(spec.knots, t) / h))
                    out.append(_check("bsplines", f"Cox-de Boor {tag}", err, 1e-10))
    for p in (1.5, 3.0):
        spec = BSplineSpec.uniform(2, 0.25, p, t0=-0.3)
        sol = bspline_as_spline(spec)
        t = np.linspace(-0.99 * sol.space.a, 0.99 * sol.space.a, 200)
        err = np.max(np.abs(spline_deriv_m(sol, t) - signed_power(bspline_classical(spec, t), spec.pair.p_star)))
        out.append(_check("bsplines", f"spline bridge m=2 p={p:g}", err, 1e-10))
    return out


def suite_plaplace(n: int = 33) -> list:
    grid = TriangleGrid(n)
    c = n // 3
    phi = grid.delta(c, c).values
    u_direct = solve_kernel(grid, phi, 2.0).values
    u_bb = solve_kernel(grid, phi, 2.0, tol=1e-10, method="bb").values
    out = [_check("plaplace", "p=2 gradient descent vs sparse solve", np.max(np.abs(u_bb - u_direct)), 1e-6)]
    u3 = solve_kernel(grid, phi, 3.0).values
    out.append(_check("plaplace", "p=3 residual", pde_residual(grid, u3, phi, 3.0), 1e-6))
    out.append(_check("plaplace", "p=3 swap symmetry", np.max(np.abs(grid.swap(u3) - u3)), 1e-8))
    zero = solve_kernel(grid, np.zeros(grid.size), 3.0).values
    out.append(_check("plaplace", "zero load", np.max(np.abs(zero)), 0.0))
    return out


SUITES = {
    "core_maps": suite_core_maps,
    "functionals": suite_functionals,
    "quadrature": suite_quadrature,
    "peano": suite_peano,
    "kernels": suite_kernels,
    "solver": suite_solver,
    "bsplines": suite_bsplines,
    "plaplace": suite_plaplace,
}


def run_suites(names=None) -> list:
    names = list(SUITES) if not names else list(names)
    checks = []
    for name in names:
        checks.extend(SUITES[name]())
    return checks


def format_table(checks) -> str:
    width = max(len(f"{c.suite}: {c.name}") for c in checks)
    lines = []
    for c in checks:
        label = f"{c.suite}: {c.name}"
        lines.append(f"{'PASS' if c.passed else 'FAIL'}  {label:<{width}}  value={c.value:.3e}  tol={c.tol:.1e}")
    n_fail = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"
