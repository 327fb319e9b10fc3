"""Brute-force primal oracle for the interpolation problem.

The m-th derivative is discretized as a piecewise constant on ``grid_n``
equal cells and the polynomial part by its ``m`` functional values.  Cell
integrals of the Peano kernel are exact, so nothing here shares code with
the dual solver's quadrature.  The resulting finite-dimensional convex
problem is solved by an augmented Lagrangian method with L-BFGS inner
solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import ConvergenceError, DomainError
from .functionals import ProblemSpace
from .solver import ConstraintSet


@dataclass
class OracleResult:
    poly: np.ndarray  # lambda_k(x)
    deriv: np.ndarray  # x^(m) on each cell
    edges: np.ndarray
    objective: float
    residual: float
    space: ProblemSpace

    def __call__(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return _design(self.space, s, self.edges) @ np.concatenate([self.poly, self.deriv])


def _cell_primitive(space: ProblemSpace, s, edges):
    """``integral_{-a}^{edge} Lambda_m(s, th) dth`` for each ``s`` (rows) and edge (cols)."""
    m = space.m
    fact = math.factorial(m)

    def H(x, c):
        u = np.subtract.outer(x, c)
        return -np.where(u > 0, u, 0.0) ** m / fact

    out = H(s, edges)
    P = space.dual_basis_values(s)  # (m, ns)
    for k, lam in enumerate(space.lambdas):
        lam_H = sum(w * H(np.array([t]), edges)[0] for w, t in zip(lam.weights, lam.sites))
        out = out - np.outer(P[k], lam_H)
    return out


def _design(space: ProblemSpace, s, edges):
    """Map ``(poly, deriv)`` to point values ``x(s)``."""
    prim = _cell_primitive(space, s, edges)
    cells = prim[:, 1:] - prim[:, :-1]
    return np.hstack([space.dual_basis_values(s).T, cells])


def brute_force_oracle(space: ProblemSpace, cons: ConstraintSet, grid_n: int = 2000,
                       tol: float = 1e-6, max_outer: int = 60) -> OracleResult:
    """Minimize ``sum_k |r_k|^p + sum_i h |d_i|^p`` subject to the constraints."""
    if grid_n < 200:
        raise DomainError("grid_n must be at least 200")
    p = space.p
    a = space.a
    h = 2.0 * a / grid_n
    edges = np.linspace(-a, a, grid_n + 1)
    m = space.m

    rows = []
    for f in cons.functionals:
        D = _design(space, np.asarray(f.sites), edges)
        rows.append(np.asarray(f.weights) @ D)
    A = np.vstack(rows)
    target = np.asarray(cons.targets)
    # unknowns z = (r, h^(1/p) d) so the objective is sum |z|^p
    scale = np.concatenate([np.ones(m), np.full(grid_n, h ** (-1.0 / p))])
    As = A * scale

    def f_obj(z):
        az = np.abs(z)
        return np.sum(az ** p), p * np.sign(z) * az ** (p - 1.0)

    z = np.linalg.lstsq(As, target, rcond=None)[0]
    if not np.any(target):
        z = np.zeros_like(z)
    y = np.zeros(len(target))
    rho = 10.0
    res = np.max(np.abs(As @ z - target))
    prev_res = np.inf
    for _ in range(max_outer):
        def lagr(zz):
            fz, gz = f_obj(zz)
            r = As @ zz - target
            return fz - y @ r + 0.5 * rho * (r @ r), gz - As.T @ y + rho * (As.T @ r)

        opt = minimize(lagr, z, jac=True, method="L-BFGS-B",
                       options={"maxiter": 20000, "maxcor": 30, "gtol": 1e-12, "ftol": 1e-16})
        z = opt.x
        r = As @ z - target
        res = np.max(np.abs(r))
        y = y - rho * r
        if res <= tol and opt.success:
            break
        if res > 0.25 * prev_res:
            rho *= 4.0
        prev_res = res
    else:
        raise ConvergenceError(f"oracle did not reach residual {tol} (got {res:.3e})", best=z, residual=res)
    # minimum-norm step back onto the constraints: a feasible discrete
    # candidate can only overestimate the continuous optimum
    z = z - As.T @ np.linalg.solve(As @ As.T, As @ z - target)
    res = float(np.max(np.abs(As @ z - target)))
    x = z * scale
    return OracleResult(x[:m], x[m:], edges, float(np.sum(np.abs(z) ** p)), res, space)
