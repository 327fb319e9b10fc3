"""Dirac-combination functionals, polynomial bases and the problem space.

Elements of the dual space are finite combinations ``sum_j w_j * delta_{t_j}``.
Polynomials are :class:`numpy.polynomial.Polynomial` instances (ascending
monomial coefficients).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .core_maps import ConjugatePair
from .errors import DegeneracyError, DomainError

GRAM_COND_LIMIT = 1e10


@dataclass(frozen=True)
class DualFunctional:
    """A finite combination of point evaluations."""

    weights: tuple
    sites: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        s = tuple(float(x) for x in self.sites)
        if len(w) == 0 or len(w) != len(s):
            raise DomainError("a functional needs at least one (weight, site) term")
        if not all(math.isfinite(x) for x in w + s):
            raise DomainError("weights and sites must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "sites", s)

    @classmethod
    def dirac(cls, site: float, weight: float = 1.0) -> "DualFunctional":
        return cls((weight,), (site,))

    @classmethod
    def from_terms(cls, terms: Sequence[tuple]) -> "DualFunctional":
        """Build from ``[(weight, site), ...]``."""
        return cls(tuple(w for w, _ in terms), tuple(t for _, t in terms))

    @property
    def terms(self):
        return list(zip(self.weights, self.sites))

    @property
    def point_site(self):
        """The site if this is a unit point evaluation, else ``None``."""
        if len(self.sites) == 1 and self.weights[0] == 1.0:
            return self.sites[0]
        return None

    def check_inside(self, a: float):
        for t in self.sites:
            if not -a < t < a:
                raise DomainError(f"site {t!r} outside the open interval (-{a}, {a})")

    def __add__(self, other):
        if not isinstance(other, DualFunctional):
            return NotImplemented
        return DualFunctional(self.weights + other.weights, self.sites + other.sites)

    def __mul__(self, c):
        return DualFunctional(tuple(c * w for w in self.weights), self.sites)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __call__(self, x):
        return apply_functional(self, x)


def apply_functional(f: DualFunctional, x: Callable, a: float | None = None):
    """Return ``sum_j w_j * x(t_j)``.

    ``x`` is called once with the array of sites.  If it returns an array of
    shape ``(nsites, ...)`` the pairing is taken along the first axis, which
    lets one call pair a whole family of functions (e.g. a kernel sampled at
    many ``theta``).
    """
    if a is not None:
        f.check_inside(a)
    vals = np.asarray(x(np.asarray(f.sites)), dtype=float)
    w = np.asarray(f.weights)
    if vals.ndim == 0:
        vals = np.full(len(w), float(vals))
    out = np.tensordot(w, vals, axes=(0, 0))
    return float(out) if np.ndim(out) == 0 else out


def lagrange_basis(nodes: Sequence[float]) -> list:
    """Lagrange polynomials ``L_k`` with ``L_k(nodes[l]) == (k == l)``."""
    x = np.asarray(nodes, dtype=float)
    if len(np.unique(x)) != len(x):
        raise DegeneracyError(f"interpolation nodes must be distinct: {list(x)}")
    basis = []
    for k, xk in enumerate(x):
        others = np.delete(x, k)
        num = Polynomial.fromroots(others) if len(others) else Polynomial([1.0])
        basis.append(num / float(np.prod(xk - others)))
    return basis


def monomial_gram(lambdas: Sequence[DualFunctional]) -> np.ndarray:
    """Matrix ``M[k, j] = lambda_k(t**j)`` for ``j < len(lambdas)``."""
    m = len(lambdas)
    M = np.empty((m, m))
    for k, lam in enumerate(lambdas):
        for j in range(m):
            M[k, j] = apply_functional(lam, lambda t, j=j: t ** j)
    return M


def dual_basis(lambdas: Sequence[DualFunctional]) -> list:
    """Polynomials ``P_l`` of degree < m with ``lambda_k(P_l) == (k == l)``."""
    m = len(lambdas)
    if m == 0:
        raise DomainError("need at least one functional")
    M = monomial_gram(lambdas)
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > GRAM_COND_LIMIT:
        _, _, vt = np.linalg.svd(M.T)
        null = np.abs(vt[-1])
        offending = tuple(int(i) for i in np.flatnonzero(null > 1e-3 * null.max()))
        raise DegeneracyError(
            f"functionals {list(offending)} are dependent on polynomials of degree < {m} "
            f"(Gram condition number {cond:.3g})",
            offending,
        )
    C = np.linalg.solve(M, np.eye(m))
    return [Polynomial(C[:, l]) for l in range(m)]


def divided_difference_coefficients(knots: Sequence[float], m: int | None = None) -> np.ndarray:
    """Weights ``mu`` with ``sum_l mu_l f(t_l) = m! * f[t_0, ..., t_m]``.

    For uniform spacing ``h`` this is ``(-1)**(m-l) * C(m, l) / h**m``.
    """
    t = np.asarray(knots, dtype=float)
    if m is None:
        m = len(t) - 1
    if m < 1 or len(t) != m + 1:
        raise DomainError(f"need exactly m+1 knots for order m={m}, got {len(t)}")
    if np.any(np.diff(t) <= 0):
        raise DomainError("knots must be strictly increasing")
    mu = np.empty(m + 1)
    for l in range(m + 1):
        mu[l] = math.factorial(m) / np.prod(t[l] - np.delete(t, l))
    return mu


def default_nodes(a: float, m: int) -> tuple:
    """Node set used when none is given: ``0`` for ``m = 1``, else ``m`` points evenly spread over ``[-a/2, a/2]``."""
    if m == 1:
        return (0.0,)
    return tuple(float(x) for x in np.linspace(-0.5 * a, 0.5 * a, m))


@dataclass(frozen=True)
class ProblemSpace:
    """Interval ``(-a, a)``, derivative order ``m``, exponent pair and the
    ``m`` functionals fixing the polynomial part, with their dual basis."""

    a: float
    m: int
    pair: ConjugatePair
    lambdas: tuple
    dual_basis: tuple

    @classmethod
    def build(cls, a: float, m: int, p: float, lambdas: Sequence[DualFunctional]) -> "ProblemSpace":
        if not (math.isfinite(a) and a > 0):
            raise DomainError(f"half-width a must be positive, got {a!r}")
        if int(m) != m or m < 1:
            raise DomainError(f"order m must be a positive integer, got {m!r}")
        m = int(m)
        lambdas = tuple(lambdas)
        if len(lambdas) != m:
            raise DomainError(f"need exactly m={m} functionals, got {len(lambdas)}")
        for lam in lambdas:
            lam.check_inside(a)
        basis = tuple(dual_basis(lambdas))
        return cls(float(a), m, ConjugatePair(p), lambdas, basis)

    @classmethod
    def from_nodes(cls, a: float, m: int, p: float, nodes: Sequence[float]) -> "ProblemSpace":
        """Point evaluations at ``nodes`` as the functionals."""
        return cls.build(a, m, p, [DualFunctional.dirac(t) for t in nodes])

    @classmethod
    def for_sites(cls, a: float, m: int, p: float, sites: Sequence[float]) -> "ProblemSpace":
        """Default choice: point evaluations at the first ``m`` distinct sites."""
        nodes = []
        for s in sites:
            if float(s) not in nodes:
                nodes.append(float(s))
            if len(nodes) == m:
                break
        if len(nodes) < m:
            raise DegeneracyError(f"need at least m={m} distinct sites, got {len(nodes)}")
        return cls.from_nodes(a, m, p, nodes)

    @property
    def p(self) -> float:
        return self.pair.p

    @property
    def p_star(self) -> float:
        return self.pair.p_star

    @property
    def nodes(self):
        """Tuple of node sites when every functional is a unit point evaluation."""
        sites = [lam.point_site for lam in self.lambdas]
        if any(s is None for s in sites):
            return None
        return tuple(sites)

    @property
    def lambda_sites(self) -> tuple:
        return tuple(sorted({t for lam in self.lambdas for t in lam.sites}))

    def with_exponent(self, p: float) -> "ProblemSpace":
        return ProblemSpace(self.a, self.m, ConjugatePair(p), self.lambdas, self.dual_basis)

    def same_base(self, other: "ProblemSpace") -> bool:
        return self.a == other.a and self.m == other.m and self.lambdas == other.lambdas

    def polynomial_part(self, x: Callable) -> Callable:
        """``s -> sum_k lambda_k(x) P_k(s)``."""
        coeffs = [apply_functional(lam, x) for lam in self.lambdas]

        def proj(s):
            s = np.asarray(s, dtype=float)
            return sum(c * P(s) for c, P in zip(coeffs, self.dual_basis))

        return proj

    def dual_basis_values(self, s) -> np.ndarray:
        """Array of shape ``(m,) + shape(s)`` with ``P_k(s)``."""
        s = np.asarray(s, dtype=float)
        return np.stack([P(s) for P in self.dual_basis])
