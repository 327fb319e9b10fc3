"""Classical and banachic B-splines built from divided-difference weights.

With ``mu`` the weights of ``m! * f[t_0, ..., t_m]`` the classical B-spline

    Q2(t) = sum_l mu_l (t_l - t)_+^(m-1) / (m-1)!

has unit integral, and its banachic counterpart is ``Qp = alpha_{p*}(Q2)``.
Since ``Q2 >= 0`` the map is invertible pointwise: ``Qp**(p-1) == Q2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core_maps import ConjugatePair, signed_power
from .errors import DomainError
from .functionals import DualFunctional, ProblemSpace, divided_difference_coefficients
from .peano import truncated_power
from .quadrature import QuadratureRule, integrate
from .solver import SplineSolution

UNIFORM_RTOL = 1e-12


@dataclass(frozen=True)
class BSplineSpec:
    """Order ``m``, uniform knots ``t_0 < ... < t_n`` (``n >= m``) and exponent ``p``.

    The spline is built on the first ``m + 1`` knots; weights for any
    further knots are zero.
    """

    m: int
    knots: tuple
    p: float
    mu: np.ndarray = field(init=False, repr=False, compare=False)
    pair: ConjugatePair = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"order m must be a positive integer, got {self.m!r}")
        t = tuple(float(x) for x in self.knots)
        if len(t) < self.m + 1:
            raise DomainError(f"need at least m+1={self.m + 1} knots, got {len(t)}")
        steps = np.diff(t)
        if np.any(steps <= 0):
            raise DomainError("knots must be strictly increasing")
        h = (t[-1] - t[0]) / (len(t) - 1)
        if np.max(np.abs(steps - h)) > UNIFORM_RTOL * h:
            raise DomainError("knots must be uniformly spaced")
        mu = np.zeros(len(t))
        mu[: self.m + 1] = divided_difference_coefficients(t[: self.m + 1], self.m)
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "knots", t)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "pair", ConjugatePair(self.p))

    @classmethod
    def uniform(cls, m: int, h: float, p: float, t0: float = 0.0) -> "BSplineSpec":
        return cls(m, tuple(t0 + l * h for l in range(m + 1)), p)

    @property
    def h(self) -> float:
        return (self.knots[-1] - self.knots[0]) / (len(self.knots) - 1)

    @property
    def support(self):
        return self.knots[0], self.knots[self.m]

    @property
    def window(self) -> tuple:
        return self.knots[: self.m + 1]


def bspline_classical(spec: BSplineSpec, t):
    """``sum_l mu_l (t_l - t)_+^(m-1) / (m-1)!``, exactly zero off the support."""
    t = np.asarray(t, dtype=float)
    lo, hi = spec.support
    fact = math.factorial(spec.m - 1)
    val = np.zeros(t.shape)
    for mu_l, t_l in zip(spec.mu[: spec.m + 1], spec.window):
        val = val + mu_l * truncated_power(t_l - t, spec.m - 1)
    # the exact value is nonnegative; cancellation near the ends can leave -1e-16 noise
    val = np.where((t >= lo) & (t <= hi), np.maximum(val / fact, 0.0), 0.0)
    return float(val) if val.ndim == 0 else val


def bspline_banachic(spec: BSplineSpec, t):
    """``alpha_{p*}`` of the classical B-spline."""
    return signed_power(bspline_classical(spec, t), spec.pair.p_star)


@dataclass
class BSplineReport:
    m: int
    h: float
    p: float
    nonnegative: bool
    sup_value: float
    sup_bound: float  # h**(1 - p*)
    sup_bound_paper: float  # h**(1 - p), kept for reference
    integral_p1: float
    lattice_sum: float
    dd_pairs: dict
    tol_integral: float = 1e-8
    tol_lattice: float = 1e-10
    tol_dd: float = 1e-8

    @property
    def sup_within_bound(self) -> bool:
        return self.sup_value <= self.sup_bound * (1.0 + 1e-12)

    @property
    def sup_attains_bound(self) -> bool:
        return abs(self.sup_value - self.sup_bound) <= 1e-8

    @property
    def integral_ok(self) -> bool:
        return abs(self.integral_p1 - 1.0) <= self.tol_integral

    @property
    def lattice_ok(self) -> bool:
        return abs(self.lattice_sum - 1.0 / self.h) <= self.tol_lattice

    @property
    def dd_ok(self) -> bool:
        return all(abs(lhs - rhs) <= self.tol_dd * max(1.0, abs(rhs)) for lhs, rhs in self.dd_pairs.values())

    @property
    def passed(self) -> bool:
        return self.nonnegative and self.sup_within_bound and self.integral_ok and self.lattice_ok and self.dd_ok

    def as_dict(self) -> dict:
        return {
            "m": self.m, "h": self.h, "p": self.p,
            "nonnegative": self.nonnegative,
            "sup_value": self.sup_value,
            "sup_bound": self.sup_bound,
            "sup_bound_paper": self.sup_bound_paper,
            "sup_within_bound": self.sup_within_bound,
            "sup_attains_bound": self.sup_attains_bound,
            "integral_p1": self.integral_p1,
            "integral_ok": self.integral_ok,
            "lattice_sum": self.lattice_sum,
            "lattice_ok": self.lattice_ok,
            "dd": {k: {"integral": v[0], "divided_difference": v[1]} for k, v in self.dd_pairs.items()},
            "dd_ok": self.dd_ok,
            "passed": self.passed,
        }


def _support_rule(spec: BSplineSpec) -> QuadratureRule:
    return QuadratureRule(spec.window)


def dd_pairing(spec: BSplineSpec, y, y_m):
    """``(integral y^(m) Qp^(p-1), sum_l mu_l y(t_l))``."""
    rule = _support_rule(spec)
    q = spec.pair.p
    lhs = integrate(rule, lambda s: y_m(s) * signed_power(bspline_banachic(spec, s), q))
    rhs = float(np.dot(spec.mu, y(np.asarray(spec.knots))))
    return lhs, rhs


def prop9_suite(spec: BSplineSpec, samples: int = 4001) -> BSplineReport:
    """Check sign, sup, unit integral, lattice sum and the divided-difference identity."""
    m, h, q = spec.m, spec.h, spec.pair.p
    lo, hi = spec.support
    grid = np.unique(np.concatenate([np.linspace(lo, hi, samples), [0.5 * (lo + hi)]]))
    qp = bspline_banachic(spec, grid)
    integral = integrate(_support_rule(spec), lambda s: signed_power(bspline_banachic(spec, s), q))
    j = np.arange(math.ceil(lo / h - 1e-9), math.floor(hi / h + 1e-9) + 1)
    lattice = float(np.sum(signed_power(bspline_banachic(spec, j * h), q)))
    fm = float(math.factorial(m))
    fm1 = float(math.factorial(m + 1))
    dd = {
        "s^m/m!": dd_pairing(spec, lambda s: np.asarray(s) ** m / fm, lambda s: np.ones_like(s)),
        "s^(m+1)": dd_pairing(spec, lambda s: np.asarray(s) ** (m + 1), lambda s: fm1 * np.asarray(s)),
    }
    return BSplineReport(
        m=m, h=h, p=q,
        nonnegative=bool(np.all(qp >= 0.0)),
        sup_value=float(np.max(qp)),
        sup_bound=h ** (1.0 - spec.pair.p_star),
        sup_bound_paper=h ** (1.0 - q),
        integral_p1=float(integral),
        lattice_sum=lattice,
        dd_pairs=dd,
    )


def bspline_as_spline(spec: BSplineSpec, a: float | None = None) -> SplineSolution:
    """The interpolating spline whose m-th derivative is the banachic B-spline.

    The functionals are the point evaluations at the knots; the polynomial
    part is fixed by point evaluations at the first ``m`` knots and the dual
    coefficients are the divided-difference weights.
    """
    lo, hi = spec.knots[0], spec.knots[-1]
    if a is None:
        a = max(abs(lo), abs(hi)) + spec.h
    space = ProblemSpace.from_nodes(a, spec.m, spec.pair.p, spec.knots[: spec.m])
    functionals = [DualFunctional.dirac(t) for t in spec.knots]
    return SplineSolution.from_coefficients(space, functionals, spec.mu)
