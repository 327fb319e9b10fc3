"""Composite Gauss-Legendre quadrature with deterministic bisection.

Integrands are vectorized: ``f(x)`` receives a 1-D array of nodes and returns
either an array of the same length or an array of shape ``(..., len(x))`` for
vector-valued integrands.  Panels are refined level by level, each level
evaluated in a single call, and the accepted panel values are summed left to
right, so results do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError, IntegrandError

DEFAULT_ORDER = 16
DEFAULT_TOL = 1e-11
DEFAULT_MAX_DEPTH = 12


@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


@dataclass(frozen=True)
class QuadratureRule:
    breakpoints: tuple
    order: int = DEFAULT_ORDER
    tol: float = DEFAULT_TOL
    max_depth: int = DEFAULT_MAX_DEPTH

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        if len(bp) < 2 or any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise DomainError("breakpoints must be strictly increasing with at least two entries")
        if self.order < 2:
            raise DomainError("panel order must be >= 2")
        if self.max_depth < 0:
            raise DomainError("max depth must be >= 0")
        object.__setattr__(self, "breakpoints", bp)

    @classmethod
    def on_interval(cls, a: float, extra: Iterable[float] = (), **kwargs) -> "QuadratureRule":
        """Rule on ``[-a, a]`` with breakpoints at ``extra`` points inside."""
        return cls(merge_breakpoints(-a, a, extra), **kwargs)

    def with_breakpoints(self, extra: Iterable[float]) -> "QuadratureRule":
        lo, hi = self.breakpoints[0], self.breakpoints[-1]
        return QuadratureRule(
            merge_breakpoints(lo, hi, list(self.breakpoints) + list(extra)),
            self.order, self.tol, self.max_depth,
        )


def merge_breakpoints(lo: float, hi: float, extra: Iterable[float] = (), rel_gap: float = 1e-13) -> tuple:
    """Sorted union of ``{lo, hi}`` and the points of ``extra`` strictly inside.

    Points closer than ``rel_gap * (hi - lo)`` to an already kept point are
    dropped so no panel degenerates.
    """
    gap = rel_gap * (hi - lo)
    pts = sorted(float(x) for x in extra if lo < x < hi)
    out = [lo]
    for x in pts:
        if x - out[-1] > gap:
            out.append(x)
    if hi - out[-1] <= gap:
        out.pop()
    out.append(hi)
    return tuple(out)


@dataclass
class QuadratureInfo:
    converged: bool
    panels: int
    evaluations: int
    unconverged_panels: list


def _panel_values(f, lo, hi, order):
    """Gauss estimates on each panel ``[lo_i, hi_i]``; shape ``(..., npanels)``."""
    x, w = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.asarray(f(nodes), dtype=float)
    if vals.ndim == 0:
        vals = np.full(nodes.size, float(vals))
    if not np.all(np.isfinite(vals)):
        bad = np.flatnonzero(~np.all(np.isfinite(vals.reshape(-1, nodes.size)), axis=0))[0]
        raise IntegrandError(f"integrand is not finite at x={nodes[bad]!r}", location=float(nodes[bad]))
    vals = vals.reshape(vals.shape[:-1] + (lo.size, order))
    return (vals @ w) * half


def integrate(rule: QuadratureRule, f: Callable, full_output: bool = False):
    """Integrate ``f`` over ``[breakpoints[0], breakpoints[-1]]``.

    Each panel is bisected until the sum over its halves differs from its
    own estimate by at most ``tol * (1 + |estimate|)`` (sup over components
    for vector integrands) or ``max_depth`` is reached.  With
    ``full_output=True`` a :class:`QuadratureInfo` is returned as well;
    ``info.converged`` is False when some panel hit the depth limit.
    """
    bp = np.asarray(rule.breakpoints)
    lo, hi = bp[:-1].copy(), bp[1:].copy()
    est = _panel_values(f, lo, hi, rule.order)
    nevals = lo.size * rule.order
    accepted_lo, accepted_val = [], []
    unconverged = []
    depth = 0
    while lo.size:
        if depth >= rule.max_depth:
            accepted_lo.append(lo)
            accepted_val.append(est)
            unconverged.extend(zip(lo.tolist(), hi.tolist()))
            break
        mid = 0.5 * (lo + hi)
        halves = _panel_values(f, np.concatenate([lo, mid]), np.concatenate([mid, hi]), rule.order)
        nevals += 2 * lo.size * rule.order
        n = lo.size
        refined = halves[..., :n] + halves[..., n:]
        err = np.abs(refined - est)
        scale = 1.0 + np.abs(refined)
        if err.ndim > 1:
            ok = np.all((err <= rule.tol * scale).reshape(-1, n), axis=0)
        else:
            ok = err <= rule.tol * scale
        accepted_lo.append(lo[ok])
        accepted_val.append(refined[..., ok])
        keep = ~ok
        lo, hi = np.concatenate([lo[keep], mid[keep]]), np.concatenate([mid[keep], hi[keep]])
        est = np.concatenate([halves[..., :n][..., keep], halves[..., n:][..., keep]], axis=-1)
        depth += 1
    all_lo = np.concatenate(accepted_lo)
    all_val = np.concatenate(accepted_val, axis=-1)
    perm = np.argsort(all_lo, kind="stable")
    total = np.sum(all_val[..., perm], axis=-1)
    value = float(total) if total.ndim == 0 else total
    if full_output:
        info = QuadratureInfo(not unconverged, int(all_lo.size), int(nevals), unconverged)
        return value, info
    return value
