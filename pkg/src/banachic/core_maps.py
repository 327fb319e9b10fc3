"""Signed-power duality maps and conjugate exponents.

``signed_power(rho, q)`` is ``|rho|**(q-1) * sign(rho)``; for conjugate
exponents ``p`` and ``p*`` the maps with exponents ``p`` and ``p*`` are
mutually inverse.  Every nonlinear kernel in the package is built from them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

EXPONENT_TOL = 1e-14


def _check_exponent(q, name="q"):
    if not (math.isfinite(q) and q > 1.0):
        raise DomainError(f"exponent {name} must be finite and > 1, got {q!r}")


def conjugate_exponent(p: float) -> float:
    """Return ``p*`` with ``1/p + 1/p* = 1``."""
    p = float(p)
    _check_exponent(p, "p")
    if p == 2.0:
        return 2.0
    return p / (p - 1.0)


def signed_power(rho, q: float):
    """Evaluate ``|rho|**(q-1) * sign(rho)`` elementwise.

    The value at zero is exactly zero for every ``q > 1``.  Scalars in give
    a Python float out; arrays give arrays.
    """
    q = float(q)
    _check_exponent(q)
    r = np.asarray(rho, dtype=float)
    if q == 2.0:
        out = r.copy()
    else:
        out = np.sign(r) * np.abs(r) ** (q - 1.0)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class ConjugatePair:
    """Hölder-conjugate exponents ``(p, p_star)``.

    ``p_star`` is always recomputed from ``p``; passing it in only serves as
    a consistency check.
    """

    p: float
    p_star: float = field(default=float("nan"))

    def __post_init__(self):
        p = float(self.p)
        _check_exponent(p, "p")
        p_star = conjugate_exponent(p)
        if not math.isnan(self.p_star):
            given = float(self.p_star)
            if not math.isfinite(given) or abs(1.0 / p + 1.0 / given - 1.0) > EXPONENT_TOL:
                raise DomainError(f"p={p!r} and p_star={given!r} are not conjugate")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "p_star", p_star)

    def forward(self, rho):
        """The map with exponent ``p``."""
        return signed_power(rho, self.p)

    def inverse(self, rho):
        """The map with exponent ``p*``, inverse of :meth:`forward`."""
        return signed_power(rho, self.p_star)


def signed_power_inverse_check(rho, pair: ConjugatePair):
    """Return ``α_{p*}(α_p(rho))``, which should reproduce ``rho``."""
    return pair.inverse(pair.forward(rho))


def compose_exponent(a: float, b: float) -> float:
    """Exponent ``c`` with ``signed_power(signed_power(x, b), a) == signed_power(x, c)``."""
    _check_exponent(a, "a")
    _check_exponent(b, "b")
    return 1.0 + (a - 1.0) * (b - 1.0)
