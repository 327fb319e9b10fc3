"""Discrete kernel of the anisotropic p-Dirichlet space on the unit triangle.

The triangle ``K`` has vertices ``(0,0), (1,0), (0,1)``; nodes are
``(i h, j h)`` with ``i + j <= n``.  For a load ``phi`` the kernel value
``u = B phi`` minimizes

    E(u) = h^2 sum_cells (1/p)(|D_x u|^p + |D_y u|^p) - h^2 sum_nodes phi u

over fields vanishing at the three vertices, with forward differences on
each lower-left cell ``(i,j), (i+1,j), (i,j+1)``.  The rest of the boundary
is free.  ``grad E = 0`` is the discrete form of
``-sum_b D_b(alpha_p(D_b u)) = phi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import spsolve

from .core_maps import signed_power
from .errors import ConfigurationError, ConvergenceError, DomainError


@dataclass(frozen=True)
class TriangleGrid:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        n = int(self.n)
        i, j = np.array([(i, j) for j in range(n + 1) for i in range(n + 1 - j)]).T
        index = -np.ones((n + 1, n + 1), dtype=int)
        index[i, j] = np.arange(i.size)
        cells = i + j <= n - 1
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "index", index)
        ci, cj = i[cells], j[cells]
        object.__setattr__(self, "cell_origin", index[ci, cj])
        object.__setattr__(self, "cell_east", index[ci + 1, cj])
        object.__setattr__(self, "cell_north", index[ci, cj + 1])
        pinned = np.array([index[0, 0], index[n, 0], index[0, n]])
        free = np.ones(i.size, dtype=bool)
        free[pinned] = False
        object.__setattr__(self, "pinned", pinned)
        object.__setattr__(self, "free", free)

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def size(self) -> int:
        return self.i.size

    @property
    def x(self):
        return self.i * self.h

    @property
    def y(self):
        return self.j * self.h

    def swap(self, values):
        """Field reflected across the diagonal ``x = y``."""
        values = np.asarray(values)
        return values[self.index[self.j, self.i]]

    def field(self, values=None) -> "GridField":
        return GridField(self, np.zeros(self.size) if values is None else values)

    def delta(self, i: int, j: int) -> "GridField":
        """Discrete Dirac load at node ``(i, j)`` (unit mass after the ``h^2`` weight)."""
        u = np.zeros(self.size)
        u[self.index[i, j]] = 1.0 / self.h ** 2
        return GridField(self, u)


@dataclass
class GridField:
    grid: TriangleGrid
    values: np.ndarray
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size,):
            raise ConfigurationError(f"field has shape {self.values.shape}, grid has {self.grid.size} nodes")

    def rows(self):
        g = self.grid
        return zip(g.i.tolist(), g.j.tolist(), g.x.tolist(), g.y.tolist(), self.values.tolist())


def _values(grid, u):
    if isinstance(u, GridField):
        if u.grid != grid:
            raise ConfigurationError("fields live on different grids")
        return u.values
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.size,):
        raise ConfigurationError(f"field has shape {u.shape}, grid has {grid.size} nodes")
    return u


def _differences(grid, u):
    h = grid.h
    return (u[grid.cell_east] - u[grid.cell_origin]) / h, (u[grid.cell_north] - u[grid.cell_origin]) / h


def discrete_energy(grid: TriangleGrid, u, phi, p: float) -> float:
    u, phi = _values(grid, u), _values(grid, phi)
    dx, dy = _differences(grid, u)
    h2 = grid.h ** 2
    return float(h2 * (np.sum(np.abs(dx) ** p) + np.sum(np.abs(dy) ** p)) / p - h2 * np.dot(phi, u))


def energy_gradient(grid: TriangleGrid, u, phi, p: float) -> np.ndarray:
    """Gradient of :func:`discrete_energy` with respect to every node value."""
    u, phi = _values(grid, u), _values(grid, phi)
    dx, dy = _differences(grid, u)
    h = grid.h
    fx, fy = h * signed_power(dx, p), h * signed_power(dy, p)
    n = grid.size
    g = (np.bincount(grid.cell_east, fx, n) - np.bincount(grid.cell_origin, fx, n)
         + np.bincount(grid.cell_north, fy, n) - np.bincount(grid.cell_origin, fy, n))
    return g - h * h * phi


def residual(grid: TriangleGrid, u, phi, p: float) -> float:
    """Sup-norm of the energy gradient over the free nodes."""
    return float(np.max(np.abs(energy_gradient(grid, u, phi, p)[grid.free])))


def stiffness(grid: TriangleGrid) -> sps.csr_matrix:
    """Hessian of the ``p = 2`` energy (a graph Laplacian on grid edges)."""
    rows, cols, vals = [], [], []
    for a, b in ((grid.cell_origin, grid.cell_east), (grid.cell_origin, grid.cell_north)):
        rows += [a, b, a, b]
        cols += [a, b, b, a]
        vals += [np.ones(a.size), np.ones(a.size), -np.ones(a.size), -np.ones(a.size)]
    return sps.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(grid.size, grid.size))


def _smoothed(grid, u, phi, p, eps):
    """Energy, free gradient and free Hessian with ``|d|^p`` replaced by ``(d^2 + eps^2)^(p/2)``."""
    h = grid.h
    n = grid.size
    dx, dy = _differences(grid, u)
    E = h * h * (np.sum((dx * dx + eps * eps) ** (p / 2)) + np.sum((dy * dy + eps * eps) ** (p / 2))) / p
    E -= h * h * np.dot(phi, u)
    g = -h * h * phi
    rows, cols, vals = [], [], []
    for (a, b), d in (((grid.cell_origin, grid.cell_east), dx), ((grid.cell_origin, grid.cell_north), dy)):
        r = d * d + eps * eps
        f = h * d * r ** (p / 2 - 1)
        g = g + np.bincount(b, f, n) - np.bincount(a, f, n)
        w = r ** (p / 2 - 2) * ((p - 1) * d * d + eps * eps)
        rows += [a, b, a, b]
        cols += [a, b, b, a]
        vals += [w, w, -w, -w]
    g[~grid.free] = 0.0
    H = sps.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    return E, g, H[grid.free][:, grid.free].tocsc()


def _solve_smoothed_newton(grid, phi, p, tol, max_iter):
    """Newton on a smoothed energy, shrinking the smoothing as Newton converges.

    Stops on the gradient of the exact energy.  Used for ``p < 2`` where the
    exact Hessian is unbounded at vanishing differences.
    """
    free = grid.free
    u = _solve_linear(grid, phi)
    dx, dy = _differences(grid, u)
    scale = max(np.max(np.abs(dx)), np.max(np.abs(dy)), 1e-300)
    eps = 0.1 * scale
    it = 0
    while True:
        g_true = energy_gradient(grid, u, phi, p)
        gnorm = float(np.max(np.abs(g_true[free])))
        if gnorm <= tol:
            return u, it, gnorm
        if it >= max_iter:
            break
        E, g, H = _smoothed(grid, u, phi, p, eps)
        gs = np.max(np.abs(g))
        if gs <= max(0.1 * tol, 1e-2 * gnorm):
            if eps < 1e-14 * scale:
                break
            eps *= 0.1
            continue
        it += 1
        d = np.zeros(grid.size)
        d[free] = -spsolve(H, g[free])
        slope = g @ d
        t = 1.0
        while t > 1e-12 and _smoothed(grid, u + t * d, phi, p, eps)[0] > E + 1e-4 * t * slope:
            t *= 0.5
        if t <= 1e-12:
            if eps < 1e-14 * scale:
                break
            eps *= 0.1
            continue
        u = u + t * d
        if t == 1.0 and np.max(np.abs(_smoothed(grid, u, phi, p, eps)[1])) < 1e-3 * gs:
            eps *= 0.1
    raise ConvergenceError(f"p-Laplacian solve did not converge (gradient norm {gnorm:.3e})",
                           best=u, residual=gnorm, iterations=it)


def _solve_linear(grid, phi):
    K = stiffness(grid)[grid.free][:, grid.free].tocsc()
    u = np.zeros(grid.size)
    u[grid.free] = spsolve(K, grid.h ** 2 * phi[grid.free])
    return u


def solve_kernel(grid: TriangleGrid, phi, p: float, tol: float = 1e-8, max_iter: int = 5000,
                 method: str = "auto", memory: int = 10) -> GridField:
    """Minimize the discrete energy with the vertices pinned to zero.

    ``method="auto"`` uses a sparse direct solve for ``p = 2``, Newton on a
    smoothed energy for ``p < 2`` and Barzilai-Borwein gradient descent with
    a non-monotone line search for ``p > 2``; ``method="bb"`` forces the
    gradient path.  Close to ``p = 1`` a gradient tolerance of ``1e-8`` may
    be out of reach in double precision; a :class:`ConvergenceError` then
    carries the best field.
    """
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p!r}")
    phi = _values(grid, phi)
    if method not in ("auto", "bb"):
        raise DomainError(f"unknown method {method!r}")
    if method == "auto" and p == 2:
        u = _solve_linear(grid, phi)
        return GridField(grid, u, {"method": "direct", "iterations": 0,
                                   "residual": residual(grid, u, phi, p)})
    if method == "auto" and p < 2:
        u, it, gnorm = _solve_smoothed_newton(grid, phi, p, tol, min(max_iter, 500))
        return GridField(grid, u, {"method": "smoothed-newton", "iterations": it, "residual": gnorm,
                                   "energy": discrete_energy(grid, u, phi, p), "initial_energy": 0.0})

    free = grid.free
    u = np.zeros(grid.size)
    E = discrete_energy(grid, u, phi, p)
    g = energy_gradient(grid, u, phi, p)
    g[~free] = 0.0
    history = [E]
    E0 = E
    step = 1.0 / max(np.max(np.abs(g)), 1e-300)
    for it in range(max_iter + 1):
        gnorm = np.max(np.abs(g))
        if gnorm <= tol:
            return GridField(grid, u, {"method": "bb", "iterations": it, "residual": float(gnorm),
                                       "energy": E, "initial_energy": E0})
        if it == max_iter:
            break
        ref = max(history[-memory:])
        gg = g @ g
        t = step
        for _ in range(60):
            trial = u - t * g
            Et = discrete_energy(grid, trial, phi, p)
            if Et <= ref - 1e-4 * t * gg:
                break
            t *= 0.5
        gt = energy_gradient(grid, trial, phi, p)
        gt[~free] = 0.0
        s, y = trial - u, gt - g
        sy = s @ y
        step = (s @ s) / sy if sy > 0 else 2.0 * t
        u, g, E = trial, gt, Et
        history.append(E)
    raise ConvergenceError(f"p-Laplacian solve did not converge (gradient norm {gnorm:.3e})",
                           best=u, residual=float(gnorm), iterations=max_iter)
