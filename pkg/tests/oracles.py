"""Independent reference implementations used only by the tests.

Nothing here imports the package's numerical kernels; each oracle is built
from a different route (recursion, scipy, loop assembly, closed forms).
"""

import math

import numpy as np
import scipy.sparse as sps
from scipy.interpolate import BSpline, CubicSpline
from scipy.sparse.linalg import spsolve

EXAMPLE_SITES = [-0.6, -0.1, 0.3, 0.7]
EXAMPLE_TARGETS = [0.5, -0.2, 0.4, 1.0]

# Natural cubic spline through the example data, linear outside [-0.6, 0.7];
# values frozen from scipy.interpolate.CubicSpline(bc_type="natural").
NATURAL_T = [-0.9, -0.35, 0.0, 0.1, 0.5, 0.65, 0.9]
NATURAL_VALUES = [1.1758823529411764, -0.009926470588235245, -0.12356617647058821, 0.023235294117647118,
                  0.7255882352941176, 0.9333961397058824, 1.2658823529411767]
# second derivative at NATURAL_T[1:-1]
NATURAL_SECOND = [5.117647058823528, 7.036764705882354, 3.8382352941176485, -1.2794117647058831, -0.3198529411764697]
# integral of the squared second derivative plus the two node values squared
NATURAL_OBJECTIVE = 29.682352941176482 + 0.5 ** 2 + 0.2 ** 2

# brute-force primal objectives (grid_n = 2000) for m = 2 on the example
BRUTE_OBJECTIVE = {1.5: 11.365772910874764, 3.0: 199.70563795882185}


def natural_cubic(t):
    x, y = EXAMPLE_SITES, EXAMPLE_TARGETS
    cs = CubicSpline(x, y, bc_type="natural")
    t = np.asarray(t, dtype=float)
    out = cs(np.clip(t, x[0], x[-1]))
    out = np.where(t < x[0], y[0] + cs(x[0], 1) * (t - x[0]), out)
    return np.where(t > x[-1], y[-1] + cs(x[-1], 1) * (t - x[-1]), out)


def divided_difference(f, knots):
    """``f[t_0, ..., t_n]`` by the textbook recursion."""
    knots = list(knots)
    if len(knots) == 1:
        return f(knots[0])
    return (divided_difference(f, knots[1:]) - divided_difference(f, knots[:-1])) / (knots[-1] - knots[0])


def dd_weights(knots):
    """Weights of ``m! f[t_0..t_m]`` obtained by applying the recursion to indicator data."""
    m = len(knots) - 1
    out = []
    for l in range(len(knots)):
        out.append(math.factorial(m) * divided_difference(lambda x, l=l: 1.0 if x == knots[l] else 0.0, knots))
    return np.array(out)


def cox_de_boor_scaled(knots, t):
    """``N(t) / h``: the unit-integral B-spline via scipy's de Boor evaluation."""
    knots = np.asarray(knots, dtype=float)
    h = (knots[-1] - knots[0]) / (knots.size - 1)
    b = BSpline.basis_element(knots, extrapolate=False)
    val = b(np.asarray(t, dtype=float))
    return np.nan_to_num(val, nan=0.0) / h


def triangle_laplacian(n):
    """Loop-assembled p=2 system on the triangle, pinned vertices removed.

    Returns (A, index) where A is the stiffness of
    ``sum_cells ((u_E - u_O)^2 + (u_N - u_O)^2) / 2`` (the h^2/h^2 factors cancel).
    """
    index = {}
    for j in range(n + 1):
        for i in range(n + 1 - j):
            index[(i, j)] = len(index)
    rows, cols, vals = [], [], []
    for j in range(n):
        for i in range(n - j):
            o = index[(i, j)]
            for nb in (index[(i + 1, j)], index[(i, j + 1)]):
                for r, c, v in ((o, o, 1.0), (nb, nb, 1.0), (o, nb, -1.0), (nb, o, -1.0)):
                    rows.append(r)
                    cols.append(c)
                    vals.append(v)
    N = len(index)
    A = sps.coo_matrix((vals, (rows, cols)), shape=(N, N)).tocsr()
    return A, index


def triangle_linear_solve(n, load):
    """Solve the p=2 kernel problem with the loop-assembled matrix; ``load`` is a dict {(i,j): phi}."""
    A, index = triangle_laplacian(n)
    h = 1.0 / n
    N = len(index)
    b = np.zeros(N)
    for key, val in load.items():
        b[index[key]] = h * h * val
    pinned = {index[(0, 0)], index[(n, 0)], index[(0, n)]}
    free = np.array([k not in pinned for k in range(N)])
    u = np.zeros(N)
    u[free] = spsolve(A[free][:, free].tocsc(), b[free])
    return u, index
