import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import triangle_linear_solve

from banachic import ConvergenceError, DomainError, TriangleGrid, discrete_energy, energy_gradient, solve_kernel
from banachic.errors import ConfigurationError
from banachic.plaplace import residual


def test_node_count():
    for n in (1, 4, 33):
        grid = TriangleGrid(n)
        assert grid.size == (n + 1) * (n + 2) // 2
        assert grid.free.sum() == grid.size - 3


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_hand_computed_bump(p):
    # n=2, u=1 at (1,1): two cells see a difference of 1/h = 2
    grid = TriangleGrid(2)
    u = np.zeros(grid.size)
    u[grid.index[1, 1]] = 1.0
    assert discrete_energy(grid, u, np.zeros(grid.size), p) == pytest.approx(0.5 * 2 ** p / p, rel=1e-14)
    g = energy_gradient(grid, u, np.zeros(grid.size), p)
    assert g[grid.index[1, 1]] == pytest.approx(2 ** (p - 1), rel=1e-14)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_gradient_finite_differences(p):
    grid = TriangleGrid(8)
    rng = np.random.default_rng(3)
    u = rng.normal(size=grid.size)
    phi = rng.normal(size=grid.size)
    g = energy_gradient(grid, u, phi, p)
    eps = 1e-6
    for k in rng.choice(grid.size, 12, replace=False):
        e = np.zeros(grid.size)
        e[k] = eps
        fd = (discrete_energy(grid, u + e, phi, p) - discrete_energy(grid, u - e, phi, p)) / (2 * eps)
        assert g[k] == pytest.approx(fd, rel=1e-6, abs=1e-8)


@pytest.mark.parametrize("n", [4, 9, 33])
def test_p2_matches_loop_assembled_oracle(n):
    grid = TriangleGrid(n)
    c = max(n // 3, 1)
    u = solve_kernel(grid, grid.delta(c, c), 2.0).values
    ref, index = triangle_linear_solve(n, {(c, c): n * n})
    mapped = np.array([ref[index[(i, j)]] for i, j in zip(grid.i, grid.j)])
    assert np.max(np.abs(u - mapped)) <= 1e-6


def test_residual_examples():
    grid = TriangleGrid(9)
    phi = grid.delta(3, 2).values
    assert residual(grid, np.zeros(grid.size), phi, 3.0) == pytest.approx(np.max(np.abs(phi)) * grid.h ** 2)
    ref, index = triangle_linear_solve(9, {(3, 2): 81.0})
    mapped = np.array([ref[index[(i, j)]] for i, j in zip(grid.i, grid.j)])
    assert residual(grid, mapped, phi, 2.0) <= 1e-10


def test_zero_load_gives_zero_field():
    grid = TriangleGrid(10)
    for p in (1.5, 2.0, 3.0):
        assert np.all(solve_kernel(grid, np.zeros(grid.size), p).values == 0.0)


@pytest.mark.parametrize("p", [2.0, 3.0, 4.0])
def test_swap_symmetry(p):
    grid = TriangleGrid(17)
    u = solve_kernel(grid, grid.delta(5, 5), p).values
    assert np.max(np.abs(grid.swap(u) - u)) <= 1e-8


def test_p3_n33_residual_and_symmetry():
    grid = TriangleGrid(33)
    phi = grid.delta(11, 11)
    sol = solve_kernel(grid, phi, 3.0)
    assert residual(grid, sol.values, phi.values, 3.0) <= 1e-6
    assert np.max(np.abs(grid.swap(sol.values) - sol.values)) <= 1e-8
    assert sol.info["energy"] < sol.info["initial_energy"]


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_homogeneity_and_oddness(p):
    grid = TriangleGrid(12)
    phi = grid.delta(2, 6).values + 0.5 * grid.delta(7, 1).values
    u = solve_kernel(grid, phi, p, tol=1e-11).values
    scale = 2.5
    u_scaled = solve_kernel(grid, scale * phi, p, tol=1e-11).values
    np.testing.assert_allclose(u_scaled, scale ** (1 / (p - 1)) * u, atol=1e-6)
    u_neg = solve_kernel(grid, -phi, p, tol=1e-11).values
    np.testing.assert_allclose(u_neg, -u, atol=1e-6)


def test_bb_matches_direct_at_p2():
    grid = TriangleGrid(16)
    phi = grid.delta(4, 7)
    direct = solve_kernel(grid, phi, 2.0).values
    bb = solve_kernel(grid, phi, 2.0, tol=1e-10, method="bb").values
    assert np.max(np.abs(direct - bb)) <= 1e-6


def test_smoothed_newton_p_below_two():
    grid = TriangleGrid(16)
    phi = grid.delta(5, 5)
    sol = solve_kernel(grid, phi, 1.5)
    assert sol.info["method"] == "smoothed-newton"
    assert residual(grid, sol.values, phi.values, 1.5) <= 1e-8
    assert np.max(np.abs(grid.swap(sol.values) - sol.values)) <= 1e-6


def test_vertices_pinned():
    grid = TriangleGrid(9)
    u = solve_kernel(grid, grid.delta(2, 2), 3.0).values
    assert np.all(u[grid.pinned] == 0.0)


def test_convergence_error_carries_best():
    grid = TriangleGrid(17)
    with pytest.raises(ConvergenceError) as info:
        solve_kernel(grid, grid.delta(5, 5), 3.0, max_iter=2)
    assert info.value.best.shape == (grid.size,)
    assert np.isfinite(info.value.residual)


def test_bad_inputs():
    grid = TriangleGrid(4)
    with pytest.raises(DomainError):
        solve_kernel(grid, np.zeros(grid.size), 1.0)
    with pytest.raises(DomainError):
        solve_kernel(grid, np.zeros(grid.size), 3.0, method="cg")
    with pytest.raises(ConfigurationError):
        solve_kernel(grid, np.zeros(3), 3.0)
    with pytest.raises(DomainError):
        TriangleGrid(0)


@settings(max_examples=25, deadline=None)
@given(p=st.floats(1.2, 5.0), seed=st.integers(0, 2 ** 16))
def test_property_energy_convex_along_segments(p, seed):
    grid = TriangleGrid(6)
    rng = np.random.default_rng(seed)
    u, v, phi = rng.normal(size=(3, grid.size))
    e = [discrete_energy(grid, (1 - s) * u + s * v, phi, p) for s in (0.0, 0.5, 1.0)]
    assert e[1] <= 0.5 * (e[0] + e[2]) + 1e-12 * max(1.0, abs(e[0]) + abs(e[2]))
