import numpy as np
import pytest

from poisswell.elliptic import apply_screened, solve_poisson_neutral, solve_screened_vector
from poisswell.errors import NonConvergence
from poisswell.grid import Grid
from poisswell.operators import l2_norm, laplacian

from conftest import random_band_limited


def dense_screened_matrix(grid, rho):
    """Brute-force dense matrix of (-Delta + rho) on one component (d=1)."""
    n = grid.shape[0]
    M = np.zeros((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        col = -laplacian(grid, e) + rho * e
        M[:, j] = col
    return M


class TestPoissonNeutral:
    def test_cosine_unit_eigenvalue(self):
        g = Grid((64,))
        x = g.coordinates()[0].ravel()
        V = solve_poisson_neutral(g, np.cos(x))
        assert np.max(np.abs(V - np.cos(x))) < 1e-13

    def test_constant_source_maps_to_zero(self):
        g = Grid((32,))
        V = solve_poisson_neutral(g, np.full(g.shape, 2.5))
        assert np.max(np.abs(V)) < 1e-14

    def test_mode_two_eigenvalue(self):
        g = Grid((64,))
        x = g.coordinates()[0].ravel()
        V = solve_poisson_neutral(g, np.cos(2 * x))
        assert np.max(np.abs(V - np.cos(2 * x) / 4.0)) < 1e-13

    def test_manufactured_solutions_few_modes(self, rng):
        # acceptance: sums of <= 5 Fourier modes reproduced to 1e-12 relative
        for shape in [(64,), (32, 32)]:
            g = Grid(shape)
            modes = rng.integers(1, 6, size=5)
            xs = g.coordinates()
            V_exact = np.zeros(g.shape)
            for m in modes:
                V_exact = V_exact + np.cos(m * xs[0]) * np.ones(g.shape) / m
            rho = -laplacian(g, V_exact)
            V = solve_poisson_neutral(g, rho)
            assert l2_norm(g, V - V_exact) <= 1e-12 * l2_norm(g, V_exact)

    def test_residual_identity(self, rng):
        g = Grid((64,))
        rho = random_band_limited(g, rng)
        V = solve_poisson_neutral(g, rho)
        target = rho - rho.mean()
        assert l2_norm(g, -laplacian(g, V) - target) <= 1e-12 * max(
            1.0, l2_norm(g, target)
        )
        assert abs(V.mean()) < 1e-14


class TestScreenedVector:
    def test_zero_rhs(self, rng):
        g = Grid((32,))
        rho = 1.0 + random_band_limited(g, rng, amplitude=0.3)
        A = solve_screened_vector(g, np.zeros((3,) + g.shape), rho)
        assert np.max(np.abs(A)) == 0.0

    def test_uniform_density_eigenvalue(self):
        # (-Delta + 1) cos(x)/2 = cos(x)
        g = Grid((64,))
        x = g.coordinates()[0].ravel()
        rhs = np.zeros((3,) + g.shape)
        rhs[0] = np.cos(x)
        A = solve_screened_vector(g, rhs, np.ones(g.shape))
        assert np.max(np.abs(A[0] - np.cos(x) / 2.0)) < 1e-11
        assert np.max(np.abs(A[1:])) < 1e-13

    def test_matches_dense_solve(self):
        # acceptance: d=1, N=32 dense direct solve oracle at 1e-8
        g = Grid((32,))
        x = g.coordinates()[0].ravel()
        rho = 1.0 + 0.5 * np.cos(x)
        rhs = np.zeros((3,) + g.shape)
        rhs[0] = np.cos(x)
        A = solve_screened_vector(g, rhs, rho)
        M = dense_screened_matrix(g, rho)
        exact = np.linalg.solve(M, rhs[0])
        assert l2_norm(g, A[0] - exact) <= 1e-8 * l2_norm(g, exact)

    def test_random_density_matches_dense(self, rng):
        g = Grid((32,))
        rho = 1.0 + random_band_limited(g, rng, amplitude=0.6)
        rho = np.clip(rho, 0.05, None)
        rhs = np.zeros((3,) + g.shape)
        rhs[0] = random_band_limited(g, rng)
        rhs[2] = random_band_limited(g, rng)
        A = solve_screened_vector(g, rhs, rho)
        M = dense_screened_matrix(g, rho)
        for c in (0, 2):
            exact = np.linalg.solve(M, rhs[c])
            assert l2_norm(g, A[c] - exact) <= 1e-8 * max(1e-30, l2_norm(g, exact))

    def test_matches_dense_solve_2d(self, rng):
        # brute-force equivalence on a small 2d instance (16x16 unknowns)
        g = Grid((16, 16))
        rho = 1.0 + random_band_limited(g, rng, amplitude=0.5, kmax=2)
        rho = np.clip(rho, 0.05, None)
        rhs_comp = random_band_limited(g, rng, kmax=3)
        rhs = np.zeros((3,) + g.shape)
        rhs[1] = rhs_comp
        A = solve_screened_vector(g, rhs, rho)
        n = g.npoints
        M = np.zeros((n, n))
        for j in range(n):
            e = np.zeros(n)
            e[j] = 1.0
            field = e.reshape(g.shape)
            M[:, j] = (-laplacian(g, field) + rho * field).ravel()
        exact = np.linalg.solve(M, rhs_comp.ravel()).reshape(g.shape)
        assert l2_norm(g, A[1] - exact) <= 1e-8 * max(1e-30, l2_norm(g, exact))

    def test_residual_contract(self, rng):
        g = Grid((64,))
        rho = 1.0 + random_band_limited(g, rng, amplitude=0.4)
        rho = np.clip(rho, 0.0, None)
        rhs = random_band_limited(g, rng, components=3)
        A = solve_screened_vector(g, rhs, rho)
        res = l2_norm(g, apply_screened(g, A, rho) - rhs)
        assert res <= 1e-10 * l2_norm(g, rhs)

    def test_vacuum_neutral_rhs(self):
        g = Grid((64,))
        x = g.coordinates()[0].ravel()
        rhs = np.zeros((3,) + g.shape)
        rhs[1] = np.cos(x)
        A = solve_screened_vector(g, rhs, np.zeros(g.shape))
        assert np.max(np.abs(A[1] - np.cos(x))) < 1e-12

    def test_vacuum_non_neutral_rhs_raises(self):
        g = Grid((32,))
        rhs = np.zeros((3,) + g.shape)
        rhs[0] = 1.0
        with pytest.raises(NonConvergence):
            solve_screened_vector(g, rhs, np.zeros(g.shape))

    def test_negative_density_rejected(self):
        g = Grid((32,))
        with pytest.raises(ValueError):
            solve_screened_vector(
                g, np.zeros((3,) + g.shape), np.full(g.shape, -1.0)
            )

    def test_zero_mode_pinned_by_density(self):
        # mean(rho) A0 = mean(rhs) for uniform rho and uniform rhs
        g = Grid((32,))
        rhs = np.zeros((3,) + g.shape)
        rhs[0] = 2.0
        A = solve_screened_vector(g, rhs, np.full(g.shape, 0.5))
        assert np.max(np.abs(A[0] - 4.0)) < 1e-10
