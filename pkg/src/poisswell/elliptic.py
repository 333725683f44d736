"""
The two elliptic solvers: the plain periodic Poisson problem with a
neutralizing background, and the density-screened vector problem
``(-Delta + rho) A = rhs`` solved by preconditioned Picard iteration.
"""

from __future__ import annotations

import numpy as np

from .errors import NonConvergence
from .grid import Grid, inverse_laplacian_modes, k2, k2_safe
from .operators import l2_norm


def solve_poisson_neutral(grid: Grid, rho):
    """
    Zero-mean V with ``-Delta V = rho - mean(rho)``.

    On the torus the mean of the source must vanish (jellium convention);
    the background subtraction happens here, not at the call sites.
    """
    rh = grid.fft(rho)
    vh = rh / k2_safe(grid)
    vh[~inverse_laplacian_modes(grid)] = 0.0
    return grid.ifft_real(vh)


def apply_screened(grid: Grid, A, rho):
    """Apply ``(-Delta + rho)`` componentwise to a 3-vector field."""
    out = np.empty_like(np.asarray(A))
    for i in range(3):
        out[i] = grid.ifft_real(k2(grid) * grid.fft(A[i])) + rho * A[i]
    return out


def solve_screened_vector(grid: Grid, rhs, rho, tol=1e-11, max_iters=200):
    """
    Solve ``(-Delta + rho) A = rhs`` for a 3-vector A, with rho >= 0.

    Defect-correction iteration preconditioned with the constant-coefficient
    inverse ``(-Delta + mean(rho))^-1``; each update carries an exact line
    search, which reduces to the plain Picard step when the density is
    near-constant and keeps the energy norm strictly decreasing for any
    nonnegative density (the operator is symmetric positive definite).
    For rho == 0 the zero mode of A is pinned to zero and a non-neutral
    rhs is rejected.

    Raises
    ------
    NonConvergence
        if ``max_iters`` is exhausted before the relative residual drops
        below ``tol`` (signals near-vacuum rho with non-neutral rhs, or an
        extreme density contrast).
    """
    rho = np.asarray(rho, dtype=float)
    if rho.min() < -1e-12 * max(1.0, abs(rho).max()):
        raise ValueError("screened solve requires rho >= 0 pointwise")
    rhs = np.asarray(rhs, dtype=float)
    rhs_norm = l2_norm(grid, rhs)
    if rhs_norm == 0.0:
        return np.zeros_like(rhs)

    rho_mean = float(rho.mean())
    if rho_mean <= 1e-14 * max(1.0, abs(rho).max()):
        # vacuum: plain Poisson per component, A zero mode pinned to 0
        means = [abs(np.mean(rhs[i])) for i in range(3)]
        if max(means) > 1e-10 * max(1.0, abs(rhs).max()):
            raise NonConvergence(
                "vacuum density with non-neutral rhs: no periodic solution"
            )
        A = np.empty_like(rhs)
        for i in range(3):
            ah = grid.fft(rhs[i]) / k2_safe(grid)
            ah[~inverse_laplacian_modes(grid)] = 0.0
            A[i] = grid.ifft_real(ah)
        return A

    denom = k2(grid) + rho_mean
    A = np.empty_like(rhs)
    for i in range(3):
        A[i] = grid.ifft_real(grid.fft(rhs[i]) / denom)
    for _ in range(max_iters):
        residual = rhs - apply_screened(grid, A, rho)
        if l2_norm(grid, residual) <= tol * rhs_norm:
            return A
        z = np.empty_like(residual)
        for i in range(3):
            z[i] = grid.ifft_real(grid.fft(residual[i]) / denom)
        rz = float(np.sum(residual * z))
        zsz = float(np.sum(z * apply_screened(grid, z, rho)))
        step = rz / zsz if zsz > 0 else 1.0
        A += step * z
    raise NonConvergence(
        f"screened vector solve: residual above {tol:g} after {max_iters} iterations"
    )
