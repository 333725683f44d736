"""
Physical state containers and the algebraic source-term formulas: charge
density, phase and spin currents, the full Pauli current, and the WKB
amplitude/phase reconstruction machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import MissingPhase, NonzeroMean, NotAGradient
from .grid import Grid, inverse_laplacian_modes, k2_safe, k3
from .operators import curl, l2_norm
from .pauli import spin_density


@dataclass
class Potentials:
    """Scalar potential, vector potential and the cached magnetic field."""

    V: np.ndarray
    A: np.ndarray
    B: np.ndarray
    E: Optional[np.ndarray] = None


@dataclass
class SourceTerms:
    """Density and the current pieces entering the vector Poisson source."""

    rho: np.ndarray
    w: np.ndarray
    v: np.ndarray
    J: np.ndarray


@dataclass
class SimParams:
    """Run parameters shared by the solvers and the diagnostics."""

    epsilon: float = 0.1
    dt: Optional[float] = None
    T: float = 0.5
    s: float = 4.0
    mu: float = 1.0
    mu1: float = 1.0
    mu2: float = 1.0
    cfl_safety: float = 0.4
    screened_tol: float = 1e-11
    screened_max_iters: int = 200
    sample_every: int = 1
    magnetic: bool = True
    coupling: bool = True
    refresh_per_stage: bool = False

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.T < 0:
            raise ValueError("T must be >= 0")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be > 0")


@dataclass
class HydroState:
    """
    WKB state: spinor amplitude ``a``, velocity ``u`` and phase ``S``.

    ``u = u_mean + grad(S)`` with a constant ``u_mean`` carried separately so
    traveling (plane-wave) data stays representable on the torus; for the
    default families ``u_mean`` is zero.
    """

    a: np.ndarray
    u: np.ndarray
    S: Optional[np.ndarray] = None
    u_mean: np.ndarray = field(default_factory=lambda: np.zeros(3))
    t: float = 0.0
    epsilon: float = 0.1

    def copy(self):
        return HydroState(
            a=self.a.copy(),
            u=self.u.copy(),
            S=None if self.S is None else self.S.copy(),
            u_mean=self.u_mean.copy(),
            t=self.t,
            epsilon=self.epsilon,
        )


def charge_density(psi):
    """rho = |psi_1|^2 + |psi_2|^2 >= 0; invariant under phase factors."""
    return kernels.spinor_density(psi)


def phase_current(grid: Grid, a):
    """
    The quadratic phase current (i/2)(conj(a) grad a - a grad conj(a)),
    summed over spinor components; real up to roundoff.
    """
    a = np.asarray(a)
    out = np.zeros((3,) + grid.shape)
    for i in range(grid.dim):
        acc = np.zeros(grid.shape, dtype=complex)
        for j in range(a.shape[0]):
            da = grid.ifft(1j * k3(grid)[i] * grid.fft(a[j]))
            acc += np.conj(a[j]) * da
        # (i/2)(z - conj(z)) = -Im z
        out[i] = -acc.imag
    return out


def kinetic_current(grid: Grid, a):
    """Im(conj(a) . grad a), the current the Pauli kinetic term produces."""
    return -phase_current(grid, a)


def spin_curl(grid: Grid, a):
    """(1/2) curl of the spin density; divergence-free by construction."""
    return 0.5 * curl(grid, spin_density(a))


def pauli_current(grid: Grid, psi, A, epsilon):
    """
    The Pauli current ``Im(conj(psi)(eps grad - iA)psi) - eps curl(conj(psi) sigma psi)``.

    This is the defining formula; with it the continuity law reads
    ``d_t rho + div J = 0`` (the convention every residual diagnostic uses).
    """
    J = epsilon * kinetic_current(grid, psi)
    rho = charge_density(psi)
    for i in range(3):
        J[i] -= rho * A[i]
    J -= epsilon * curl(grid, spin_density(psi))
    return J


def wkb_current(grid: Grid, a, u, A, epsilon):
    """
    The Pauli current of ``a exp(iS/eps)`` in closed form,
    ``rho (u - A) + eps (Im(conj(a) grad a) - curl(conj(a) sigma a))``;
    algebraically identical to :func:`pauli_current` on reconstructed
    spinors, and equal to ``rho (u - A)`` at eps = 0.
    """
    rho = charge_density(a)
    J = epsilon * (kinetic_current(grid, a) - curl(grid, spin_density(a)))
    for i in range(3):
        J[i] += rho * (u[i] - A[i])
    return J


def current_epsilon_part(grid: Grid, a, epsilon):
    """The O(eps) piece of the WKB current (vanishes linearly as eps -> 0)."""
    return epsilon * (kinetic_current(grid, a) - curl(grid, spin_density(a)))


def source_terms(grid: Grid, state: HydroState) -> SourceTerms:
    rho = charge_density(state.a)
    w = phase_current(grid, state.a)
    v = spin_curl(grid, state.a)
    pots_free = np.zeros((3,) + grid.shape)
    J = wkb_current(grid, state.a, state.u, pots_free, state.epsilon)
    return SourceTerms(rho=rho, w=w, v=v, J=J)


def reconstruct_spinor(grid: Grid, state: HydroState):
    """
    psi_j = a_j exp(i S / eps), including the traveling-phase factor from
    ``u_mean`` (which must sit on integer torus modes to be periodic).
    """
    if state.epsilon <= 0:
        raise MissingPhase("reconstruction needs eps > 0")
    if state.S is None:
        raise MissingPhase("no phase tracked on this state")
    phase = state.S / state.epsilon
    if np.any(state.u_mean):
        xs = grid.coordinates()
        for i in range(grid.dim):
            m = state.u_mean[i] * grid.lengths[i] / (2.0 * np.pi * state.epsilon)
            m_int = round(m)
            if abs(m - m_int) > 1e-8:
                raise MissingPhase(
                    f"mean velocity {state.u_mean[i]} is not an integer torus mode"
                )
            phase = phase + (2.0 * np.pi * m_int / grid.lengths[i]) * xs[i]
        if any(abs(state.u_mean[i]) > 0 for i in range(grid.dim, 3)):
            raise MissingPhase("mean velocity along an inactive axis")
    return np.asarray(state.a) * np.exp(1j * phase)


def recover_phase(grid: Grid, u, curl_tol=1e-6, mean_tol=1e-10):
    """
    Zero-mean S with grad S = u, solved spectrally via Delta S = div u.

    Raises NotAGradient when u carries relatively too much curl and
    NonzeroMean when any component mean exceeds ``mean_tol`` (a nonzero-mean
    field is not the gradient of any periodic function).
    """
    u = np.asarray(u, dtype=float)
    u_norm = l2_norm(grid, u)
    if u_norm == 0.0:
        return np.zeros(grid.shape)
    means = [abs(float(np.mean(u[i]))) for i in range(3)]
    if max(means) > mean_tol:
        raise NonzeroMean(f"mean velocity {max(means):.3e} exceeds {mean_tol:g}")
    c = curl(grid, u)
    if l2_norm(grid, c) > curl_tol * u_norm:
        raise NotAGradient("velocity field is not curl-free")
    ks = k3(grid)
    kdot = np.zeros(grid.shape, dtype=complex)
    for i in range(grid.dim):
        kdot += ks[i] * grid.fft(u[i])
    sh = kdot / (1j * k2_safe(grid))
    sh[~inverse_laplacian_modes(grid)] = 0.0
    return grid.ifft_real(sh)


def normalize_charge(grid: Grid, a, target=1.0):
    """Rescale so the total charge ||a||_2 equals ``target``."""
    norm = l2_norm(grid, a)
    if norm == 0.0:
        raise ValueError("cannot normalize the zero field")
    return np.asarray(a) * (target / norm)
