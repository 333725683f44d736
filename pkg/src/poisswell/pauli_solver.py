"""
Time integration of the scaled spinor equation

    i eps d_t psi = -(1/2)(eps grad - iA)^2 psi + V psi - (eps/2)(sigma.B) psi

with self-consistently coupled potentials, by Strang splitting: the kinetic
flow is exact in spectral space; the potential/Stern-Gerlach multiplication
is an exact pointwise unitary; the advective piece ``A.grad + (div A)/2`` is
integrated by an explicit midpoint rule inside each nonlinear half-step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from . import kernels
from .diagnostics import DiagnosticsRecord, charge, field_energy, tail_fraction
from .elliptic import solve_poisson_neutral, solve_screened_vector
from .errors import StabilityViolation
from .grid import Grid, dealias_mask, k2
from .operators import curl, dealias, deriv, divergence
from .states import Potentials, SimParams, charge_density, kinetic_current
from .pauli import spin_density


@dataclass
class SpinorRun:
    """Trajectory of a spinor integration plus its diagnostics stream."""

    times: List[float]
    snapshots: List[np.ndarray]
    potentials: List[Potentials]
    records: List[DiagnosticsRecord]
    params: SimParams
    dt: float
    status: str = "completed"
    stop_reason: str = ""

    @property
    def charge_drift(self):
        c0 = self.records[0].charge
        if c0 == 0.0:
            return 0.0
        return max(abs(r.charge - c0) for r in self.records) / c0


class PauliSolver:
    """Strang-splitting integrator on one grid; stateless between calls."""

    def __init__(self, grid: Grid, params: SimParams):
        if params.epsilon <= 0:
            raise ValueError("the spinor solver needs eps > 0")
        self.grid = grid
        self.params = params
        self._kinetic_cache = {}

    # -- potentials ----------------------------------------------------------

    def potentials(self, psi) -> Potentials:
        """
        Self-consistent potentials: Poisson for V; for A the screened form
        ``(-Delta + rho)A = Im(conj(psi) eps grad psi) - eps curl(conj(psi) sigma psi)``
        obtained by moving the -rho A part of the current to the left.
        """
        g = self.grid
        zero_s = np.zeros(g.shape)
        zero_v = np.zeros((3,) + g.shape)
        if not self.params.coupling:
            return Potentials(V=zero_s, A=zero_v, B=zero_v)
        rho = charge_density(psi)
        V = solve_poisson_neutral(g, rho)
        if not self.params.magnetic:
            return Potentials(V=V, A=zero_v, B=zero_v)
        eps = self.params.epsilon
        rhs = eps * (kinetic_current(g, psi) - curl(g, spin_density(psi)))
        A = solve_screened_vector(
            g,
            rhs,
            rho,
            tol=self.params.screened_tol,
            max_iters=self.params.screened_max_iters,
        )
        return Potentials(V=V, A=A, B=curl(g, A))

    # -- single step ---------------------------------------------------------

    def stability_bound(self, pots: Potentials):
        """dt bound 0.5 min(dx/||A||_inf, eps/||V + |A|^2/2||_inf)."""
        dx = min(self.grid.spacings)
        a_inf = float(np.max(np.abs(pots.A)))
        w_inf = float(np.max(np.abs(pots.V + 0.5 * np.sum(pots.A**2, axis=0))))
        bound = np.inf
        if a_inf > 0:
            bound = min(bound, dx / a_inf)
        if w_inf > 0:
            bound = min(bound, self.params.epsilon / w_inf)
        return 0.5 * bound

    def _advect_rhs(self, psi, A, divA):
        g = self.grid
        out = np.zeros_like(psi)
        for j in range(g.dim):
            out += A[j] * deriv(g, psi, j)
        out += 0.5 * divA * psi
        return dealias(g, out)

    def _transport(self, psi, tau, pots):
        if not np.any(pots.A):
            return psi
        divA = divergence(self.grid, pots.A)
        mid = psi + 0.5 * tau * self._advect_rhs(psi, pots.A, divA)
        return psi + tau * self._advect_rhs(mid, pots.A, divA)

    def _multiply(self, psi, tau, pots):
        eps = self.params.epsilon
        W = pots.V + 0.5 * np.sum(pots.A**2, axis=0)
        return kernels.phase_sigma_rotate(psi, (tau / eps) * W, pots.B, 0.5 * tau)

    def _kinetic(self, psi, dt):
        key = float(dt)
        phase = self._kinetic_cache.get(key)
        if phase is None:
            phase = np.exp(-0.5j * self.params.epsilon * dt * k2(self.grid))
            self._kinetic_cache[key] = phase
        return self.grid.ifft(self.grid.fft(psi) * phase)

    def step(self, psi, dt):
        """
        One Strang step, kinetic halves outside:

            K_{dt/2}  T_{dt/2}  M_dt  T_{dt/2}  K_{dt/2}

        The self-consistent potentials are evaluated at mid-step: the
        density is insensitive to the multiplication flow, so after the
        kinetic and transport halves it is midpoint-accurate to O(dt^2),
        which is what keeps the nonlinear coupling second order.  The
        transport half preceding the refresh is run once with predictor
        potentials and then redone with the midpoint ones.
        """
        if dt == 0.0:
            return psi.copy()
        tau = 0.5 * dt
        psi = self._kinetic(psi, tau)
        pots = self.potentials(psi)
        bound = self.stability_bound(pots)
        if dt > bound * (1.0 + 1e-9):
            raise StabilityViolation(f"dt={dt:g} exceeds stability bound {bound:g}")
        if np.any(pots.A):
            # the current (hence A) is sensitive to both transport and the
            # multiply phase at O(dt), so the predictor applies half of each
            predicted = self._multiply(self._transport(psi, tau, pots), tau, pots)
            pots = self.potentials(predicted)
        psi = self._transport(psi, tau, pots)
        psi = self._multiply(psi, dt, pots)
        if self.params.refresh_per_stage:
            pots = self.potentials(psi)
        psi = self._transport(psi, tau, pots)
        psi = self._kinetic(psi, tau)
        return self.grid.ifft(self.grid.fft(psi) * dealias_mask(self.grid))

    # -- full run --------------------------------------------------------------

    def default_dt(self, psi0):
        pots = self.potentials(psi0)
        bound = self.stability_bound(pots)
        cap = self.params.T / 16.0 if self.params.T > 0 else 1e-2
        dt = min(self.params.cfl_safety * bound, cap, 1e-2)
        return max(dt, 1e-8)

    def _record(self, t, psi, pots):
        g = self.grid
        return DiagnosticsRecord(
            t=t,
            charge=charge(g, psi),
            energy=field_energy(g, psi, pots.V, self.params.epsilon),
            tail_fraction=tail_fraction(g, psi),
        )

    def run(self, psi0, tail_warn=0.10) -> SpinorRun:
        g = self.grid
        p = self.params
        psi = self.grid.ifft(self.grid.fft(np.asarray(psi0, dtype=complex)) * dealias_mask(g))
        dt = p.dt if p.dt is not None else self.default_dt(psi)
        n_steps = 0 if p.T == 0 else max(1, int(round(p.T / dt)))
        dt = p.T / n_steps if n_steps else dt

        pots = self.potentials(psi)
        times = [0.0]
        snaps = [psi.copy()]
        pot_hist = [pots]
        records = [self._record(0.0, psi, pots)]
        status, reason = "completed", ""
        for n in range(1, n_steps + 1):
            psi = self.step(psi, dt)
            if not np.all(np.isfinite(psi.view(float))):
                status, reason = "blowup", "non-finite state"
                break
            t = n * dt
            if n % p.sample_every == 0 or n == n_steps:
                pots = self.potentials(psi)
                rec = self._record(t, psi, pots)
                if rec.tail_fraction > tail_warn and not reason:
                    reason = "spectral tail warning"
                times.append(t)
                snaps.append(psi.copy())
                pot_hist.append(pots)
                records.append(rec)
        return SpinorRun(
            times=times,
            snapshots=snaps,
            potentials=pot_hist,
            records=records,
            params=p,
            dt=dt,
            status=status,
            stop_reason=reason,
        )


def run_pauli(grid: Grid, psi0, params: SimParams) -> SpinorRun:
    return PauliSolver(grid, params).run(psi0)
