"""
Method-of-lines integration of the WKB hydrodynamic system

    d_t a + (u - A).grad a + (a/2) div(u - A) = (i eps/2) Lap a + (i/2)(sigma.B) a
    d_t u + (u - A).grad u - (grad A)^T u + grad(|A|^2/2 + V) = 0
    d_t S + |u|^2/2 - A.u + (|A|^2/2 + V) = 0

with classical RK4 and potentials recomputed at every stage.  eps = 0 is
the pressureless Euler limit, running through the identical code path.

The velocity equation is the exact gradient of the phase equation; the
term ``(grad A)^T u`` (components sum_j u_j d_i A_j) is what that gradient
produces, and keeping it in that form makes ``d_t u = grad(d_t S)`` an
identity whenever curl u = 0, so the phase stays reconstructible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .diagnostics import (
    DiagnosticsRecord,
    MonitorStatus,
    MonitorThresholds,
    blowup_monitor,
    blowup_sum,
    charge,
    functionals,
    tail_fraction,
)
from .elliptic import solve_poisson_neutral, solve_screened_vector
from .errors import InsufficientHistory, NonConvergence, StabilityViolation
from .grid import Grid, dealias_mask, k3
from .operators import (
    advect,
    curl,
    dealias,
    divergence,
    gradient,
    gradient_part,
    jacobian_transpose_product,
    l2_norm,
    laplacian,
)
from .pauli import apply_sigma_dot, spin_density
from .states import (
    HydroState,
    Potentials,
    SimParams,
    charge_density,
    kinetic_current,
    wkb_current,
)


@dataclass
class HydroRun:
    """Trajectory of a hydro integration plus its diagnostics stream."""

    times: List[float]
    states: List[HydroState]
    potentials: List[Potentials]
    records: List[DiagnosticsRecord]
    params: SimParams
    dt: float
    status: str = "completed"
    stop_reason: str = ""
    caustic: bool = False

    @property
    def charge_drift(self):
        c0 = self.records[0].charge
        if c0 == 0.0:
            return 0.0
        return max(abs(r.charge - c0) for r in self.records) / c0


class HydroSolver:
    def __init__(self, grid: Grid, params: SimParams,
                 thresholds: MonitorThresholds = MonitorThresholds()):
        self.grid = grid
        self.params = params
        self.thresholds = thresholds

    # -- potentials -----------------------------------------------------------

    def potentials(self, state: HydroState) -> Potentials:
        """
        V from the neutralized Poisson solve; A from the screened problem
        ``(-Delta + rho) A = eps (Im(conj(a) grad a) - curl(conj(a) sigma a)) + rho u``,
        which is the WKB transcription of the spinor current source.  At
        eps = 0 the right side reduces to ``rho u``.
        """
        g = self.grid
        zero_s = np.zeros(g.shape)
        zero_v = np.zeros((3,) + g.shape)
        if not self.params.coupling:
            return Potentials(V=zero_s, A=zero_v, B=zero_v)
        rho = charge_density(state.a)
        V = solve_poisson_neutral(g, rho)
        if not self.params.magnetic:
            return Potentials(V=V, A=zero_v, B=zero_v)
        eps = state.epsilon
        rhs = rho * state.u
        if eps > 0:
            rhs = rhs + eps * (
                kinetic_current(g, state.a) - curl(g, spin_density(state.a))
            )
        A = solve_screened_vector(
            g,
            rhs,
            rho,
            tol=self.params.screened_tol,
            max_iters=self.params.screened_max_iters,
        )
        return Potentials(V=V, A=A, B=curl(g, A))

    # -- right-hand sides ------------------------------------------------------

    def rhs(self, state: HydroState, pots: Potentials):
        """Time derivatives (d_t a, d_t u, d_t S), assembled pseudo-spectrally."""
        g = self.grid
        a, u = state.a, state.u
        rel = u - pots.A
        da = -advect(g, rel, a) - 0.5 * a * divergence(g, rel)
        if state.epsilon > 0:
            da = da + 0.5j * state.epsilon * laplacian(g, a)
        if np.any(pots.B):
            da = da + 0.5j * apply_sigma_dot(pots.B, a)
        da = dealias(g, da)

        a_sq = 0.5 * np.sum(pots.A**2, axis=0)
        du = -advect(g, rel, u) + jacobian_transpose_product(g, pots.A, u) - gradient(
            g, a_sq + pots.V
        )
        du = dealias(g, du)

        dS = -0.5 * np.sum(u**2, axis=0) + np.sum(pots.A * u, axis=0) - (a_sq + pots.V)
        dS = dealias(g, dS)
        return da, du, dS

    # -- stepping ---------------------------------------------------------------

    def cfl_bound(self, state: HydroState, pots: Optional[Potentials] = None):
        """dt bound  dx / (||u - A||_inf + eps k_max / 2), c = 1."""
        A = pots.A if pots is not None else 0.0
        rel_inf = float(np.max(np.abs(state.u - A)))
        kmax = max(
            float(np.max(np.abs(k3(self.grid)[i]))) for i in range(self.grid.dim)
        )
        speed = rel_inf + 0.5 * state.epsilon * kmax
        dx = min(self.grid.spacings)
        return dx / speed if speed > 0 else np.inf

    def _apply(self, state: HydroState, deriv, dt_frac):
        da, du, dS = deriv
        out = HydroState(
            a=state.a + dt_frac * da,
            u=state.u + dt_frac * du,
            S=None if state.S is None else state.S + dt_frac * dS,
            u_mean=state.u_mean,
            t=state.t + dt_frac,
            epsilon=state.epsilon,
        )
        return out

    def step_rk4(self, state: HydroState, dt, rhs_fn: Optional[Callable] = None,
                 enforce_gradient=True, check_cfl=True):
        """
        One classical RK4 step; afterwards the velocity is projected back
        onto (constant mean) + (zero-mean gradient) so curl u stays at
        spectral zero and the phase remains consistent with u.
        """
        if rhs_fn is None:
            rhs_fn = lambda s: self.rhs(s, self.potentials(s))
        if check_cfl and dt > self.cfl_bound(state) * (1.0 + 1e-9):
            raise StabilityViolation(
                f"dt={dt:g} exceeds the advection/dispersion bound"
            )
        k1 = rhs_fn(state)
        k2 = rhs_fn(self._apply(state, k1, 0.5 * dt))
        k3_ = rhs_fn(self._apply(state, k2, 0.5 * dt))
        k4 = rhs_fn(self._apply(state, k3_, dt))
        combo = tuple(
            (a + 2.0 * b + 2.0 * c + d) / 6.0
            for a, b, c, d in zip(k1, k2, k3_, k4)
        )
        new = self._apply(state, combo, dt)
        new.t = state.t + dt
        g = self.grid
        mask = dealias_mask(g)
        new.a = g.ifft(g.fft(new.a) * mask)
        if new.S is not None:
            new.S = g.ifft_real(g.fft(new.S) * mask)
        if enforce_gradient:
            proj = gradient_part(g, new.u)
            new.u = proj + new.u_mean.reshape(3, *(1,) * g.dim)
        return new

    # -- full run -----------------------------------------------------------------

    def _record(self, state: HydroState, pots: Potentials, monitor_sup):
        g = self.grid
        fn = functionals(
            g,
            state,
            self.params.s,
            self.params.mu,
            self.params.mu1,
            self.params.mu2,
            dt_u=self.rhs(state, pots)[1],
        )
        sup = max(monitor_sup, fn.monitor) if monitor_sup is not None else fn.monitor
        return DiagnosticsRecord(
            t=state.t,
            charge=charge(g, state.a),
            xs=fn.xs,
            xs_eps=fn.xs_eps,
            xs_eps_dtu=fn.xs_eps_dtu,
            monitor=fn.monitor,
            monitor_sup=sup,
            blowup_sum=blowup_sum(g, state.a, state.u),
            tail_fraction=tail_fraction(g, state.a),
        )

    def default_dt(self, state: HydroState):
        if state.epsilon != self.params.epsilon:
            state = state.copy()
            state.epsilon = self.params.epsilon
        pots = self.potentials(state)
        bound = self.cfl_bound(state, pots)
        cap = self.params.T / 16.0 if self.params.T > 0 else 1e-2
        return max(min(self.params.cfl_safety * bound, cap, 1e-2), 1e-8)

    def run(self, init: HydroState, warn_suppress=True) -> HydroRun:
        import warnings as _warnings

        g = self.grid
        p = self.params
        state = init.copy()
        state.epsilon = p.epsilon
        mask = dealias_mask(g)
        state.a = g.ifft(g.fft(state.a) * mask)
        state.u = gradient_part(g, state.u) + state.u_mean.reshape(3, *(1,) * g.dim)
        if state.S is not None:
            state.S = g.ifft_real(g.fft(state.S) * mask)

        dt = p.dt if p.dt is not None else self.default_dt(state)
        n_steps = 0 if p.T == 0 else max(1, int(round(p.T / dt)))
        dt = p.T / n_steps if n_steps else dt

        ctx = _warnings.catch_warnings()
        ctx.__enter__()
        if warn_suppress:
            _warnings.simplefilter("ignore")
        try:
            pots = self.potentials(state)
            rec0 = self._record(state, pots, None)
            initial_sum = rec0.blowup_sum
            times, states, pot_hist, records = [0.0], [state.copy()], [pots], [rec0]
            status, reason, caustic = "completed", "", False
            tail_warned = False
            for n in range(1, n_steps + 1):
                bound = self.cfl_bound(state, pots)
                if dt > bound * (1.0 + 1e-9):
                    if tail_warned:
                        status, reason, caustic = "blowup", "stability bound crossed", True
                        break
                    raise StabilityViolation(
                        f"dt={dt:g} exceeds bound {bound:g} at t={state.t:g}"
                    )
                try:
                    state = self.step_rk4(state, dt, check_cfl=False)
                    if not np.all(np.isfinite(state.a.view(float))) or not np.all(
                        np.isfinite(state.u)
                    ):
                        status, reason, caustic = "blowup", "non-finite state", True
                        break
                    pots = self.potentials(state)
                except NonConvergence:
                    # elliptic breakdown mid-collapse is blow-up phenomenology;
                    # on a healthy trajectory it should surface
                    if not tail_warned:
                        raise
                    status, reason, caustic = "blowup", "elliptic solve diverged", True
                    break
                if n % p.sample_every == 0 or n == n_steps:
                    rec = self._record(state, pots, records[-1].monitor_sup)
                    times.append(state.t)
                    states.append(state.copy())
                    pot_hist.append(pots)
                    records.append(rec)
                    verdict = blowup_monitor(rec, self.thresholds, initial_sum)
                    if verdict is MonitorStatus.WARNING:
                        tail_warned = True
                    elif verdict is MonitorStatus.TRIGGERED:
                        status, reason, caustic = "blowup", "monitor triggered", True
                        break
        finally:
            ctx.__exit__(None, None, None)
        self._fill_residuals(times, states, pot_hist, records)
        return HydroRun(
            times=times,
            states=states,
            potentials=pot_hist,
            records=records,
            params=p,
            dt=dt,
            status=status,
            stop_reason=reason,
            caustic=caustic,
        )

    def _fill_residuals(self, times, states, pots, records):
        from .diagnostics import continuity_residual, gauge_residual

        g = self.grid
        if len(times) < 3:
            return
        rho = [charge_density(s.a) for s in states]
        J = [
            wkb_current(g, s.a, s.u, p.A, s.epsilon)
            for s, p in zip(states, pots)
        ]
        for i in range(1, len(times) - 1):
            win_rho = [(times[j], rho[j], J[j]) for j in (i - 1, i, i + 1)]
            records[i].continuity_residual = continuity_residual(g, win_rho)
            win_pot = [(times[j], pots[j].V, pots[j].A) for j in (i - 1, i, i + 1)]
            records[i].gauge_residual = gauge_residual(
                g, win_pot, states[i].epsilon
            )


def hydro_potentials(grid: Grid, state: HydroState, params: Optional[SimParams] = None):
    params = params or SimParams(epsilon=state.epsilon)
    return HydroSolver(grid, params).potentials(state)


def wkb_rhs(grid: Grid, state: HydroState, pots: Potentials, params: Optional[SimParams] = None):
    params = params or SimParams(epsilon=state.epsilon)
    return HydroSolver(grid, params).rhs(state, pots)


def euler_rhs(grid: Grid, state: HydroState, pots: Potentials):
    """The eps = 0 time derivatives (d_t a, d_t u); same code path."""
    if state.epsilon != 0:
        state = state.copy()
        state.epsilon = 0.0
    da, du, _ = wkb_rhs(grid, state, pots)
    return da, du


def run_hydro(grid: Grid, init: HydroState, params: SimParams,
              thresholds: MonitorThresholds = MonitorThresholds()) -> HydroRun:
    return HydroSolver(grid, params, thresholds).run(init)


def continuity_form_residual(grid: Grid, state: HydroState, pots: Potentials, da):
    """
    Residual of the density form  d_t rho + div(rho (u - A)) = 0  when
    d_t rho is assembled from the amplitude equation as 2 Re(conj(a) d_t a);
    an algebraic identity up to dealiasing truncation.
    """
    dt_rho = 2.0 * np.einsum("i...,i...->...", np.conj(state.a), da).real
    rho = charge_density(state.a)
    flux = rho * (state.u - pots.A)
    return l2_norm(grid, dt_rho + divergence(grid, flux))


def euler_fields_form(grid: Grid, run: HydroRun, index: int):
    """
    Field-form variables at sample ``index``: E = -grad V - d_t A (centered
    difference of the potential history), B = curl A, and the transformed
    velocity u - A.
    """
    if index <= 0 or index >= len(run.times) - 1:
        raise InsufficientHistory("field form needs both time neighbours")
    tm, tp = run.times[index - 1], run.times[index + 1]
    Am, Ap = run.potentials[index - 1].A, run.potentials[index + 1].A
    dA = (Ap - Am) / (tp - tm)
    pots = run.potentials[index]
    E = -gradient(grid, pots.V) - dA
    B = curl(grid, pots.A)
    u_field = run.states[index].u - pots.A
    return E, B, u_field
